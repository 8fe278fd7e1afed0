// Copyright 2026 The sketchsaddle Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sketchsaddle/instances.hpp"
#include "sketchsaddle/regbounds.hpp"
#include "sketchsaddle/sketch.hpp"
#include "sketchsaddle/solver.hpp"

namespace sketchsaddle {

inline constexpr int kSweepSchema = 1;

/// Optional perturbation applied to every generated instance. The amount is
/// either absolute or a fraction of the right_w gamma_lambda (scale 1) of the
/// unperturbed instance at the trial's m.
struct PerturbationSpec {
  PerturbKind kind = PerturbKind::varsigma;
  std::optional<double> amount;
  std::optional<double> gamma_lambda_fraction;
};

struct SweepConfig {
  PlantedSpec instance;
  std::optional<PerturbationSpec> perturbation;
  /// Draw a fresh instance per trial index (shared across m values) instead
  /// of reusing instance.seed for every trial.
  bool resample_instance = true;

  std::vector<Index> m_values;
  long trials_per_m = 1;
  Distribution distribution = Distribution::gaussian;
  /// Use R = I (requires every m to equal the sketched dimension).
  bool identity_sketch = false;

  Prescription prescription = Prescription::right_w;
  /// Bypasses the prescription when set.
  std::optional<std::pair<double, double>> fixed_gamma;  // (gamma_w, gamma_lambda)
  double scale_factor = 1.0;
  /// Defaults to the prescription's side.
  std::optional<SketchSide> side;
  double c = kDefaultJlConstant;
  double delta = 0.05;
  bool allow_small_m = false;

  SolverOptions solver;
  bool rho_diagnostics = false;
  bool dual_bound = false;  // right sketch, n <= kMaterializationBudget

  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool record_wall_time = false;
  std::filesystem::path output_dir = "sweep_out";

  SketchSide effective_side() const { return side.value_or(prescription_side(prescription)); }
};

/// Parses and validates a schema-1 JSON config. Throws std::invalid_argument
/// with the offending key on any problem.
SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::filesystem::path& path);
std::string sweep_config_to_json(const SweepConfig& config);

/// Throws std::invalid_argument (or PreconditionError for m below the
/// minimum sketch size without allow_small_m).
void validate(const SweepConfig& config);

struct TrialRecord {
  Index m = 0;
  long trial = 0;
  std::uint64_t seed = 0;
  double gamma_w = 0.0;
  double gamma_lambda = 0.0;
  double err_w_l2 = 0.0;
  double err_w_l1 = 0.0;
  double ratio_w = 0.0;
  double err_l_l2 = 0.0;
  double err_l_l1 = 0.0;
  double ratio_l = 0.0;
  double bound_w = 0.0;  // 3 gamma_w sqrt(s_w) / alpha
  double bound_l = 0.0;  // 3 gamma_lambda sqrt(s_lambda) / beta
  bool pass_w = false;   // all three w-side inequalities
  bool pass_l = false;
  long iterations = 0;
  bool converged = false;
  double wall_time_ms = 0.0;

  // Not part of the CSV.
  Index s_w = 0;
  Index s_lambda = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double residual = 0.0;
  std::optional<double> rho_lambda;
  std::optional<double> rho_w;
  std::optional<bool> gamma_lambda_ok;
  std::optional<bool> gamma_w_ok;
  std::optional<double> dual_bound;
};

/// The three inequalities on one side.
struct SideChecks {
  bool l2 = false;
  bool l1 = false;
  bool ratio = false;
  bool all() const { return l2 && l1 && ratio; }
};

/// err_l2 <= 3 gamma sqrt(s) / modulus, err_l1 <= 12 gamma s / modulus,
/// ratio <= 4 sqrt(s).
SideChecks check_side(double err_l2, double err_l1, double ratio, double gamma, Index s, double modulus);

/// One trial; deterministic in (config, m, trial).
TrialRecord run_trial(const SweepConfig& config, Index m, long trial);

/// All trials, in parallel, sorted by (m, trial).
std::vector<TrialRecord> run_sweep(const SweepConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<Index> m;
  std::vector<double> median;
};

enum class ErrorColumn { w_l2, l_l2 };

/// Least-squares line of log(median error) against log(m). Needs at least
/// three distinct m values with positive medians.
RateFit fit_rate(const std::vector<TrialRecord>& records, ErrorColumn column = ErrorColumn::w_l2);
RateFit fit_rate(const std::vector<Index>& m, const std::vector<double>& median_errors);

double median(std::vector<double> values);

struct BoundSummary {
  long trials = 0;
  double delta = 0.05;
  double required = 0.85;  // 1 - 3 delta
  double w_l2 = 0.0, w_l1 = 0.0, w_ratio = 0.0;  // pass fractions
  double l_l2 = 0.0, l_l1 = 0.0, l_ratio = 0.0;
  bool w_ok() const { return w_l2 >= required && w_l1 >= required && w_ratio >= required; }
  bool l_ok() const { return l_l2 >= required && l_l1 >= required && l_ratio >= required; }
};

/// Pass fractions of every inequality. Uses the s, alpha, beta carried by
/// each record.
BoundSummary check_bounds(const std::vector<TrialRecord>& records, double delta);

/// The fixed CSV header, 18 columns.
const std::vector<std::string>& csv_columns();

std::string records_to_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_csv(const std::string& text);
std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path);

struct ReportFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
  std::filesystem::path dat;
  std::filesystem::path meta;
  std::filesystem::path diagnostics;
};

/// Writes report.csv, report.svg (log-log median error and median bound
/// against m), report.dat (the same series as columns), meta.json (s, alpha,
/// beta, delta and side for `check`) and diagnostics.csv.
ReportFiles emit_report(const std::vector<TrialRecord>& records, const SweepConfig& config,
                        const std::filesystem::path& dir);

/// Median error and median bound per m for the side the sweep targets.
struct ReportSeries {
  std::vector<Index> m;
  std::vector<double> median_error;
  std::vector<double> median_bound;
};
ReportSeries report_series(const std::vector<TrialRecord>& records, SketchSide side);

std::string render_svg(const ReportSeries& series, const std::string& title);

}  // namespace sketchsaddle
