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

// Command-line front end: generate, solve, sweep, check, calibrate-c.
//
// Exit codes: 0 success, 1 usage or input error, 2 bound check failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sketchsaddle/harness.hpp"
#include "sketchsaddle/instances.hpp"
#include "sketchsaddle/io.hpp"
#include "sketchsaddle/regbounds.hpp"
#include "sketchsaddle/serialize.hpp"
#include "sketchsaddle/sketch.hpp"
#include "sketchsaddle/solver.hpp"

namespace ss = sketchsaddle;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

struct GenerateArgs {
  std::string kind = "planted";
  long d = 100, n = 100, s_w = 5, s_lambda = 5;
  double alpha = 1.0, beta = 1.0;
  std::string style = "rows";
  std::string loss = "squared_hinge";
  std::optional<double> gamma_reg;
  double margin_fraction = 0.9;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  if (a.kind == "planted") {
    const auto inst = ss::gen_planted_quadratic({a.d, a.n, a.s_w, a.s_lambda, a.alpha, a.beta,
                                                 ss::parse_matrix_style(a.style), a.seed});
    ss::save_instance(a.out, inst);
  } else if (a.kind == "erm") {
    ss::ErmSpec spec;
    spec.n = a.n;
    spec.d = a.d;
    spec.loss = ss::parse_loss(a.loss);
    spec.gamma_reg = a.gamma_reg;
    spec.margin_fraction = a.margin_fraction;
    spec.seed = a.seed;
    ss::save_instance(a.out, ss::gen_erm(spec));
  } else {
    throw CLI::ValidationError("--kind", "expected planted or erm");
  }
  std::cout << "wrote " << a.out << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string sketch = "none";
  long m = 0;
  std::string distribution = "gaussian";
  std::uint64_t seed = 0;
  std::string prescription;
  std::optional<double> gamma_w, gamma_lambda;
  double scale_factor = 1.0;
  double c = ss::kDefaultJlConstant;
  double delta = 0.05;
  bool allow_small_m = false;
  std::optional<double> tolerance;
  long max_iterations = 200000;
  std::string step_rule = "balanced";
  std::string out;
  std::string solution_dir;
};

int run_solve(const SolveArgs& a) {
  const ss::StoredInstance stored = ss::load_instance(a.instance);
  ss::SolverOptions opts;
  opts.tolerance = a.tolerance;
  opts.max_iterations = a.max_iterations;
  opts.step_rule = a.step_rule == "accelerated" ? ss::StepRule::accelerated : ss::StepRule::balanced;

  nlohmann::json out;
  ss::SolveReport report;
  if (a.sketch == "none") {
    report = ss::solve_exact(*stored.problem, opts);
  } else {
    const ss::SketchSide side = ss::parse_side(a.sketch);
    if (a.m < 1) throw CLI::ValidationError("--m", "a sketched solve needs --m");
    const ss::Index rows = side == ss::SketchSide::right ? stored.problem->n() : stored.problem->d();
    const auto r = ss::make_projection(rows, a.m, ss::parse_distribution(a.distribution), a.seed);
    auto sp = ss::apply_sketch(stored.problem, r, side);
    double gw = a.gamma_w.value_or(0.0);
    double gl = a.gamma_lambda.value_or(0.0);
    if (!a.prescription.empty()) {
      if (!stored.w_star || !stored.lambda_star) {
        throw CLI::ValidationError("--prescription", "needs an instance with a planted solution");
      }
      ss::PrescriptionRequest req;
      req.rule = ss::parse_prescription(a.prescription);
      req.c = a.c;
      req.delta = a.delta;
      req.m = a.m;
      req.d = stored.problem->d();
      req.n = stored.problem->n();
      req.alpha = stored.problem->alpha();
      req.beta = stored.problem->beta();
      req.scale_factor = a.scale_factor;
      req.allow_small_m = a.allow_small_m;
      const auto oracle = ss::OracleQuantities::from_pair(*stored.problem, *stored.w_star, *stored.lambda_star);
      if (req.rule == ss::Prescription::right_lambda) {
        req.zeta = ss::zeta_auto(stored.problem->a().to_dense(), 16 * *oracle.s_w, ss::ZetaSide::transpose);
      } else if (req.rule == ss::Prescription::left_w) {
        req.zeta = ss::zeta_auto(stored.problem->a().to_dense(), 16 * *oracle.s_lambda, ss::ZetaSide::plain);
      }
      const auto pres = ss::prescribe_regularization(req, oracle);
      gw = pres.gamma_w;
      gl = pres.gamma_lambda;
      out["prescription"] = nlohmann::json::parse(ss::to_json(pres));
    }
    report = ss::solve_sketched(sp.with_regularization(gw, gl), opts);
  }
  out["report"] = nlohmann::json::parse(ss::to_json(report));
  if (stored.w_star && stored.lambda_star) {
    const auto ew = ss::sparsity_stats(report.pair.w - *stored.w_star, 0.0);
    const auto el = ss::sparsity_stats(report.pair.lambda - *stored.lambda_star, 0.0);
    out["errors"] = {{"err_w_l2", ew.l2}, {"err_w_l1", ew.l1}, {"ratio_w", ew.ratio_l1_l2},
                     {"err_l_l2", el.l2}, {"err_l_l1", el.l1}, {"ratio_l", el.ratio_l1_l2}};
  }
  const auto sw = ss::sparsity_stats(report.pair.w);
  const auto sl = ss::sparsity_stats(report.pair.lambda);
  out["sparsity"] = {{"w_l0", sw.l0}, {"lambda_l0", sl.l0}};
  const std::string text = out.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.out);
    if (!f) throw ss::IoError("cannot write " + a.out);
    f << text;
  }
  if (!a.solution_dir.empty()) {
    fs::create_directories(a.solution_dir);
    ss::io::write_vector(fs::path(a.solution_dir) / "w.txt", report.pair.w);
    ss::io::write_vector(fs::path(a.solution_dir) / "lambda.txt", report.pair.lambda);
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::optional<unsigned> threads;
};

int run_sweep_command(const SweepArgs& a) {
  ss::SweepConfig config = ss::load_sweep_config(a.config);
  if (!a.out.empty()) config.output_dir = a.out;
  if (a.threads) config.threads = *a.threads;
  const auto records = ss::run_sweep(config);
  const auto files = ss::emit_report(records, config, config.output_dir);
  const auto summary = ss::check_bounds(records, config.delta);
  const bool right = config.effective_side() == ss::SketchSide::right;
  std::cout << "records: " << records.size() << "\n"
            << "csv: " << files.csv.string() << "\n"
            << "svg: " << files.svg.string() << "\n";
  std::printf("pass fractions (%s side): l2 %.3f, l1 %.3f, ratio %.3f (required %.3f)\n", right ? "w" : "lambda",
              right ? summary.w_l2 : summary.l_l2, right ? summary.w_l1 : summary.l_l1,
              right ? summary.w_ratio : summary.l_ratio, summary.required);
  try {
    const auto fit = ss::fit_rate(records, right ? ss::ErrorColumn::w_l2 : ss::ErrorColumn::l_l2);
    std::printf("rate: slope %.4f, R^2 %.4f\n", fit.slope, fit.r_squared);
  } catch (const std::invalid_argument&) {
    // Fewer than three m values: no rate to report.
  }
  return kExitOk;
}

struct CheckArgs {
  std::string csv;
  std::optional<double> delta;
  std::optional<long> s_w, s_lambda;
  std::optional<double> alpha, beta;
  std::string side;
};

int run_check(const CheckArgs& a) {
  auto records = ss::read_records_csv(a.csv);
  nlohmann::json meta;
  const fs::path meta_path = fs::path(a.csv).parent_path() / "meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path);
    in >> meta;
  }
  auto pick = [&](const auto& flag, const char* key, auto fallback_type) -> std::optional<decltype(fallback_type)> {
    if (flag) return static_cast<decltype(fallback_type)>(*flag);
    if (meta.contains(key)) return meta.at(key).get<decltype(fallback_type)>();
    return std::nullopt;
  };
  const auto s_w = pick(a.s_w, "s_w", long{});
  const auto s_l = pick(a.s_lambda, "s_lambda", long{});
  const auto alpha = pick(a.alpha, "alpha", double{});
  const auto beta = pick(a.beta, "beta", double{});
  const double delta = pick(a.delta, "delta", double{}).value_or(0.05);
  std::string side = a.side;
  if (side.empty()) side = meta.value("side", std::string("right"));
  if (!s_w || !s_l || !alpha || !beta) {
    throw CLI::ValidationError("check", "need --s-w, --s-lambda, --alpha, --beta or a meta.json next to the CSV");
  }
  for (auto& r : records) {
    r.s_w = *s_w;
    r.s_lambda = *s_l;
    r.alpha = *alpha;
    r.beta = *beta;
  }
  const auto summary = ss::check_bounds(records, delta);
  std::printf("trials %ld, required pass fraction %.3f\n", summary.trials, summary.required);
  std::printf("w:      l2 %.3f  l1 %.3f  ratio %.3f\n", summary.w_l2, summary.w_l1, summary.w_ratio);
  std::printf("lambda: l2 %.3f  l1 %.3f  ratio %.3f\n", summary.l_l2, summary.l_l1, summary.l_ratio);
  const bool ok = ss::parse_side(side) == ss::SketchSide::right ? summary.w_ok() : summary.l_ok();
  std::printf("%s side: %s\n", side.c_str(), ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitCheckFailed;
}

struct CalibrateArgs {
  std::string distribution = "gaussian";
  long trials = 2000;
  std::vector<long> m_values{100, 200, 400, 800};
  std::vector<double> eps_values{0.1, 0.2, 0.3, 0.4, 0.5};
  long n = 1000;
  std::uint64_t seed = 0x5eed;
  unsigned threads = 0;
};

int run_calibrate(const CalibrateArgs& a) {
  ss::JlGrid grid;
  grid.m_values.assign(a.m_values.begin(), a.m_values.end());
  grid.eps_values = a.eps_values;
  const auto cal = ss::calibrate_c(ss::parse_distribution(a.distribution), a.trials, grid, a.n, a.seed, a.threads);
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : cal.cells) {
    cells.push_back({{"m", cell.m}, {"eps", cell.eps}, {"failure_rate", cell.failure_rate},
                     {"required_c", cell.required_c}});
  }
  nlohmann::json out = {{"distribution", a.distribution}, {"trials", a.trials}, {"c", cal.c}, {"cells", cells}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched l1-regularized saddle-point solver and recovery experiments"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic instance directory");
  generate->add_option("--kind", gen.kind, "planted or erm")->check(CLI::IsMember({"planted", "erm"}));
  generate->add_option("--d", gen.d, "Primal dimension");
  generate->add_option("--n", gen.n, "Dual dimension (examples for erm)");
  generate->add_option("--s-w", gen.s_w, "Nonzeros of w* (planted)");
  generate->add_option("--s-lambda", gen.s_lambda, "Nonzeros of lambda* (planted)");
  generate->add_option("--alpha", gen.alpha, "Modulus of g (planted)");
  generate->add_option("--beta", gen.beta, "Modulus of h (planted)");
  generate->add_option("--style", gen.style, "rows or columns normalization")->check(CLI::IsMember({"rows", "columns"}));
  generate->add_option("--loss", gen.loss, "squared_hinge or logistic (erm)");
  generate->add_option("--gamma-reg", gen.gamma_reg, "Ridge weight (erm; default 1/sqrt(n))");
  generate->add_option("--margin-fraction", gen.margin_fraction, "Fraction of unflipped labels (erm)");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--out", gen.out, "Output directory")->required();

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Solve one instance and print a JSON report");
  solve->add_option("--instance", sol.instance, "Instance directory")->required();
  solve->add_option("--sketch", sol.sketch, "none, right or left")->check(CLI::IsMember({"none", "right", "left"}));
  solve->add_option("--m", sol.m, "Sketch size");
  solve->add_option("--distribution", sol.distribution, "gaussian, rademacher or database_friendly");
  solve->add_option("--seed", sol.seed, "Projection seed");
  solve->add_option("--prescription", sol.prescription, "Regularization rule (planted instances)");
  solve->add_option("--gamma-w", sol.gamma_w, "l1 weight on w");
  solve->add_option("--gamma-lambda", sol.gamma_lambda, "l1 weight on lambda");
  solve->add_option("--scale-factor", sol.scale_factor, "Multiplier on prescribed weights");
  solve->add_option("--c", sol.c, "Norm-preservation tail constant");
  solve->add_option("--delta", sol.delta, "Failure probability");
  solve->add_flag("--allow-small-m", sol.allow_small_m, "Permit m below the minimum sketch size");
  solve->add_option("--tolerance", sol.tolerance, "Residual target");
  solve->add_option("--max-iterations", sol.max_iterations, "Iteration budget");
  solve->add_option("--step-rule", sol.step_rule, "balanced or accelerated")
      ->check(CLI::IsMember({"balanced", "accelerated"}));
  solve->add_option("--out", sol.out, "Write the JSON report here instead of stdout");
  solve->add_option("--solution-dir", sol.solution_dir, "Also write w.txt and lambda.txt");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a seeded sweep over m and write CSV, SVG and DAT reports");
  sweep->add_option("--config", sw.config, "JSON config (schema 1)")->required();
  sweep->add_option("--out", sw.out, "Output directory (overrides the config)");
  sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "Check bound pass fractions in a sweep CSV");
  check->add_option("--csv", chk.csv, "report.csv from a sweep")->required();
  check->add_option("--delta", chk.delta, "Failure probability (required fraction is 1 - 3 delta)");
  check->add_option("--s-w", chk.s_w, "Nonzeros of w*");
  check->add_option("--s-lambda", chk.s_lambda, "Nonzeros of lambda*");
  check->add_option("--alpha", chk.alpha, "Modulus of g");
  check->add_option("--beta", chk.beta, "Modulus of h");
  check->add_option("--side", chk.side, "right (w bounds) or left (lambda bounds)")
      ->check(CLI::IsMember({"right", "left"}));

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate-c", "Estimate the norm-preservation tail constant");
  calibrate->add_option("--distribution", cal.distribution, "gaussian, rademacher or database_friendly");
  calibrate->add_option("--trials", cal.trials, "Projections drawn");
  calibrate->add_option("--m-values", cal.m_values, "Grid of sketch sizes");
  calibrate->add_option("--eps-values", cal.eps_values, "Grid of distortions in (0, 1/2]");
  calibrate->add_option("--n", cal.n, "Length of the test vector");
  calibrate->add_option("--seed", cal.seed, "Random seed");
  calibrate->add_option("--threads", cal.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*solve) return run_solve(sol);
    if (*sweep) return run_sweep_command(sw);
    if (*check) return run_check(chk);
    if (*calibrate) return run_calibrate(cal);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
