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

#include "sketchsaddle/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sketchsaddle/io.hpp"
#include "sketchsaddle/parallel.hpp"

namespace sketchsaddle {

namespace {

using nlohmann::json;

constexpr std::uint64_t kProjectionStream = 1;
constexpr std::uint64_t kPerturbStream = 2;

std::string step_rule_name(StepRule r) {
  switch (r) {
    case StepRule::balanced:
      return "balanced";
    case StepRule::fixed:
      return "fixed";
    case StepRule::accelerated:
      return "accelerated";
  }
  return "balanced";
}

StepRule parse_step_rule(const std::string& s) {
  if (s == "balanced" || s == "auto") return StepRule::balanced;
  if (s == "fixed") return StepRule::fixed;
  if (s == "accelerated") return StepRule::accelerated;
  throw std::invalid_argument("solver.step_rule: unknown rule " + s);
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw std::invalid_argument(where + ": unknown key \"" + key + "\"");
    }
  }
}

std::uint64_t instance_seed(const SweepConfig& config, long trial) {
  return config.resample_instance ? derive_seed(config.instance.seed, static_cast<std::uint64_t>(trial))
                                  : config.instance.seed;
}

std::string format_bool(bool b) { return b ? "1" : "0"; }

double parse_real(const std::string& s, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw IoError(std::string("CSV: bad value '") + s + "' in column " + column);
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, const char* column) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(std::string("CSV: bad integer '") + s + "' in column " + column);
  }
  return v;
}

}  // namespace

// --- config -------------------------------------------------------------------

SweepConfig parse_sweep_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  SweepConfig c;
  try {
    if (!j.contains("schema") || j.at("schema").get<int>() != kSweepSchema) {
      throw std::invalid_argument("config: \"schema\" must be 1");
    }
    reject_unknown(j,
                   {"schema", "instance", "resample_instance", "m_values", "trials_per_m", "distribution",
                    "identity_sketch", "prescription", "fixed_gamma", "scale_factor", "side", "c", "delta",
                    "allow_small_m", "solver", "diagnostics", "seed", "threads", "record_wall_time", "output_dir"},
                   "config");
    const json& inst = j.at("instance");
    reject_unknown(inst,
                   {"generator", "d", "n", "s_w", "s_lambda", "alpha", "beta", "matrix_style", "seed", "perturbation"},
                   "instance");
    if (inst.value("generator", std::string("planted_quadratic")) != "planted_quadratic") {
      throw std::invalid_argument("instance.generator: only planted_quadratic is supported in sweeps");
    }
    c.instance.d = inst.at("d").get<Index>();
    c.instance.n = inst.at("n").get<Index>();
    c.instance.s_w = inst.at("s_w").get<Index>();
    c.instance.s_lambda = inst.at("s_lambda").get<Index>();
    c.instance.alpha = inst.value("alpha", 1.0);
    c.instance.beta = inst.value("beta", 1.0);
    c.instance.style = parse_matrix_style(inst.value("matrix_style", std::string("rows")));
    c.instance.seed = inst.value("seed", std::uint64_t{0});
    if (inst.contains("perturbation")) {
      const json& pj = inst.at("perturbation");
      reject_unknown(pj, {"kind", "amount", "gamma_lambda_fraction"}, "instance.perturbation");
      PerturbationSpec ps;
      const std::string kind = pj.at("kind").get<std::string>();
      if (kind == "varsigma") {
        ps.kind = PerturbKind::varsigma;
      } else if (kind == "tau") {
        ps.kind = PerturbKind::tau;
      } else {
        throw std::invalid_argument("instance.perturbation.kind: expected varsigma or tau");
      }
      if (pj.contains("amount")) ps.amount = pj.at("amount").get<double>();
      if (pj.contains("gamma_lambda_fraction")) ps.gamma_lambda_fraction = pj.at("gamma_lambda_fraction").get<double>();
      c.perturbation = ps;
    }
    c.resample_instance = j.value("resample_instance", true);
    c.m_values = j.at("m_values").get<std::vector<Index>>();
    c.trials_per_m = j.value("trials_per_m", 1L);
    c.distribution = parse_distribution(j.value("distribution", std::string("gaussian")));
    c.identity_sketch = j.value("identity_sketch", false);
    c.prescription = parse_prescription(j.value("prescription", std::string("right_w")));
    if (j.contains("fixed_gamma")) {
      const json& fg = j.at("fixed_gamma");
      reject_unknown(fg, {"w", "lambda"}, "fixed_gamma");
      c.fixed_gamma = std::make_pair(fg.at("w").get<double>(), fg.at("lambda").get<double>());
    }
    c.scale_factor = j.value("scale_factor", 1.0);
    if (j.contains("side")) c.side = parse_side(j.at("side").get<std::string>());
    c.c = j.value("c", kDefaultJlConstant);
    c.delta = j.value("delta", 0.05);
    c.allow_small_m = j.value("allow_small_m", false);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      reject_unknown(s, {"max_iterations", "tolerance", "check_every", "step_rule", "tau", "sigma"}, "solver");
      c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
      if (s.contains("tolerance")) c.solver.tolerance = s.at("tolerance").get<double>();
      c.solver.check_every = s.value("check_every", c.solver.check_every);
      c.solver.step_rule = parse_step_rule(s.value("step_rule", std::string("balanced")));
      c.solver.tau = s.value("tau", 0.0);
      c.solver.sigma = s.value("sigma", 0.0);
    }
    if (j.contains("diagnostics")) {
      const json& dj = j.at("diagnostics");
      reject_unknown(dj, {"rho", "dual_bound"}, "diagnostics");
      c.rho_diagnostics = dj.value("rho", false);
      c.dual_bound = dj.value("dual_bound", false);
    }
    c.seed = j.value("seed", std::uint64_t{0});
    c.threads = j.value("threads", 0u);
    c.record_wall_time = j.value("record_wall_time", false);
    c.output_dir = j.value("output_dir", std::string("sweep_out"));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_config(buffer.str());
}

std::string sweep_config_to_json(const SweepConfig& c) {
  json inst = {{"generator", "planted_quadratic"},
               {"d", c.instance.d},
               {"n", c.instance.n},
               {"s_w", c.instance.s_w},
               {"s_lambda", c.instance.s_lambda},
               {"alpha", c.instance.alpha},
               {"beta", c.instance.beta},
               {"matrix_style", std::string(to_string(c.instance.style))},
               {"seed", c.instance.seed}};
  if (c.perturbation) {
    json pj = {{"kind", c.perturbation->kind == PerturbKind::varsigma ? "varsigma" : "tau"}};
    if (c.perturbation->amount) pj["amount"] = *c.perturbation->amount;
    if (c.perturbation->gamma_lambda_fraction) pj["gamma_lambda_fraction"] = *c.perturbation->gamma_lambda_fraction;
    inst["perturbation"] = pj;
  }
  json solver = {{"max_iterations", c.solver.max_iterations},
                 {"check_every", c.solver.check_every},
                 {"step_rule", step_rule_name(c.solver.step_rule)}};
  if (c.solver.tolerance) solver["tolerance"] = *c.solver.tolerance;
  if (c.solver.step_rule == StepRule::fixed) {
    solver["tau"] = c.solver.tau;
    solver["sigma"] = c.solver.sigma;
  }
  json j = {{"schema", kSweepSchema},
            {"instance", inst},
            {"resample_instance", c.resample_instance},
            {"m_values", c.m_values},
            {"trials_per_m", c.trials_per_m},
            {"distribution", std::string(to_string(c.distribution))},
            {"identity_sketch", c.identity_sketch},
            {"prescription", std::string(to_string(c.prescription))},
            {"scale_factor", c.scale_factor},
            {"side", std::string(to_string(c.effective_side()))},
            {"c", c.c},
            {"delta", c.delta},
            {"allow_small_m", c.allow_small_m},
            {"solver", solver},
            {"diagnostics", {{"rho", c.rho_diagnostics}, {"dual_bound", c.dual_bound}}},
            {"seed", c.seed},
            {"threads", c.threads},
            {"record_wall_time", c.record_wall_time},
            {"output_dir", c.output_dir.string()}};
  if (c.fixed_gamma) j["fixed_gamma"] = {{"w", c.fixed_gamma->first}, {"lambda", c.fixed_gamma->second}};
  return j.dump(2);
}

void validate(const SweepConfig& c) {
  if (c.instance.d < 1 || c.instance.n < 1) throw std::invalid_argument("instance: d and n must be positive");
  if (c.instance.s_w < 0 || c.instance.s_w > c.instance.d) throw std::invalid_argument("instance.s_w out of range");
  if (c.instance.s_lambda < 0 || c.instance.s_lambda > c.instance.n) {
    throw std::invalid_argument("instance.s_lambda out of range");
  }
  if (!(c.instance.alpha > 0.0) || !(c.instance.beta > 0.0)) {
    throw std::invalid_argument("instance: alpha and beta must be positive");
  }
  if (c.m_values.empty()) throw std::invalid_argument("m_values: must be nonempty");
  if (c.trials_per_m < 1) throw std::invalid_argument("trials_per_m: must be positive");
  if (!(c.scale_factor > 0.0)) throw std::invalid_argument("scale_factor: must be positive");
  if (c.fixed_gamma && (!(c.fixed_gamma->first >= 0.0) || !(c.fixed_gamma->second >= 0.0))) {
    throw std::invalid_argument("fixed_gamma: values must be nonnegative");
  }
  if (c.perturbation) {
    const auto& p = *c.perturbation;
    if (p.amount.has_value() == p.gamma_lambda_fraction.has_value()) {
      throw std::invalid_argument("instance.perturbation: give exactly one of amount, gamma_lambda_fraction");
    }
    if (p.amount && !(*p.amount >= 0.0)) throw std::invalid_argument("instance.perturbation.amount: negative");
    if (p.gamma_lambda_fraction && !(*p.gamma_lambda_fraction >= 0.0)) {
      throw std::invalid_argument("instance.perturbation.gamma_lambda_fraction: negative");
    }
  }
  const Index sketched_dim = c.effective_side() == SketchSide::right ? c.instance.n : c.instance.d;
  const Index m_min = minimum_sketch_size(c.c, c.delta);
  for (Index m : c.m_values) {
    if (m < 1) throw std::invalid_argument("m_values: entries must be positive");
    if (c.identity_sketch && m != sketched_dim) {
      throw std::invalid_argument("identity_sketch: every m must equal the sketched dimension");
    }
    if (!c.identity_sketch && !c.allow_small_m && m < m_min) {
      throw PreconditionError("m_values: m = " + std::to_string(m) + " is below the minimum sketch size " +
                              std::to_string(m_min) + "; set allow_small_m to override");
    }
  }
  if (c.dual_bound && c.effective_side() != SketchSide::right) {
    throw std::invalid_argument("diagnostics.dual_bound: needs the right sketch");
  }
}

// --- trials --------------------------------------------------------------------

SideChecks check_side(double err_l2, double err_l1, double ratio, double gamma, Index s, double modulus) {
  const double sd = static_cast<double>(s);
  SideChecks out;
  out.l2 = err_l2 <= 3.0 * gamma * std::sqrt(sd) / modulus;
  out.l1 = err_l1 <= 12.0 * gamma * sd / modulus;
  out.ratio = ratio <= 4.0 * std::sqrt(sd);
  return out;
}

TrialRecord run_trial(const SweepConfig& config, Index m, long trial) {
  TrialRecord rec;
  rec.m = m;
  rec.trial = trial;
  rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial));
  const SketchSide side = config.effective_side();

  PlantedSpec spec = config.instance;
  spec.seed = instance_seed(config, trial);
  PlantedInstance inst = gen_planted_quadratic(spec);

  auto base_request = [&](Prescription rule, const SaddleProblem& p) {
    PrescriptionRequest req;
    req.rule = rule;
    req.c = config.c;
    req.delta = config.delta;
    req.m = m;
    req.d = p.d();
    req.n = p.n();
    req.alpha = p.alpha();
    req.beta = p.beta();
    req.allow_small_m = true;  // checked once in validate()
    return req;
  };

  std::optional<PerturbCertificate> certificate;
  if (config.perturbation) {
    double amount = config.perturbation->amount.value_or(0.0);
    if (config.perturbation->gamma_lambda_fraction) {
      const auto oracle = OracleQuantities::from_pair(*inst.problem, inst.w_star, inst.lambda_star);
      const auto reference = prescribe_regularization(base_request(Prescription::right_w, *inst.problem), oracle);
      amount = *config.perturbation->gamma_lambda_fraction * reference.gamma_lambda;
    }
    PerturbedInstance perturbed =
        perturb_to_approx_sparse(inst, config.perturbation->kind, amount, derive_seed(spec.seed, kPerturbStream));
    certificate = perturbed.certificate;
    inst = std::move(perturbed.instance);
  }
  const SaddleProblem& problem = *inst.problem;

  rec.s_w = static_cast<Index>(inst.support_w.size());
  rec.s_lambda = static_cast<Index>(inst.support_lambda.size());
  rec.alpha = problem.alpha();
  rec.beta = problem.beta();

  if (config.fixed_gamma) {
    rec.gamma_w = config.fixed_gamma->first;
    rec.gamma_lambda = config.fixed_gamma->second;
  } else {
    PrescriptionRequest req = base_request(config.prescription, problem);
    req.scale_factor = config.scale_factor;
    if (certificate) {
      if (certificate->kind == PerturbKind::varsigma) req.varsigma = certificate->achieved;
      if (certificate->kind == PerturbKind::tau) {
        req.tau = certificate->achieved;
        req.mu = certificate->mu;
      }
    }
    if (config.prescription == Prescription::right_lambda) {
      req.zeta = zeta_auto(problem.a().to_dense(), 16 * rec.s_w, ZetaSide::transpose);
    } else if (config.prescription == Prescription::left_w) {
      req.zeta = zeta_auto(problem.a().to_dense(), 16 * rec.s_lambda, ZetaSide::plain);
    }
    const auto oracle = OracleQuantities::from_pair(problem, inst.w_star, inst.lambda_star);
    const RegPrescription pres = prescribe_regularization(req, oracle);
    rec.gamma_w = pres.gamma_w;
    rec.gamma_lambda = pres.gamma_lambda;
  }

  const Index rows = side == SketchSide::right ? problem.n() : problem.d();
  const ProjectionMatrix r =
      config.identity_sketch
          ? ProjectionMatrix::from_entries(Matrix::Identity(rows, rows))
          : make_projection(rows, m, config.distribution, derive_seed(rec.seed, kProjectionStream));
  const SketchedProblem sp =
      apply_sketch(inst.problem, r, side).with_regularization(rec.gamma_w, rec.gamma_lambda);
  const SolveReport report = solve_sketched(sp, config.solver);

  const Vector ew = report.pair.w - inst.w_star;
  const Vector el = report.pair.lambda - inst.lambda_star;
  const SparsityStats sw = sparsity_stats(ew, 0.0);
  const SparsityStats sl = sparsity_stats(el, 0.0);
  rec.err_w_l2 = sw.l2;
  rec.err_w_l1 = sw.l1;
  rec.ratio_w = sw.ratio_l1_l2;
  rec.err_l_l2 = sl.l2;
  rec.err_l_l1 = sl.l1;
  rec.ratio_l = sl.ratio_l1_l2;
  rec.bound_w = 3.0 * rec.gamma_w * std::sqrt(static_cast<double>(rec.s_w)) / rec.alpha;
  rec.bound_l = 3.0 * rec.gamma_lambda * std::sqrt(static_cast<double>(rec.s_lambda)) / rec.beta;
  rec.pass_w = check_side(rec.err_w_l2, rec.err_w_l1, rec.ratio_w, rec.gamma_w, rec.s_w, rec.alpha).all();
  rec.pass_l = check_side(rec.err_l_l2, rec.err_l_l1, rec.ratio_l, rec.gamma_lambda, rec.s_lambda, rec.beta).all();
  rec.iterations = report.pair.iterations;
  rec.converged = report.converged;
  rec.residual = report.final_residuals.max();
  rec.wall_time_ms = config.record_wall_time ? report.wall_time_ms : 0.0;

  if (config.rho_diagnostics) {
    const RhoDiagnostics rho = rho_diagnostics(sp, inst.w_star, inst.lambda_star);
    rec.rho_lambda = rho.rho_lambda;
    rec.rho_w = rho.rho_w;
    rec.gamma_lambda_ok = rho.gamma_lambda_ok;
    rec.gamma_w_ok = rho.gamma_w_ok;
  }
  if (config.dual_bound) {
    rec.dual_bound = dual_error_bound(sp, report.pair.w, inst.w_star, rec.s_lambda);
  }
  return rec;
}

std::vector<TrialRecord> run_sweep(const SweepConfig& config) {
  validate(config);
  std::vector<Index> ms = config.m_values;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  const std::size_t per_m = static_cast<std::size_t>(config.trials_per_m);
  std::vector<TrialRecord> records(ms.size() * per_m);
  parallel_for(records.size(), config.threads, [&](std::size_t k) {
    records[k] = run_trial(config, ms[k / per_m], static_cast<long>(k % per_m));
  });
  return records;
}

// --- statistics ------------------------------------------------------------------

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 == 1 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

RateFit fit_rate(const std::vector<Index>& m, const std::vector<double>& medians) {
  if (m.size() != medians.size()) throw std::invalid_argument("fit_rate: m and medians differ in length");
  RateFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 0 && medians[i] > 0.0) {
      fit.m.push_back(m[i]);
      fit.median.push_back(medians[i]);
      x.push_back(std::log(static_cast<double>(m[i])));
      y.push_back(std::log(medians[i]));
    }
  }
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw std::invalid_argument("fit_rate: needs at least 3 distinct m values with positive median error");
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  // A perfectly flat series is fitted exactly.
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

RateFit fit_rate(const std::vector<TrialRecord>& records, ErrorColumn column) {
  const ReportSeries s = report_series(records, column == ErrorColumn::w_l2 ? SketchSide::right : SketchSide::left);
  return fit_rate(s.m, s.median_error);
}

BoundSummary check_bounds(const std::vector<TrialRecord>& records, double delta) {
  BoundSummary out;
  out.delta = delta;
  out.required = 1.0 - 3.0 * delta;
  out.trials = static_cast<long>(records.size());
  if (records.empty()) return out;
  long wl2 = 0, wl1 = 0, wr = 0, ll2 = 0, ll1 = 0, lr = 0;
  for (const auto& r : records) {
    const SideChecks w = check_side(r.err_w_l2, r.err_w_l1, r.ratio_w, r.gamma_w, r.s_w, r.alpha);
    const SideChecks l = check_side(r.err_l_l2, r.err_l_l1, r.ratio_l, r.gamma_lambda, r.s_lambda, r.beta);
    wl2 += w.l2;
    wl1 += w.l1;
    wr += w.ratio;
    ll2 += l.l2;
    ll1 += l.l1;
    lr += l.ratio;
  }
  const double k = static_cast<double>(records.size());
  out.w_l2 = wl2 / k;
  out.w_l1 = wl1 / k;
  out.w_ratio = wr / k;
  out.l_l2 = ll2 / k;
  out.l_l1 = ll1 / k;
  out.l_ratio = lr / k;
  return out;
}

// --- CSV --------------------------------------------------------------------------

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "m",        "trial",    "seed",    "gamma_w", "gamma_lambda", "err_w_l2",   "err_w_l1",  "ratio_w",
      "err_l_l2", "err_l_l1", "ratio_l", "bound_w", "bound_l",      "pass_w",     "pass_l",    "iterations",
      "converged", "wall_time_ms"};
  return columns;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += cols[i];
    out += i + 1 < cols.size() ? ',' : '\n';
  }
  for (const auto& r : records) {
    const std::string fields[] = {std::to_string(r.m),
                                  std::to_string(r.trial),
                                  std::to_string(r.seed),
                                  io::format_double(r.gamma_w),
                                  io::format_double(r.gamma_lambda),
                                  io::format_double(r.err_w_l2),
                                  io::format_double(r.err_w_l1),
                                  io::format_double(r.ratio_w),
                                  io::format_double(r.err_l_l2),
                                  io::format_double(r.err_l_l1),
                                  io::format_double(r.ratio_l),
                                  io::format_double(r.bound_w),
                                  io::format_double(r.bound_l),
                                  format_bool(r.pass_w),
                                  format_bool(r.pass_l),
                                  std::to_string(r.iterations),
                                  format_bool(r.converged),
                                  io::format_double(r.wall_time_ms)};
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      out += fields[i];
      out += i + 1 < std::size(fields) ? ',' : '\n';
    }
  }
  return out;
}

std::vector<TrialRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header != csv_columns()) throw IoError("CSV: header does not match the 18-column report schema");
  std::vector<TrialRecord> records;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != csv_columns().size()) {
      throw IoError("CSV: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) + " fields");
    }
    TrialRecord r;
    r.m = parse_int<Index>(f[0], "m");
    r.trial = parse_int<long>(f[1], "trial");
    r.seed = parse_int<std::uint64_t>(f[2], "seed");
    r.gamma_w = parse_real(f[3], "gamma_w");
    r.gamma_lambda = parse_real(f[4], "gamma_lambda");
    r.err_w_l2 = parse_real(f[5], "err_w_l2");
    r.err_w_l1 = parse_real(f[6], "err_w_l1");
    r.ratio_w = parse_real(f[7], "ratio_w");
    r.err_l_l2 = parse_real(f[8], "err_l_l2");
    r.err_l_l1 = parse_real(f[9], "err_l_l1");
    r.ratio_l = parse_real(f[10], "ratio_l");
    r.bound_w = parse_real(f[11], "bound_w");
    r.bound_l = parse_real(f[12], "bound_l");
    r.pass_w = parse_int<int>(f[13], "pass_w") != 0;
    r.pass_l = parse_int<int>(f[14], "pass_l") != 0;
    r.iterations = parse_int<long>(f[15], "iterations");
    r.converged = parse_int<int>(f[16], "converged") != 0;
    r.wall_time_ms = parse_real(f[17], "wall_time_ms");
    records.push_back(r);
  }
  return records;
}

std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return records_from_csv(buffer.str());
}

// --- report ---------------------------------------------------------------------

ReportSeries report_series(const std::vector<TrialRecord>& records, SketchSide side) {
  ReportSeries s;
  std::vector<TrialRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    std::vector<double> errs, bounds;
    while (j < sorted.size() && sorted[j].m == sorted[i].m) {
      errs.push_back(side == SketchSide::right ? sorted[j].err_w_l2 : sorted[j].err_l_l2);
      bounds.push_back(side == SketchSide::right ? sorted[j].bound_w : sorted[j].bound_l);
      ++j;
    }
    s.m.push_back(sorted[i].m);
    s.median_error.push_back(median(errs));
    s.median_bound.push_back(median(bounds));
    i = j;
  }
  return s;
}

std::string render_svg(const ReportSeries& s, const std::string& title) {
  constexpr double kWidth = 640, kHeight = 420, kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto grow_y = [&](double v) {
    if (v > 0.0 && std::isfinite(v)) {
      ymin = std::min(ymin, std::log10(v));
      ymax = std::max(ymax, std::log10(v));
    }
  };
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    const double lx = std::log10(static_cast<double>(s.m[i]));
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    grow_y(s.median_error[i]);
    grow_y(s.median_bound[i]);
  }
  if (xmin > xmax) xmin = 0, xmax = 1;
  if (ymin > ymax) ymin = -1, ymax = 0;
  if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax - ymin < 1.0) ymax = ymin + 1.0;
  auto px = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * plot_h; };

  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = ymin; e <= ymax + 1e-9; e += 1.0) {
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << py(e) << "\" y2=\"" << py(e)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << static_cast<int>(e)
      << "</text>\n";
  }
  for (Index m : s.m) {
    const double x = px(std::log10(static_cast<double>(m)));
    o << "<line x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << kTop + plot_h << "\" y2=\"" << kTop + plot_h + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 20 << "\" text-anchor=\"middle\">" << m << "</text>\n";
  }
  o << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">m</text>\n";

  auto polyline = [&](const std::vector<double>& ys, const char* color, const char* dash) {
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << " points=\"";
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      if (!(ys[i] > 0.0) || !std::isfinite(ys[i])) continue;
      o << px(std::log10(static_cast<double>(s.m[i]))) << ',' << py(std::log10(ys[i])) << ' ';
    }
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      if (!(ys[i] > 0.0) || !std::isfinite(ys[i])) continue;
      o << "<circle cx=\"" << px(std::log10(static_cast<double>(s.m[i]))) << "\" cy=\"" << py(std::log10(ys[i]))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  };
  polyline(s.median_error, "#1f77b4", "");
  polyline(s.median_bound, "#d62728", " stroke-dasharray=\"6,4\"");

  const double lx = kLeft + plot_w + 15;
  o << "<line x1=\"" << lx << "\" x2=\"" << lx + 25 << "\" y1=\"" << kTop + 10 << "\" y2=\"" << kTop + 10
    << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  o << "<text x=\"" << lx + 30 << "\" y=\"" << kTop + 14 << "\">median error</text>\n";
  o << "<line x1=\"" << lx << "\" x2=\"" << lx + 25 << "\" y1=\"" << kTop + 30 << "\" y2=\"" << kTop + 30
    << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
  o << "<text x=\"" << lx + 30 << "\" y=\"" << kTop + 34 << "\">median bound</text>\n";
  o << "</svg>\n";
  return o.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string optional_cell(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }
std::string optional_cell(const std::optional<bool>& v) { return v ? format_bool(*v) : std::string(); }

}  // namespace

ReportFiles emit_report(const std::vector<TrialRecord>& records, const SweepConfig& config,
                        const std::filesystem::path& dir) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  ReportFiles files{dir / "report.csv", dir / "report.svg", dir / "report.dat", dir / "meta.json",
                    dir / "diagnostics.csv"};
  write_text(files.csv, records_to_csv(records));

  const SketchSide side = config.effective_side();
  const ReportSeries series = report_series(records, side);
  const std::string label = side == SketchSide::right ? "||w_hat - w*||_2" : "||lambda_hat - lambda*||_2";
  write_text(files.svg, render_svg(series, label + " vs m (" + std::string(to_string(config.prescription)) + ")"));

  std::string dat = "# m median_error median_bound\n";
  for (std::size_t i = 0; i < series.m.size(); ++i) {
    dat += std::to_string(series.m[i]) + ' ' + io::format_double(series.median_error[i]) + ' ' +
           io::format_double(series.median_bound[i]) + '\n';
  }
  write_text(files.dat, dat);

  std::string diag = "m,trial,residual,rho_lambda,rho_w,gamma_lambda_ok,gamma_w_ok,dual_bound\n";
  for (const auto& r : records) {
    diag += std::to_string(r.m) + ',' + std::to_string(r.trial) + ',' + io::format_double(r.residual) + ',' +
            optional_cell(r.rho_lambda) + ',' + optional_cell(r.rho_w) + ',' + optional_cell(r.gamma_lambda_ok) +
            ',' + optional_cell(r.gamma_w_ok) + ',' + optional_cell(r.dual_bound) + '\n';
  }
  write_text(files.diagnostics, diag);

  nlohmann::json meta = {{"s_w", records.front().s_w},
                         {"s_lambda", records.front().s_lambda},
                         {"alpha", records.front().alpha},
                         {"beta", records.front().beta},
                         {"delta", config.delta},
                         {"side", std::string(to_string(side))},
                         {"config", nlohmann::json::parse(sweep_config_to_json(config))}};
  write_text(files.meta, meta.dump(2) + "\n");
  return files;
}

}  // namespace sketchsaddle
