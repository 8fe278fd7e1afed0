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

#include "sketchsaddle/solver.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sketchsaddle/prox.hpp"
#include "sketchsaddle/random.hpp"

namespace sketchsaddle {

namespace {

// Power iteration underestimates ||K||; inflate so tau sigma ||K||^2 <= 1 holds
// with margin.
constexpr double kNormSafety = 1.01;

Vector clamp(const Vector& x, const Vector& lower, const Vector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Vector start_point(const std::optional<Vector>& given, Index dim, const Vector& lower, const Vector& upper,
                   const char* what) {
  if (given) {
    require_size(given->size(), dim, what);
    return clamp(*given, lower, upper);
  }
  return clamp(Vector::Zero(dim), lower, upper);
}

void require_prox(const SaddleProblem& problem) {
  if (!problem.g().has_prox() || !problem.h().has_prox()) {
    throw UnsupportedProblem("solver needs prox-able g and h (quadratic, conjugate, or custom with prox)");
  }
}

}  // namespace

double operator_norm(const BilinearOperator& op, long max_iterations, double rel_tol, std::uint64_t seed) {
  const Index n = op.cols();
  if (n == 0 || op.rows() == 0) return 0.0;
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();
  double estimate = 0.0;
  for (long it = 0; it < max_iterations; ++it) {
    const Vector u = op.apply(v);
    const double next = u.norm();
    Vector back = op.apply_adjoint(u);
    const double back_norm = back.norm();
    if (back_norm == 0.0) return next;
    v = back / back_norm;
    if (std::abs(next - estimate) <= rel_tol * next) return next;
    estimate = next;
  }
  return estimate;
}

double saddle_objective(const SaddleProblem& problem, const BilinearOperator& coupling, double gamma_w,
                        double gamma_lambda, const Vector& w, const Vector& lambda) {
  return problem.g().value(w) + gamma_w * w.lpNorm<1>() - problem.h().value(lambda) -
         gamma_lambda * lambda.lpNorm<1>() - w.dot(coupling.apply(lambda));
}

SolveReport solve_primal_dual(const SaddleProblem& problem, const BilinearOperator& coupling, double gamma_w,
                              double gamma_lambda, const SolverOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  require_prox(problem);
  require_size(coupling.rows(), problem.d(), "solve_primal_dual: coupling rows");
  require_size(coupling.cols(), problem.n(), "solve_primal_dual: coupling cols");
  if (!(gamma_w >= 0.0) || !(gamma_lambda >= 0.0)) {
    throw std::invalid_argument("solve_primal_dual: regularization parameters must be nonnegative");
  }
  if (opts.check_every < 1) throw std::invalid_argument("solve_primal_dual: check_every must be positive");
  const double tolerance = opts.tolerance.value_or(kSketchedTolerance);

  const ConvexFn& g = problem.g();
  const ConvexFn& h = problem.h();
  const auto [w_lo, w_hi] = problem.bounds_w();
  const auto [l_lo, l_hi] = problem.bounds_lambda();
  const double alpha = problem.alpha();
  const double beta = problem.beta();

  SolveReport report;
  report.operator_norm_estimate = operator_norm(coupling);
  const double big_l = report.operator_norm_estimate * kNormSafety;

  double tau = 0.0, sigma = 0.0, theta = 1.0;
  switch (opts.step_rule) {
    case StepRule::fixed:
      if (!(opts.tau > 0.0) || !(opts.sigma > 0.0)) throw std::invalid_argument("fixed step rule needs tau, sigma > 0");
      tau = opts.tau;
      sigma = opts.sigma;
      break;
    case StepRule::balanced:
      if (big_l > 0.0) {
        tau = std::sqrt(beta / alpha) / big_l;
        sigma = std::sqrt(alpha / beta) / big_l;
      } else {
        tau = 1.0 / alpha;
        sigma = 1.0 / beta;
      }
      break;
    case StepRule::accelerated:
      if (big_l > 0.0) {
        const double mu = 2.0 * std::sqrt(alpha * beta) / big_l;
        tau = mu / (2.0 * alpha);
        sigma = mu / (2.0 * beta);
        theta = 1.0 / (1.0 + mu);
      } else {
        tau = 1.0 / alpha;
        sigma = 1.0 / beta;
      }
      break;
  }

  Vector w = start_point(opts.w0, problem.d(), w_lo, w_hi, "solve_primal_dual: w0");
  Vector lambda = start_point(opts.lambda0, problem.n(), l_lo, l_hi, "solve_primal_dual: lambda0");

  auto residuals = [&](const Vector& wv, const Vector& lv) {
    const Vector qw = g.gradient(wv) - coupling.apply(lv);
    const Vector ql = h.gradient(lv) + coupling.apply_adjoint(wv);
    return KktResidual{stationarity_residual(qw, wv, gamma_w, w_lo, w_hi),
                       stationarity_residual(ql, lv, gamma_lambda, l_lo, l_hi)};
  };

  Vector best_w = w;
  Vector best_lambda = lambda;
  KktResidual best = residuals(w, lambda);
  long best_iteration = 0;
  report.residual_history.push_back(best.max());
  bool converged = best.max() <= tolerance;

  long iteration = 0;
  Vector k_lambda = coupling.apply(lambda);
  while (!converged && iteration < opts.max_iterations) {
    const Vector w_next = clamp(g.prox(w + tau * k_lambda, tau, gamma_w), w_lo, w_hi);
    const Vector w_bar = w_next + theta * (w_next - w);
    lambda = clamp(h.prox(lambda - sigma * coupling.apply_adjoint(w_bar), sigma, gamma_lambda), l_lo, l_hi);
    w = w_next;
    k_lambda = coupling.apply(lambda);
    ++iteration;

    if (iteration % opts.check_every == 0 || iteration == opts.max_iterations) {
      const KktResidual r = residuals(w, lambda);
      report.residual_history.push_back(r.max());
      if (r.max() < best.max() || std::isnan(best.max())) {
        best = r;
        best_w = w;
        best_lambda = lambda;
        best_iteration = iteration;
      }
      converged = best.max() <= tolerance;
    }
  }

  report.converged = converged;
  report.final_residuals = best;
  report.pair = make_solution_pair(problem, std::move(best_w), std::move(best_lambda), best_iteration);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

SolveReport solve_exact(const SaddleProblem& problem, const SolverOptions& opts) {
  SolverOptions resolved = opts;
  if (!resolved.tolerance) resolved.tolerance = kExactTolerance;
  const CouplingOperator coupling(problem.a_ptr());
  return solve_primal_dual(problem, coupling, 0.0, 0.0, resolved);
}

SolveReport solve_sketched(const SketchedProblem& sp, const SolverOptions& opts) {
  SolverOptions resolved = opts;
  if (!resolved.tolerance) resolved.tolerance = kSketchedTolerance;
  const auto coupling = sp.coupling();
  return solve_primal_dual(sp.base(), *coupling, sp.gamma_w(), sp.gamma_lambda(), resolved);
}

SolutionPair solve_exact_quadratic(const SaddleProblem& problem) {
  if (!problem.is_quadratic_unconstrained()) {
    throw UnsupportedProblem("solve_exact_quadratic needs quadratic g, h on all of space");
  }
  const double alpha = problem.alpha();
  const double beta = problem.beta();
  const Vector& a = problem.g().center();
  const Vector& b = problem.h().center();
  const Matrix dense = problem.a().to_dense();
  Matrix system = dense.transpose() * dense / alpha;
  system.diagonal().array() += beta;
  const Vector rhs = beta * b - dense.transpose() * a;
  Vector lambda = system.llt().solve(rhs);
  Vector w = a + dense * lambda / alpha;
  return make_solution_pair(problem, std::move(w), std::move(lambda));
}

Vector minimize_linear_tilt(const ConvexFn& f, const Vector& c, double l1, const Vector& lower,
                            const Vector& upper) {
  require_size(c.size(), f.dimension(), "minimize_linear_tilt");
  if (!f.has_prox()) throw UnsupportedProblem("minimize_linear_tilt needs a prox-able function");
  // Proximal point on F(x) = f(x) + c^T x + l1|x|: x+ = prox_{tF}(x) =
  // prox_{t(f + l1|.|)}(x - t c), contracting by 1/(1 + t modulus) per step.
  if (f.kind() == ConvexKind::quadratic && f.modulus() > 0.0) {
    // Closed form: shift the centre by -c/modulus, then soft-threshold.
    const Vector shifted = f.center() - c / f.modulus();
    return clamp(prox_soft_threshold(shifted, l1 / f.modulus()), lower, upper);
  }
  const double t = 100.0 / std::max(f.modulus(), 1e-12);
  Vector x = clamp(Vector::Zero(c.size()), lower, upper);
  for (int it = 0; it < 1000; ++it) {
    Vector next = clamp(f.prox(x - t * c, t, l1), lower, upper);
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    if (change <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
  }
  return x;
}

}  // namespace sketchsaddle
