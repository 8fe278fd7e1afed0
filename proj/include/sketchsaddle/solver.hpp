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
#include <optional>
#include <vector>

#include "sketchsaddle/model.hpp"
#include "sketchsaddle/operator.hpp"
#include "sketchsaddle/sketch.hpp"

namespace sketchsaddle {

/// Step-size policy of the primal-dual iteration.
///  - balanced:    tau = sqrt(beta/alpha)/L, sigma = sqrt(alpha/beta)/L, theta = 1
///  - fixed:       user tau, sigma, theta = 1
///  - accelerated: mu = 2 sqrt(alpha beta)/L, tau = mu/(2 alpha),
///                 sigma = mu/(2 beta), theta = 1/(1 + mu)
/// In every case tau sigma L^2 <= 1, with L the estimated operator norm.
enum class StepRule { balanced, fixed, accelerated };

struct SolverOptions {
  long max_iterations = 200000;
  /// Target on max(res_w, res_lambda); defaults to 1e-8 for the exact problem
  /// and 1e-6 for sketched problems.
  std::optional<double> tolerance;
  StepRule step_rule = StepRule::balanced;
  double tau = 0.0;    // StepRule::fixed only
  double sigma = 0.0;  // StepRule::fixed only
  long check_every = 50;
  /// Initial iterates (clamped into the domains); zero when empty.
  std::optional<Vector> w0;
  std::optional<Vector> lambda0;
};

inline constexpr double kExactTolerance = 1e-8;
inline constexpr double kSketchedTolerance = 1e-6;

struct SolveReport {
  SolutionPair pair;  // residual fields measured against the exact problem
  bool converged = false;
  KktResidual final_residuals;  // of the problem actually solved
  double wall_time_ms = 0.0;
  double operator_norm_estimate = 0.0;
  std::vector<double> residual_history;  // max residual at each checkpoint
};

/// Largest singular value of K by power iteration on K^T K, started from a
/// seeded random vector. Stops when the estimate changes by less than
/// rel_tol (relative) or after max_iterations.
double operator_norm(const BilinearOperator& op, long max_iterations = 500, double rel_tol = 1e-10,
                     std::uint64_t seed = 0x9b05688c2b3e6c1fULL);

/// Primal-dual iteration on
///   max_{lambda in Delta} min_{w in Omega} g(w) + gw ||w||_1 - h(lambda) - gl ||lambda||_1 - w^T K lambda.
/// Budget exhaustion returns converged = false. Returns the best checkpoint.
SolveReport solve_primal_dual(const SaddleProblem& problem, const BilinearOperator& coupling, double gamma_w,
                              double gamma_lambda, const SolverOptions& opts);

/// Exact problem (K = A, no l1 terms).
SolveReport solve_exact(const SaddleProblem& problem, const SolverOptions& opts = {});

/// Sketched, l1-regularized problem.
SolveReport solve_sketched(const SketchedProblem& sp, const SolverOptions& opts = {});

/// Closed-form saddle point for quadratic g, h on all of space:
/// (beta I + A^T A / alpha) lambda = beta b - A^T a, then w = a + A lambda / alpha.
SolutionPair solve_exact_quadratic(const SaddleProblem& problem);

/// argmin_{x in [lower, upper]} f(x) + c^T x + l1 ||x||_1 for a prox-able
/// strongly convex f, by proximal-point iterations.
Vector minimize_linear_tilt(const ConvexFn& f, const Vector& c, double l1, const Vector& lower,
                            const Vector& upper);

/// Saddle-function value g(w) + gw|w|_1 - h(lambda) - gl|lambda|_1 - w^T K lambda.
double saddle_objective(const SaddleProblem& problem, const BilinearOperator& coupling, double gamma_w,
                        double gamma_lambda, const Vector& w, const Vector& lambda);

}  // namespace sketchsaddle
