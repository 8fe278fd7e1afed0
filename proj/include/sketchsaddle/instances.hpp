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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sketchsaddle/model.hpp"

namespace sketchsaddle {

enum class MatrixStyle { rows, columns };

std::string_view to_string(MatrixStyle style);
MatrixStyle parse_matrix_style(std::string_view name);

struct Normalized {
  Matrix matrix;
  double factor = 1.0;  // matrix = factor * input
};

/// Uniform rescaling so that the largest row (or column) norm is exactly 1.
/// Throws std::invalid_argument on an all-zero matrix.
Normalized normalize(const Matrix& a, MatrixStyle style);

/// Quadratic saddle problem with a known sparse saddle point:
///   g(w) = (alpha/2)||w - a||^2,  h(lambda) = (beta/2)||lambda - b||^2,
///   a = w* - A lambda* / alpha,   b = lambda* + A^T w* / beta.
struct PlantedInstance {
  std::shared_ptr<const SaddleProblem> problem;
  Vector w_star;
  Vector lambda_star;
  std::vector<Index> support_w;       // sorted
  std::vector<Index> support_lambda;  // sorted
  std::uint64_t seed = 0;
  MatrixStyle style = MatrixStyle::rows;
};

struct PlantedSpec {
  Index d = 0;
  Index n = 0;
  Index s_w = 0;
  Index s_lambda = 0;
  double alpha = 1.0;
  double beta = 1.0;
  MatrixStyle style = MatrixStyle::rows;
  std::uint64_t seed = 0;
};

/// A has i.i.d. standard normal entries, then is normalized per `style`.
/// Supports are uniform random subsets, signs Rademacher, magnitudes
/// uniform on [0.5, 1.5].
PlantedInstance gen_planted_quadratic(const PlantedSpec& spec);

/// Regularized classification in saddle form:
///   min_w (gamma n / 2)||w||^2 + sum_i loss(y_i x_i^T w)
///   = min_w max_lambda g(w) - sum_i loss*(lambda_i) - w^T A lambda,
/// with A_{*i} = -y_i x_i, so that lambda_i = loss'(y_i x_i^T w) at the
/// saddle point.
struct ErmInstance {
  Matrix x;   // n x d, rows scaled so the largest has unit norm
  Vector y;   // +-1
  Loss loss = Loss::squared_hinge;
  double gamma_reg = 0.0;
  Vector direction;  // sparse unit vector used to draw the labels
  std::shared_ptr<const SaddleProblem> problem;
  std::uint64_t seed = 0;
};

struct ErmSpec {
  Index n = 0;
  Index d = 0;
  Loss loss = Loss::squared_hinge;
  /// Defaults to 1/sqrt(n).
  std::optional<double> gamma_reg;
  /// Fraction of examples labelled by the sign of x_i^T direction; the rest
  /// get the opposite label.
  double margin_fraction = 1.0;
  /// Nonzeros of the labelling direction; defaults to max(1, d / 10).
  std::optional<Index> direction_support;
  std::uint64_t seed = 0;
};

ErmInstance gen_erm(const ErmSpec& spec);

/// lambda_i = loss'(y_i x_i^T w): the dual point matching a primal w.
Vector dual_from_primal(const ErmInstance& erm, const Vector& w);

enum class PerturbKind { varsigma, tau };

struct PerturbCertificate {
  PerturbKind kind = PerturbKind::varsigma;
  double requested = 0.0;
  /// varsigma: max of the two stationarity residuals at the sparse pair.
  /// tau: max of ||w_opt - w*||_2 and ||lambda_opt - lambda*||_2.
  double achieved = 0.0;
  /// max(smoothness of g, smoothness of h).
  double mu = 0.0;
};

struct PerturbedInstance {
  /// Same sparse pair (w_star, lambda_star) and supports; new centers.
  PlantedInstance instance;
  /// Exact saddle point of the perturbed problem. Equals the sparse pair in
  /// tau mode with tau = 0; in varsigma mode it is not planted and left empty.
  std::optional<Vector> w_opt;
  std::optional<Vector> lambda_opt;
  PerturbCertificate certificate;
};

/// varsigma mode: shifts the centers by -(varsigma/alpha) v and
/// -(varsigma/beta) u with random sign vectors u, v, so both stationarity
/// residuals at the sparse pair equal varsigma exactly.
/// tau mode: adds dense tails of l2 norm tau (off the supports when
/// possible) to w* and lambda*, and rebuilds the centers so the dense pair
/// is the exact saddle point.
PerturbedInstance perturb_to_approx_sparse(const PlantedInstance& instance, PerturbKind kind, double amount,
                                           std::uint64_t seed);

/// Instance directory: A.mtx, meta.json and one vector file per vector
/// (w_star.txt, lambda_star.txt, and the centers or labels).
struct StoredInstance {
  std::shared_ptr<const SaddleProblem> problem;
  std::optional<Vector> w_star;
  std::optional<Vector> lambda_star;
  std::string kind;  // "planted_quadratic" or "erm"
  std::uint64_t seed = 0;
};

void save_instance(const std::filesystem::path& dir, const PlantedInstance& instance);
void save_instance(const std::filesystem::path& dir, const ErmInstance& instance);
StoredInstance load_instance(const std::filesystem::path& dir);

}  // namespace sketchsaddle
