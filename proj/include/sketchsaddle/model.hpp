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

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <variant>

#include "sketchsaddle/conjugate.hpp"
#include "sketchsaddle/types.hpp"

namespace sketchsaddle {

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

/// Feasible set of one block of variables: all of R^k or a coordinate box.
/// Infinite bounds are allowed inside a box.
class Domain {
 public:
  static Domain all_space() { return Domain(); }
  static Domain box(Vector lower, Vector upper);
  static Domain box(Index dim, double lower, double upper);

  bool is_box() const { return lower_.has_value(); }
  const Vector& lower() const { return *lower_; }
  const Vector& upper() const { return *upper_; }

  /// Lower/upper bound vectors of length dim (+-inf when unconstrained).
  std::pair<Vector, Vector> bounds(Index dim) const;

 private:
  Domain() = default;
  std::optional<Vector> lower_;
  std::optional<Vector> upper_;
};

// ---------------------------------------------------------------------------
// Convex functions
// ---------------------------------------------------------------------------

enum class ConvexKind { quadratic, separable_conjugate, custom };

/// A strongly convex function that the solvers can evaluate, differentiate and
/// (for the first two kinds) take proximal steps on.
///
///  - quadratic:            f(x) = (modulus/2) ||x - center||^2
///  - separable_conjugate:  f(x) = sum_i l*(x_i) for a classification loss
///  - custom:               user callbacks; prox is optional
///
/// Instances are immutable.
class ConvexFn {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  /// prox(v, step, l1) = argmin_x (1/(2 step))||x - v||^2 + f(x) + l1 ||x||_1.
  using ProxFn = std::function<Vector(const Vector&, double, double)>;

  static ConvexFn quadratic(Vector center, double modulus);
  static ConvexFn separable_conjugate(Loss loss, Index dim);
  static ConvexFn custom(Index dim, double modulus, ValueFn value, GradientFn gradient,
                         ProxFn prox = {}, std::optional<double> smoothness = std::nullopt);

  ConvexKind kind() const { return kind_; }
  Index dimension() const { return dim_; }
  double modulus() const { return modulus_; }
  std::optional<double> smoothness() const { return smoothness_; }

  /// Quadratic kind only.
  const Vector& center() const;
  /// Separable-conjugate kind only.
  Loss loss() const;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  bool has_prox() const { return kind_ != ConvexKind::custom || static_cast<bool>(prox_); }
  Vector prox(const Vector& v, double step, double l1_weight) const;

  /// Box on which f is finite (all of space except for conjugates).
  std::pair<Vector, Vector> natural_bounds() const;

 private:
  ConvexFn() = default;

  ConvexKind kind_ = ConvexKind::quadratic;
  Index dim_ = 0;
  double modulus_ = 0.0;
  std::optional<double> smoothness_;
  Vector center_;
  Loss loss_ = Loss::squared_hinge;
  ValueFn value_;
  GradientFn gradient_;
  ProxFn prox_;
};

// ---------------------------------------------------------------------------
// Coupling matrix
// ---------------------------------------------------------------------------

/// The d x n bilinear coupling A, stored dense or in compressed sparse column
/// form.
class CouplingMatrix {
 public:
  /// Entry count above which `automatic` switches to sparse storage.
  static constexpr double kSparseThreshold = 1e7;

  explicit CouplingMatrix(Matrix dense) : storage_(std::move(dense)) {}
  explicit CouplingMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {}

  /// Dense unless d*n exceeds kSparseThreshold.
  static CouplingMatrix automatic(const Matrix& dense);

  Index rows() const;
  Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }
  const Matrix* dense_storage() const { return std::get_if<Matrix>(&storage_); }
  const SparseMatrix* sparse_storage() const { return std::get_if<SparseMatrix>(&storage_); }

  Vector times(const Vector& lambda) const;            // A lambda
  Vector transpose_times(const Vector& w) const;       // A^T w
  Matrix times_dense(const Matrix& right) const;       // A R
  Matrix transpose_times_dense(const Matrix& left) const;  // A^T L, i.e. (L^T A)^T

  Vector row_norms() const;
  Vector col_norms() const;
  Matrix to_dense() const;

 private:
  std::variant<Matrix, SparseMatrix> storage_;
};

// ---------------------------------------------------------------------------
// Saddle problem
// ---------------------------------------------------------------------------

/// Which of the two norm assumptions on A an instance declares.
enum class NormBound { none, rows, columns, both };

/// max over lambda in Delta, min over w in Omega of
///     g(w) - h(lambda) - w^T A lambda.
class SaddleProblem {
 public:
  static constexpr double kNormBoundSlack = 1e-12;

  SaddleProblem(ConvexFn g, ConvexFn h, std::shared_ptr<const CouplingMatrix> a,
                Domain domain_w = Domain::all_space(), Domain domain_lambda = Domain::all_space(),
                NormBound bound = NormBound::none);

  const ConvexFn& g() const { return g_; }
  const ConvexFn& h() const { return h_; }
  const CouplingMatrix& a() const { return *a_; }
  const std::shared_ptr<const CouplingMatrix>& a_ptr() const { return a_; }
  const Domain& domain_w() const { return domain_w_; }
  const Domain& domain_lambda() const { return domain_lambda_; }
  NormBound norm_bound() const { return bound_; }

  Index d() const { return a_->rows(); }
  Index n() const { return a_->cols(); }
  double alpha() const { return g_.modulus(); }
  double beta() const { return h_.modulus(); }

  /// Domain intersected with the natural domain of g (resp. h).
  std::pair<Vector, Vector> bounds_w() const;
  std::pair<Vector, Vector> bounds_lambda() const;

  bool is_quadratic_unconstrained() const;

 private:
  ConvexFn g_;
  ConvexFn h_;
  std::shared_ptr<const CouplingMatrix> a_;
  Domain domain_w_;
  Domain domain_lambda_;
  NormBound bound_;
};

double eval_g(const SaddleProblem& problem, const Vector& w);
double eval_h(const SaddleProblem& problem, const Vector& lambda);
Vector grad_g(const SaddleProblem& problem, const Vector& w);
Vector grad_h(const SaddleProblem& problem, const Vector& lambda);

// ---------------------------------------------------------------------------
// Solutions and residuals
// ---------------------------------------------------------------------------

/// Distance from zero to q + l1 * d|x| + N_[lower, upper](x), coordinatewise,
/// reduced by the infinity norm. With l1 = 0 and no active bounds this is
/// ||q||_inf.
double stationarity_residual(const Vector& q, const Vector& x, double l1_weight,
                             const Vector& lower, const Vector& upper);

struct KktResidual {
  double w_inf = 0.0;       // ||grad g(w) - A lambda||_inf
  double lambda_inf = 0.0;  // ||grad h(lambda) + A^T w||_inf
  double max() const { return std::max(w_inf, lambda_inf); }
};

/// Stationarity violations of the exact problem. Box domains are measured
/// with projected stationarity (normal-cone distance).
KktResidual kkt_residual(const SaddleProblem& problem, const Vector& w, const Vector& lambda);

struct SolutionPair {
  Vector w;
  Vector lambda;
  double kkt_w_inf = 0.0;
  double kkt_l_inf = 0.0;
  long iterations = 0;
};

/// Builds a pair whose residual fields are computed from (w, lambda, problem).
SolutionPair make_solution_pair(const SaddleProblem& problem, Vector w, Vector lambda,
                                long iterations = 0);

// ---------------------------------------------------------------------------
// Sparsity
// ---------------------------------------------------------------------------

inline constexpr double kDefaultSparsityThreshold = 1e-9;

struct SparsityStats {
  Index l0 = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double ratio_l1_l2 = 0.0;  // 0 for the zero vector
};

template <typename Derived>
SparsityStats sparsity_stats(const Eigen::MatrixBase<Derived>& x,
                             double eps0 = kDefaultSparsityThreshold) {
  if (eps0 < 0.0) throw std::invalid_argument("sparsity_stats: eps0 must be nonnegative");
  SparsityStats stats;
  stats.l0 = (x.array().abs() > eps0).count();
  stats.l1 = x.template lpNorm<1>();
  stats.l2 = x.norm();
  stats.ratio_l1_l2 = stats.l2 > 0.0 ? stats.l1 / stats.l2 : 0.0;
  return stats;
}

}  // namespace sketchsaddle
