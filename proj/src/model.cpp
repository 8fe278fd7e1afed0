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

#include "sketchsaddle/model.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "sketchsaddle/prox.hpp"

namespace sketchsaddle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<Vector, Vector> intersect(std::pair<Vector, Vector> a, const std::pair<Vector, Vector>& b) {
  a.first = a.first.cwiseMax(b.first);
  a.second = a.second.cwiseMin(b.second);
  return a;
}

}  // namespace

// --- Domain ----------------------------------------------------------------

Domain Domain::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw ContractViolation("Domain::box: bound lengths differ");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("Domain::box: lower > upper");
  Domain dom;
  dom.lower_ = std::move(lower);
  dom.upper_ = std::move(upper);
  return dom;
}

Domain Domain::box(Index dim, double lower, double upper) {
  return box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

std::pair<Vector, Vector> Domain::bounds(Index dim) const {
  if (!is_box()) return {Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf)};
  require_size(lower_->size(), dim, "Domain::bounds");
  return {*lower_, *upper_};
}

// --- ConvexFn --------------------------------------------------------------

ConvexFn ConvexFn::quadratic(Vector center, double modulus) {
  if (!(modulus >= 0.0)) throw std::invalid_argument("ConvexFn::quadratic: modulus must be nonnegative");
  ConvexFn f;
  f.kind_ = ConvexKind::quadratic;
  f.dim_ = center.size();
  f.modulus_ = modulus;
  f.smoothness_ = modulus;
  f.center_ = std::move(center);
  return f;
}

ConvexFn ConvexFn::separable_conjugate(Loss loss, Index dim) {
  ConvexFn f;
  f.kind_ = ConvexKind::separable_conjugate;
  f.dim_ = dim;
  f.modulus_ = conjugate_modulus(loss);
  // The squared-hinge conjugate has constant curvature 1/2; the logistic one
  // blows up at the endpoints of [-1, 0].
  if (loss == Loss::squared_hinge) f.smoothness_ = 0.5;
  f.loss_ = loss;
  return f;
}

ConvexFn ConvexFn::custom(Index dim, double modulus, ValueFn value, GradientFn gradient, ProxFn prox,
                          std::optional<double> smoothness) {
  if (!value || !gradient) throw std::invalid_argument("ConvexFn::custom: value and gradient callbacks are required");
  ConvexFn f;
  f.kind_ = ConvexKind::custom;
  f.dim_ = dim;
  f.modulus_ = modulus;
  f.smoothness_ = smoothness;
  f.value_ = std::move(value);
  f.gradient_ = std::move(gradient);
  f.prox_ = std::move(prox);
  return f;
}

const Vector& ConvexFn::center() const {
  if (kind_ != ConvexKind::quadratic) throw ContractViolation("ConvexFn::center: not a quadratic");
  return center_;
}

Loss ConvexFn::loss() const {
  if (kind_ != ConvexKind::separable_conjugate) throw ContractViolation("ConvexFn::loss: not a conjugate");
  return loss_;
}

double ConvexFn::value(const Vector& x) const {
  require_size(x.size(), dim_, "ConvexFn::value");
  switch (kind_) {
    case ConvexKind::quadratic:
      return 0.5 * modulus_ * (x - center_).squaredNorm();
    case ConvexKind::separable_conjugate: {
      double total = 0.0;
      for (Index i = 0; i < x.size(); ++i) total += conjugate_value(loss_, x[i]);
      return total;
    }
    case ConvexKind::custom:
      return value_(x);
  }
  return 0.0;
}

Vector ConvexFn::gradient(const Vector& x) const {
  require_size(x.size(), dim_, "ConvexFn::gradient");
  switch (kind_) {
    case ConvexKind::quadratic:
      return modulus_ * (x - center_);
    case ConvexKind::separable_conjugate:
      return x.unaryExpr([this](double t) { return conjugate_derivative(loss_, t); });
    case ConvexKind::custom:
      return gradient_(x);
  }
  return {};
}

Vector ConvexFn::prox(const Vector& v, double step, double l1_weight) const {
  require_size(v.size(), dim_, "ConvexFn::prox");
  switch (kind_) {
    case ConvexKind::quadratic:
      return prox_quadratic_plus_l1(v, center_, modulus_, l1_weight, step);
    case ConvexKind::separable_conjugate: {
      // Conjugate domains sit inside t <= 0, where l1 |t| = -l1 t is linear and
      // simply shifts the prox argument.
      const double shift = step * l1_weight;
      return v.unaryExpr([&](double t) { return conjugate_prox(loss_, t + shift, step); });
    }
    case ConvexKind::custom:
      if (!prox_) throw UnsupportedProblem("custom ConvexFn has no prox callback");
      return prox_(v, step, l1_weight);
  }
  return {};
}

std::pair<Vector, Vector> ConvexFn::natural_bounds() const {
  if (kind_ == ConvexKind::separable_conjugate) {
    const Interval dom = conjugate_domain(loss_);
    return {Vector::Constant(dim_, dom.lower), Vector::Constant(dim_, dom.upper)};
  }
  return {Vector::Constant(dim_, -kInf), Vector::Constant(dim_, kInf)};
}

// --- CouplingMatrix --------------------------------------------------------

CouplingMatrix CouplingMatrix::automatic(const Matrix& dense) {
  if (static_cast<double>(dense.rows()) * static_cast<double>(dense.cols()) > kSparseThreshold) {
    return CouplingMatrix(SparseMatrix(dense.sparseView()));
  }
  return CouplingMatrix(dense);
}

Index CouplingMatrix::rows() const {
  return std::visit([](const auto& m) -> Index { return m.rows(); }, storage_);
}

Index CouplingMatrix::cols() const {
  return std::visit([](const auto& m) -> Index { return m.cols(); }, storage_);
}

Vector CouplingMatrix::times(const Vector& lambda) const {
  require_size(lambda.size(), cols(), "CouplingMatrix::times");
  return std::visit([&](const auto& m) -> Vector { return m * lambda; }, storage_);
}

Vector CouplingMatrix::transpose_times(const Vector& w) const {
  require_size(w.size(), rows(), "CouplingMatrix::transpose_times");
  return std::visit([&](const auto& m) -> Vector { return m.transpose() * w; }, storage_);
}

Matrix CouplingMatrix::times_dense(const Matrix& right) const {
  require_size(right.rows(), cols(), "CouplingMatrix::times_dense");
  return std::visit([&](const auto& m) -> Matrix { return m * right; }, storage_);
}

Matrix CouplingMatrix::transpose_times_dense(const Matrix& left) const {
  require_size(left.rows(), rows(), "CouplingMatrix::transpose_times_dense");
  return std::visit([&](const auto& m) -> Matrix { return m.transpose() * left; }, storage_);
}

Vector CouplingMatrix::row_norms() const {
  if (const auto* dense = std::get_if<Matrix>(&storage_)) return dense->rowwise().norm();
  const auto& sparse = std::get<SparseMatrix>(storage_);
  Vector sq = Vector::Zero(sparse.rows());
  for (Index j = 0; j < sparse.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(sparse, j); it; ++it) sq[it.row()] += it.value() * it.value();
  }
  return sq.cwiseSqrt();
}

Vector CouplingMatrix::col_norms() const {
  return std::visit([](const auto& m) -> Vector {
    Vector norms(m.cols());
    for (Index j = 0; j < m.cols(); ++j) norms[j] = m.col(j).norm();
    return norms;
  }, storage_);
}

Matrix CouplingMatrix::to_dense() const {
  if (const auto* dense = std::get_if<Matrix>(&storage_)) return *dense;
  return Matrix(std::get<SparseMatrix>(storage_));
}

// --- SaddleProblem ---------------------------------------------------------

SaddleProblem::SaddleProblem(ConvexFn g, ConvexFn h, std::shared_ptr<const CouplingMatrix> a,
                             Domain domain_w, Domain domain_lambda, NormBound bound)
    : g_(std::move(g)),
      h_(std::move(h)),
      a_(std::move(a)),
      domain_w_(std::move(domain_w)),
      domain_lambda_(std::move(domain_lambda)),
      bound_(bound) {
  if (!a_) throw ContractViolation("SaddleProblem: coupling matrix is null");
  require_size(g_.dimension(), a_->rows(), "SaddleProblem: g dimension vs rows of A");
  require_size(h_.dimension(), a_->cols(), "SaddleProblem: h dimension vs cols of A");
  if (!(g_.modulus() > 0.0)) throw std::invalid_argument("SaddleProblem: g must be strongly convex (alpha > 0)");
  if (!(h_.modulus() > 0.0)) throw std::invalid_argument("SaddleProblem: h must be strongly convex (beta > 0)");
  if (domain_w_.is_box()) require_size(domain_w_.lower().size(), d(), "SaddleProblem: Omega box");
  if (domain_lambda_.is_box()) require_size(domain_lambda_.lower().size(), n(), "SaddleProblem: Delta box");

  const bool check_rows = bound_ == NormBound::rows || bound_ == NormBound::both;
  const bool check_cols = bound_ == NormBound::columns || bound_ == NormBound::both;
  if (check_rows && a_->rows() > 0 && a_->row_norms().maxCoeff() > 1.0 + kNormBoundSlack) {
    throw std::invalid_argument("SaddleProblem: declared row-norm bound violated");
  }
  if (check_cols && a_->cols() > 0 && a_->col_norms().maxCoeff() > 1.0 + kNormBoundSlack) {
    throw std::invalid_argument("SaddleProblem: declared column-norm bound violated");
  }
}

std::pair<Vector, Vector> SaddleProblem::bounds_w() const {
  return intersect(domain_w_.bounds(d()), g_.natural_bounds());
}

std::pair<Vector, Vector> SaddleProblem::bounds_lambda() const {
  return intersect(domain_lambda_.bounds(n()), h_.natural_bounds());
}

bool SaddleProblem::is_quadratic_unconstrained() const {
  return g_.kind() == ConvexKind::quadratic && h_.kind() == ConvexKind::quadratic && !domain_w_.is_box() &&
         !domain_lambda_.is_box();
}

double eval_g(const SaddleProblem& problem, const Vector& w) { return problem.g().value(w); }
double eval_h(const SaddleProblem& problem, const Vector& lambda) { return problem.h().value(lambda); }
Vector grad_g(const SaddleProblem& problem, const Vector& w) { return problem.g().gradient(w); }
Vector grad_h(const SaddleProblem& problem, const Vector& lambda) { return problem.h().gradient(lambda); }

// --- residuals -------------------------------------------------------------

double stationarity_residual(const Vector& q, const Vector& x, double l1_weight, const Vector& lower,
                             const Vector& upper) {
  require_size(x.size(), q.size(), "stationarity_residual");
  double worst = 0.0;
  for (Index i = 0; i < q.size(); ++i) {
    // Interval [lo, hi] of admissible subgradient offsets at x_i.
    double lo = 0.0;
    double hi = 0.0;
    if (x[i] > 0.0) {
      lo = hi = l1_weight;
    } else if (x[i] < 0.0) {
      lo = hi = -l1_weight;
    } else {
      lo = -l1_weight;
      hi = l1_weight;
    }
    if (x[i] <= lower[i]) lo = -kInf;
    if (x[i] >= upper[i]) hi = kInf;
    const double r = std::max({0.0, -(q[i] + hi), q[i] + lo});
    if (!(r <= worst)) worst = r;  // propagates NaN
  }
  return worst;
}

KktResidual kkt_residual(const SaddleProblem& problem, const Vector& w, const Vector& lambda) {
  require_size(w.size(), problem.d(), "kkt_residual: w");
  require_size(lambda.size(), problem.n(), "kkt_residual: lambda");
  const Vector qw = problem.g().gradient(w) - problem.a().times(lambda);
  const Vector ql = problem.h().gradient(lambda) + problem.a().transpose_times(w);
  const auto [wl, wu] = problem.bounds_w();
  const auto [ll, lu] = problem.bounds_lambda();
  return {stationarity_residual(qw, w, 0.0, wl, wu), stationarity_residual(ql, lambda, 0.0, ll, lu)};
}

SolutionPair make_solution_pair(const SaddleProblem& problem, Vector w, Vector lambda, long iterations) {
  const KktResidual r = kkt_residual(problem, w, lambda);
  return SolutionPair{std::move(w), std::move(lambda), r.w_inf, r.lambda_inf, iterations};
}

}  // namespace sketchsaddle
