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

#include "sketchsaddle/regbounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "sketchsaddle/solver.hpp"

namespace sketchsaddle {

namespace {

template <typename T>
T need(const std::optional<T>& field, const char* name) {
  if (!field) throw std::invalid_argument(std::string("missing prescription input: ") + name);
  return *field;
}

// sqrt((c/m) log(4 k / delta))
double tail(const PrescriptionInputs& in, double k) {
  return std::sqrt(in.c / static_cast<double>(in.m) * std::log(4.0 * k / in.delta));
}

// sqrt((c/m) (log(4 k / delta) + 16 s log(9 other / (8 s)))), the s log term
// being 0 for s = 0.
double covering_tail(const PrescriptionInputs& in, double k, Index s, double other) {
  double inner = std::log(4.0 * k / in.delta);
  if (s > 0) {
    const double sd = static_cast<double>(s);
    inner += 16.0 * sd * std::log(9.0 * other / (8.0 * sd));
  }
  return std::sqrt(in.c / static_cast<double>(in.m) * inner);
}

void copy_required(Prescription rule, const PrescriptionRequest& req, const OracleQuantities& oracle,
                   PrescriptionInputs& in) {
  auto dims = [&] {
    if (req.d < 1) throw std::invalid_argument("missing prescription input: d");
    if (req.n < 1) throw std::invalid_argument("missing prescription input: n");
    in.d = req.d;
    in.n = req.n;
  };
  auto alpha = [&] {
    if (!(req.alpha > 0.0)) throw std::invalid_argument("missing prescription input: alpha");
    in.alpha = req.alpha;
  };
  auto beta = [&] {
    if (!(req.beta > 0.0)) throw std::invalid_argument("missing prescription input: beta");
    in.beta = req.beta;
  };
  auto nonneg = [](const std::optional<double>& v, const char* name) {
    const double x = need(v, name);
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(name) + " must be nonnegative");
    return x;
  };
  dims();
  switch (rule) {
    case Prescription::right_w:
    case Prescription::right_w_kkt:
    case Prescription::right_w_close:
    case Prescription::right_w_rate:
      beta();
      in.s_lambda = need(oracle.s_lambda, "s_lambda");
      in.norm_ATw = need(oracle.norm_ATw, "norm_ATw");
      in.norm_l = need(oracle.norm_l, "norm_l");
      break;
    case Prescription::left_lambda:
      alpha();
      in.s_w = need(oracle.s_w, "s_w");
      in.norm_Al = need(oracle.norm_Al, "norm_Al");
      in.norm_w = need(oracle.norm_w, "norm_w");
      break;
    case Prescription::right_lambda:
      alpha();
      in.s_w = need(oracle.s_w, "s_w");
      in.norm_ATw = need(oracle.norm_ATw, "norm_ATw");
      in.norm_l = need(oracle.norm_l, "norm_l");
      in.zeta = nonneg(req.zeta, "zeta");
      break;
    case Prescription::left_w:
      beta();
      in.s_lambda = need(oracle.s_lambda, "s_lambda");
      in.norm_Al = need(oracle.norm_Al, "norm_Al");
      in.norm_w = need(oracle.norm_w, "norm_w");
      in.zeta = nonneg(req.zeta, "zeta");
      break;
  }
  if (rule == Prescription::right_w_kkt) in.varsigma = nonneg(req.varsigma, "varsigma");
  if (rule == Prescription::right_w_close) {
    in.tau = nonneg(req.tau, "tau");
    in.mu = nonneg(req.mu, "mu");
  }
}

}  // namespace

std::string_view to_string(Prescription p) {
  switch (p) {
    case Prescription::right_w:
      return "right_w";
    case Prescription::left_lambda:
      return "left_lambda";
    case Prescription::right_w_kkt:
      return "right_w_kkt";
    case Prescription::right_lambda:
      return "right_lambda";
    case Prescription::left_w:
      return "left_w";
    case Prescription::right_w_close:
      return "right_w_close";
    case Prescription::right_w_rate:
      return "right_w_rate";
  }
  return "unknown";
}

Prescription parse_prescription(std::string_view name) {
  for (auto p : {Prescription::right_w, Prescription::left_lambda, Prescription::right_w_kkt,
                 Prescription::right_lambda, Prescription::left_w, Prescription::right_w_close,
                 Prescription::right_w_rate}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown prescription: " + std::string(name));
}

SketchSide prescription_side(Prescription p) {
  return (p == Prescription::left_lambda || p == Prescription::left_w) ? SketchSide::left : SketchSide::right;
}

OracleQuantities OracleQuantities::from_pair(const SaddleProblem& problem, const Vector& w_star,
                                             const Vector& lambda_star, double eps0) {
  require_size(w_star.size(), problem.d(), "OracleQuantities: w_star");
  require_size(lambda_star.size(), problem.n(), "OracleQuantities: lambda_star");
  OracleQuantities q;
  q.w_star = w_star;
  q.lambda_star = lambda_star;
  q.s_w = sparsity_stats(w_star, eps0).l0;
  q.s_lambda = sparsity_stats(lambda_star, eps0).l0;
  q.norm_ATw = problem.a().transpose_times(w_star).norm();
  q.norm_Al = problem.a().times(lambda_star).norm();
  q.norm_w = w_star.norm();
  q.norm_l = lambda_star.norm();
  return q;
}

Index minimum_sketch_size(double c, double delta) {
  if (!(c > 0.0)) throw std::invalid_argument("minimum_sketch_size: c must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("minimum_sketch_size: delta must lie in (0, 1)");
  return static_cast<Index>(std::ceil(4.0 * c * std::log(4.0 / delta)));
}

std::pair<double, double> evaluate_prescription(Prescription rule, const PrescriptionInputs& in, double scale_factor) {
  if (!(in.c > 0.0)) throw std::invalid_argument("prescription: c must be positive");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw std::invalid_argument("prescription: delta must lie in (0, 1)");
  if (in.m < 1) throw std::invalid_argument("prescription: m must be at least 1");
  if (!(scale_factor > 0.0)) throw std::invalid_argument("prescription: scale_factor must be positive");
  const double d = static_cast<double>(need(in.d, "d"));
  const double n = static_cast<double>(need(in.n, "n"));

  double gw = 0.0;
  double gl = 0.0;
  switch (rule) {
    case Prescription::right_w:
    case Prescription::right_w_kkt:
    case Prescription::right_w_close:
    case Prescription::right_w_rate: {
      double shift = 0.0;
      if (rule == Prescription::right_w_kkt) shift = 2.0 * need(in.varsigma, "varsigma");
      if (rule == Prescription::right_w_close) shift = 2.0 * (1.0 + need(in.mu, "mu")) * need(in.tau, "tau");
      const Index sl = need(in.s_lambda, "s_lambda");
      const double beta = need(in.beta, "beta");
      gl = 2.0 * need(in.norm_ATw, "norm_ATw") * tail(in, n) + shift;
      const double lead = 6.0 * gl * std::sqrt(static_cast<double>(sl)) / beta;
      const double factor = rule == Prescription::right_w_rate ? 1.0 : 1.0 + 7.0 * covering_tail(in, d, sl, n);
      gw = 2.0 * need(in.norm_l, "norm_l") * tail(in, d) + lead * factor + shift;
      break;
    }
    case Prescription::left_lambda: {
      const Index sw = need(in.s_w, "s_w");
      gw = 2.0 * need(in.norm_Al, "norm_Al") * tail(in, d);
      const double lead = 6.0 * gw * std::sqrt(static_cast<double>(sw)) / need(in.alpha, "alpha");
      gl = 2.0 * need(in.norm_w, "norm_w") * tail(in, n) + lead * (1.0 + 7.0 * covering_tail(in, n, sw, d));
      break;
    }
    case Prescription::right_lambda: {
      const Index sw = need(in.s_w, "s_w");
      gw = 2.0 * need(in.norm_l, "norm_l") * tail(in, d);
      const double lead = 6.0 * gw * std::sqrt(static_cast<double>(sw)) / need(in.alpha, "alpha");
      gl = 2.0 * need(in.norm_ATw, "norm_ATw") * tail(in, n) +
           lead * (1.0 + 7.0 * need(in.zeta, "zeta") * covering_tail(in, n, sw, d));
      break;
    }
    case Prescription::left_w: {
      const Index sl = need(in.s_lambda, "s_lambda");
      gl = 2.0 * need(in.norm_w, "norm_w") * tail(in, n);
      const double lead = 6.0 * gl * std::sqrt(static_cast<double>(sl)) / need(in.beta, "beta");
      gw = 2.0 * need(in.norm_Al, "norm_Al") * tail(in, d) +
           lead * (1.0 + 7.0 * need(in.zeta, "zeta") * covering_tail(in, d, sl, n));
      break;
    }
  }
  return {scale_factor * gw, scale_factor * gl};
}

RegPrescription prescribe_regularization(const PrescriptionRequest& req, const OracleQuantities& oracle) {
  const Index m_min = minimum_sketch_size(req.c, req.delta);
  if (req.m < 1) throw std::invalid_argument("prescribe_regularization: m must be at least 1");
  if (!req.allow_small_m && req.m < m_min) {
    throw PreconditionError("sketch size m = " + std::to_string(req.m) + " is below the minimum " +
                            std::to_string(m_min) + " for c and delta");
  }
  RegPrescription out;
  out.rule = req.rule;
  out.scale_factor = req.scale_factor;
  out.inputs_used.c = req.c;
  out.inputs_used.delta = req.delta;
  out.inputs_used.m = req.m;
  copy_required(req.rule, req, oracle, out.inputs_used);
  std::tie(out.gamma_w, out.gamma_lambda) = evaluate_prescription(req.rule, out.inputs_used, req.scale_factor);
  return out;
}

// --- restricted norms ---------------------------------------------------------

double subset_count(Index dim, Index s) {
  if (s < 0 || s > dim) return 0.0;
  s = std::min(s, dim - s);
  double count = 1.0;
  for (Index i = 1; i <= s; ++i) {
    count = count * static_cast<double>(dim - s + i) / static_cast<double>(i);
    if (!std::isfinite(count)) return std::numeric_limits<double>::infinity();
  }
  return std::round(count);
}

double zeta_restricted(const Matrix& a, Index s, ZetaSide side, ZetaMode mode) {
  // Work with the columns of B = A (plain) or A^T (transpose).
  const Index dim = side == ZetaSide::plain ? a.cols() : a.rows();
  if (s < 1 || s > dim) throw std::invalid_argument("zeta_restricted: s must lie in [1, dimension]");

  if (mode == ZetaMode::bound) {
    const Vector norms = side == ZetaSide::plain ? Vector(a.colwise().norm().transpose()) : Vector(a.rowwise().norm());
    double value = std::sqrt(static_cast<double>(s)) * norms.maxCoeff();
    if (std::min(a.rows(), a.cols()) <= kMaterializationBudget) {
      const Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
      value = std::min(value, std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff())));
    }
    return value;
  }

  if (subset_count(dim, s) > kZetaSubsetBudget) {
    throw BudgetExceeded("zeta_restricted: exact mode would enumerate more than 1e6 subsets; use bound mode");
  }
  const Matrix gram = side == ZetaSide::plain ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  std::vector<Index> pick(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) pick[static_cast<std::size_t>(i)] = i;
  Matrix sub(s, s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  double best = 0.0;
  while (true) {
    for (Index i = 0; i < s; ++i) {
      for (Index j = 0; j < s; ++j) sub(i, j) = gram(pick[i], pick[j]);
    }
    double top;
    if (s == 1) {
      top = sub(0, 0);
    } else {
      eig.compute(sub, Eigen::EigenvaluesOnly);
      top = eig.eigenvalues().maxCoeff();
    }
    best = std::max(best, top);
    // Next combination in lexicographic order.
    Index k = s - 1;
    while (k >= 0 && pick[k] == dim - s + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (Index j = k + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
  }
  return std::sqrt(std::max(0.0, best));
}

double zeta_auto(const Matrix& a, Index s, ZetaSide side) {
  const Index dim = side == ZetaSide::plain ? a.cols() : a.rows();
  s = std::clamp<Index>(s, 1, dim);
  const ZetaMode mode = subset_count(dim, s) <= kZetaSubsetBudget ? ZetaMode::exact : ZetaMode::bound;
  return zeta_restricted(a, s, side, mode);
}

// --- distortion diagnostics -----------------------------------------------------

namespace {

// R R^T x - x
Vector deviation(const Matrix& r, const Vector& x) { return r * (r.transpose() * x) - x; }

}  // namespace

double rho_lambda(const SaddleProblem& problem, const ProjectionMatrix& r, const Vector& w_star) {
  require_size(r.rows(), problem.n(), "rho_lambda: projection rows");
  return deviation(r.entries(), problem.a().transpose_times(w_star)).lpNorm<Eigen::Infinity>();
}

RhoDiagnostics rho_diagnostics(const SketchedProblem& sp, const Vector& w_star, const Vector& lambda_star) {
  const SaddleProblem& p = sp.base();
  require_size(w_star.size(), p.d(), "rho_diagnostics: w_star");
  require_size(lambda_star.size(), p.n(), "rho_diagnostics: lambda_star");
  const Matrix& r = sp.projection().entries();
  const auto k = sp.coupling();
  RhoDiagnostics out;
  if (sp.side() == SketchSide::right) {
    out.rho_lambda = deviation(r, p.a().transpose_times(w_star)).lpNorm<Eigen::Infinity>();
    const auto [lo, hi] = p.bounds_lambda();
    out.pseudo_solution = minimize_linear_tilt(p.h(), k->apply_adjoint(w_star), sp.gamma_lambda(), lo, hi);
    out.composite_distortion = p.a().times(deviation(r, lambda_star)).lpNorm<Eigen::Infinity>();
    out.composite_pseudo = k->apply(lambda_star - out.pseudo_solution).lpNorm<Eigen::Infinity>();
    out.rho_w = out.composite_distortion + out.composite_pseudo;
  } else {
    out.rho_w = deviation(r, p.a().times(lambda_star)).lpNorm<Eigen::Infinity>();
    const auto [lo, hi] = p.bounds_w();
    out.pseudo_solution = minimize_linear_tilt(p.g(), -k->apply(lambda_star), sp.gamma_w(), lo, hi);
    out.composite_distortion = p.a().transpose_times(deviation(r, w_star)).lpNorm<Eigen::Infinity>();
    out.composite_pseudo = k->apply_adjoint(w_star - out.pseudo_solution).lpNorm<Eigen::Infinity>();
    out.rho_lambda = out.composite_distortion + out.composite_pseudo;
  }
  out.gamma_lambda_ok = sp.gamma_lambda() >= 2.0 * out.rho_lambda;
  out.gamma_w_ok = sp.gamma_w() >= 2.0 * out.rho_w;
  return out;
}

double projection_deviation_norm(const ProjectionMatrix& r) {
  if (r.rows() > kMaterializationBudget) {
    throw BudgetExceeded("projection_deviation_norm: R R^T would exceed the 2000 x 2000 budget");
  }
  Matrix dev = r.entries() * r.entries().transpose();
  dev.diagonal().array() -= 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dev, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double dual_error_bound(const SketchedProblem& sp, const Vector& w_hat, const Vector& w_star, Index s_lambda) {
  if (sp.side() != SketchSide::right) throw std::invalid_argument("dual_error_bound: needs a right sketch");
  const SaddleProblem& p = sp.base();
  require_size(w_hat.size(), p.d(), "dual_error_bound: w_hat");
  require_size(w_star.size(), p.d(), "dual_error_bound: w_star");
  if (s_lambda < 0) throw std::invalid_argument("dual_error_bound: s_lambda must be nonnegative");
  const double beta = p.beta();
  const double spread = projection_deviation_norm(sp.projection());
  const double coupled = p.a().transpose_times(w_hat - w_star).norm();
  return 3.0 * sp.gamma_lambda() * std::sqrt(static_cast<double>(s_lambda)) / beta +
         (2.0 / beta) * (1.0 + spread) * coupled;
}

}  // namespace sketchsaddle
