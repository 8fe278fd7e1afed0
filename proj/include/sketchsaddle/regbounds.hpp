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

#include <optional>
#include <string_view>

#include "sketchsaddle/model.hpp"
#include "sketchsaddle/sketch.hpp"

namespace sketchsaddle {

/// Regularization prescriptions.
///  - right_w:        right sketch, recovers w (gamma_lambda from ||A^T w*||).
///  - left_lambda:    left sketch, recovers lambda (mirror image of right_w).
///  - right_w_kkt:    right_w plus 2 varsigma on both parameters, for sparse
///                    pairs that satisfy the stationarity conditions only to
///                    within varsigma in the infinity norm.
///  - right_lambda:   right sketch, recovers lambda; needs zeta_{A^T}(16 s_w).
///  - left_w:         left sketch, recovers w; needs zeta_A(16 s_lambda).
///  - right_w_close:  right_w plus 2(1 + mu) tau, for sparse pairs within tau
///                    of a dense optimum of mu-smooth g, h.
///  - right_w_rate:   right_w with the correction factor 1 + 7 sqrt(...) of
///                    the gamma_w term dropped, so both parameters scale as
///                    m^(-1/2). Not a guarantee; used for rate sweeps.
enum class Prescription { right_w, left_lambda, right_w_kkt, right_lambda, left_w, right_w_close, right_w_rate };

std::string_view to_string(Prescription p);
Prescription parse_prescription(std::string_view name);

/// Sketch side a prescription is designed for.
SketchSide prescription_side(Prescription p);

/// Ground-truth quantities; absent fields are reported by name when a
/// prescription needs them.
struct OracleQuantities {
  std::optional<Vector> w_star;
  std::optional<Vector> lambda_star;
  std::optional<Index> s_w;
  std::optional<Index> s_lambda;
  std::optional<double> norm_ATw;  // ||A^T w*||_2
  std::optional<double> norm_Al;   // ||A lambda*||_2
  std::optional<double> norm_w;    // ||w*||_2
  std::optional<double> norm_l;    // ||lambda*||_2

  /// Everything filled from a problem and a known sparse pair.
  static OracleQuantities from_pair(const SaddleProblem& problem, const Vector& w_star, const Vector& lambda_star,
                                    double eps0 = kDefaultSparsityThreshold);
};

/// Inputs a prescription was evaluated from. Fields the prescription does not
/// need stay empty.
struct PrescriptionInputs {
  double c = kDefaultJlConstant;
  double delta = 0.05;
  Index m = 0;
  std::optional<Index> n;
  std::optional<Index> d;
  std::optional<Index> s_w;
  std::optional<Index> s_lambda;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> norm_ATw;
  std::optional<double> norm_Al;
  std::optional<double> norm_w;
  std::optional<double> norm_l;
  std::optional<double> varsigma;
  std::optional<double> tau;
  std::optional<double> mu;
  std::optional<double> zeta;
};

struct RegPrescription {
  Prescription rule = Prescription::right_w;
  double gamma_w = 0.0;
  double gamma_lambda = 0.0;
  PrescriptionInputs inputs_used;
  double scale_factor = 1.0;
};

/// Problem-side parameters and extras for prescribe_regularization.
struct PrescriptionRequest {
  Prescription rule = Prescription::right_w;
  double c = kDefaultJlConstant;
  double delta = 0.05;
  Index m = 0;
  Index d = 0;
  Index n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> varsigma;
  std::optional<double> tau;
  std::optional<double> mu;
  std::optional<double> zeta;
  double scale_factor = 1.0;
  /// Skip the m >= minimum_sketch_size(c, delta) precondition.
  bool allow_small_m = false;
};

/// ceil(4 c log(4 / delta)).
Index minimum_sketch_size(double c, double delta);

/// Parameters at the tight end of the chosen inequalities, times scale_factor.
/// Throws std::invalid_argument naming the first missing field, and
/// PreconditionError when m is below minimum_sketch_size.
RegPrescription prescribe_regularization(const PrescriptionRequest& request, const OracleQuantities& oracle);

/// Re-evaluates (gamma_w, gamma_lambda) from inputs_used alone.
std::pair<double, double> evaluate_prescription(Prescription rule, const PrescriptionInputs& inputs,
                                                double scale_factor);

enum class ZetaSide { plain, transpose };  // plain: zeta_A over columns; transpose: zeta_{A^T} over rows
enum class ZetaMode { exact, bound };

inline constexpr double kZetaSubsetBudget = 1e6;
inline constexpr Index kMaterializationBudget = 2000;

/// Largest ||A z|| / ||z|| (plain) or ||A^T z|| / ||z|| (transpose) over
/// s-sparse z. exact: maximum top singular value over all s-column (row)
/// submatrices; bound: sqrt(s) times the largest column (row) norm, capped
/// by ||A||_2 when the matrix is small enough to decompose
/// (min(d, n) <= kMaterializationBudget).
/// Throws BudgetExceeded when exact mode would enumerate more than
/// kZetaSubsetBudget subsets.
double zeta_restricted(const Matrix& a, Index s, ZetaSide side, ZetaMode mode);

/// Exact when affordable, bound mode otherwise; s is clamped to the
/// dimension. Used to fill the zeta input of right_lambda / left_w.
double zeta_auto(const Matrix& a, Index s, ZetaSide side);

/// Number of s-subsets of a dim-set, saturating at +inf.
double subset_count(Index dim, Index s);

/// Distortion terms whose doubles lower-bound the l1 weights that make the
/// sparse pair recoverable.
///
/// Right sketch (K = A R R^T):
///   rho_lambda = ||(R R^T - I) A^T w*||_inf
///   rho_w      = ||A (I - R R^T) lambda*||_inf + ||A R R^T (lambda* - lambda~)||_inf
/// with lambda~ = argmin_lambda h(lambda) + (K^T w*)^T lambda + gamma_lambda ||lambda||_1.
/// The left sketch swaps the roles of w and lambda.
struct RhoDiagnostics {
  double rho_lambda = 0.0;
  double rho_w = 0.0;
  // The two-term quantity (rho_w for right, rho_lambda for left), split:
  double composite_distortion = 0.0;  // term without the pseudo-problem
  double composite_pseudo = 0.0;      // term through the pseudo-problem solution
  Vector pseudo_solution;         // lambda~ (right) or w~ (left)
  bool gamma_lambda_ok = false;   // gamma_lambda >= 2 rho_lambda
  bool gamma_w_ok = false;        // gamma_w >= 2 rho_w
};

RhoDiagnostics rho_diagnostics(const SketchedProblem& sp, const Vector& w_star, const Vector& lambda_star);

/// Only ||(R R^T - I) A^T w*||_inf, with no pseudo-problem solve.
double rho_lambda(const SaddleProblem& problem, const ProjectionMatrix& r, const Vector& w_star);

/// 3 gamma_lambda sqrt(s_lambda)/beta + (2/beta)(1 + ||R R^T - I||_2) ||A^T (w_hat - w*)||_2
/// for a right sketch. Throws BudgetExceeded when n > kMaterializationBudget.
double dual_error_bound(const SketchedProblem& sp, const Vector& w_hat, const Vector& w_star, Index s_lambda);

/// ||R R^T - I||_2 computed from the materialized square matrix.
double projection_deviation_norm(const ProjectionMatrix& r);

}  // namespace sketchsaddle
