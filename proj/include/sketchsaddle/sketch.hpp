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
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "sketchsaddle/model.hpp"
#include "sketchsaddle/operator.hpp"
#include "sketchsaddle/random.hpp"

namespace sketchsaddle {

/// Entry distributions of S in R = S / sqrt(m). All three are zero-mean,
/// unit-variance and sub-gaussian.
enum class Distribution { gaussian, rademacher, database_friendly };

std::string_view to_string(Distribution dist);
Distribution parse_distribution(std::string_view name);

/// Constant of the norm-preservation tail 2 exp(-m eps^2 / c) used when no
/// calibrated value is supplied.
inline constexpr double kDefaultJlConstant = 8.0;

/// Sequential stream of unscaled S entries. make_projection fills R column by
/// column from this stream, so the first k columns of a wider draw equal the
/// draw with k columns.
class EntryStream {
 public:
  EntryStream(Distribution dist, std::uint64_t seed) : dist_(dist), rng_(seed) {}

  double next() {
    switch (dist_) {
      case Distribution::gaussian:
        return rng_.normal();
      case Distribution::rademacher: {
        if (bits_left_ == 0) {
          bits_ = rng_.next_u64();
          bits_left_ = 64;
        }
        const double v = (bits_ & 1u) != 0 ? 1.0 : -1.0;
        bits_ >>= 1;
        --bits_left_;
        return v;
      }
      case Distribution::database_friendly: {
        const double u = rng_.uniform();
        if (u < 1.0 / 6.0) return kSqrt3;
        if (u < 2.0 / 6.0) return -kSqrt3;
        return 0.0;
      }
    }
    return 0.0;
  }

 private:
  static constexpr double kSqrt3 = 1.7320508075688772;
  Distribution dist_;
  Rng rng_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

/// Random projection R = S / sqrt(m) (rows x m), immutable.
class ProjectionMatrix {
 public:
  /// Wraps an explicit matrix (e.g. an identity or orthonormal test sketch).
  static ProjectionMatrix from_entries(Matrix entries);

  const Matrix& entries() const { return *entries_; }
  const std::shared_ptr<const Matrix>& entries_ptr() const { return entries_; }
  /// Empty for matrices supplied through from_entries.
  std::optional<Distribution> distribution() const { return distribution_; }
  std::uint64_t seed() const { return seed_; }
  Index rows() const { return entries_->rows(); }
  Index m() const { return entries_->cols(); }
  double scale() const { return 1.0 / std::sqrt(static_cast<double>(m())); }

 private:
  friend ProjectionMatrix make_projection(Index, Index, Distribution, std::uint64_t);
  friend ProjectionMatrix load_projection(const std::filesystem::path&);
  ProjectionMatrix(std::shared_ptr<const Matrix> entries, std::optional<Distribution> dist, std::uint64_t seed)
      : entries_(std::move(entries)), distribution_(dist), seed_(seed) {}

  std::shared_ptr<const Matrix> entries_;
  std::optional<Distribution> distribution_;
  std::uint64_t seed_ = 0;
};

ProjectionMatrix make_projection(Index rows, Index m, Distribution dist, std::uint64_t seed);

/// Matrix Market with `distribution`, `seed` and `m` header comments.
void save_projection(const std::filesystem::path& path, const ProjectionMatrix& r);
ProjectionMatrix load_projection(const std::filesystem::path& path);

/// right: coupling w^T (A R) R^T lambda.  left: coupling w^T R (R^T A) lambda.
enum class SketchSide { right, left };

std::string_view to_string(SketchSide side);
SketchSide parse_side(std::string_view name);

/// Sketched l1-regularized saddle problem. Only A_hat and R are stored; the
/// d x n product is never formed.
class SketchedProblem {
 public:
  SketchedProblem(std::shared_ptr<const SaddleProblem> base, ProjectionMatrix r,
                  std::shared_ptr<const Matrix> a_hat, SketchSide side, double gamma_w = 0.0,
                  double gamma_lambda = 0.0);

  const SaddleProblem& base() const { return *base_; }
  const std::shared_ptr<const SaddleProblem>& base_ptr() const { return base_; }
  const ProjectionMatrix& projection() const { return r_; }
  const Matrix& a_hat() const { return *a_hat_; }
  SketchSide side() const { return side_; }
  double gamma_w() const { return gamma_w_; }
  double gamma_lambda() const { return gamma_lambda_; }

  SketchedProblem with_regularization(double gamma_w, double gamma_lambda) const;

  /// The factored coupling operator.
  std::unique_ptr<BilinearOperator> coupling() const;

 private:
  std::shared_ptr<const SaddleProblem> base_;
  ProjectionMatrix r_;
  std::shared_ptr<const Matrix> a_hat_;
  SketchSide side_;
  double gamma_w_;
  double gamma_lambda_;
};

/// A_hat = A R (right, R is n x m) or R^T A (left, R is d x m).
SketchedProblem apply_sketch(std::shared_ptr<const SaddleProblem> problem, const ProjectionMatrix& r,
                             SketchSide side);

/// Fraction of independent R draws (trial t uses seed derive_seed(seed, t))
/// for which ||R^T x||^2 leaves [(1 - eps)||x||^2, (1 + eps)||x||^2].
double jl_failure_rate(Distribution dist, const Vector& x, Index m, double eps, long trials,
                       std::uint64_t seed, unsigned threads = 0);

/// Same with x a fixed random unit vector of length n drawn from `seed`.
double jl_failure_rate(Distribution dist, Index n, Index m, double eps, long trials, std::uint64_t seed,
                       unsigned threads = 0);

/// Tail bound 2 exp(-m eps^2 / c).
double jl_tail_bound(Index m, double eps, double c);

/// |u^T R R^T v - u^T v|.
double inner_product_distortion(const ProjectionMatrix& r, const Vector& u, const Vector& v);

struct JlGrid {
  std::vector<Index> m_values;
  std::vector<double> eps_values;
};

struct CalibrationCell {
  Index m;
  double eps;
  double failure_rate;
  double required_c;  // 0 when no failure was observed
};

struct Calibration {
  double c;
  std::vector<CalibrationCell> cells;
};

/// Smallest positive floor returned by calibrate_c.
inline constexpr double kMinCalibratedC = 1e-3;

/// Calibrates the tail constant: for every grid cell, the smallest c with
/// empirical failure rate <= 2 exp(-m eps^2 / c); the returned c is twice the
/// largest of these (Monte Carlo safety margin), floored at kMinCalibratedC.
/// One trial draws S with max(m) columns and reuses its leading columns for
/// the smaller m values.
Calibration calibrate_c(Distribution dist, long trials, const JlGrid& grid, Index n = 1000,
                        std::uint64_t seed = 0x5eed, unsigned threads = 0);

}  // namespace sketchsaddle
