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

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "sketchsaddle/sketch.hpp"
#include "test_util.hpp"

namespace sketchsaddle {
namespace {

using testing::random_matrix;
using testing::random_vector;

std::shared_ptr<const SaddleProblem> quadratic_with(const Matrix& a) {
  return std::make_shared<const SaddleProblem>(ConvexFn::quadratic(Vector::Zero(a.rows()), 1.0),
                                               ConvexFn::quadratic(Vector::Zero(a.cols()), 1.0),
                                               std::make_shared<const CouplingMatrix>(a));
}

TEST(MakeProjection, RademacherEntriesAreHalves) {
  const ProjectionMatrix r = make_projection(4, 4, Distribution::rademacher, 7);
  EXPECT_EQ(r.rows(), 4);
  EXPECT_EQ(r.m(), 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_TRUE(r.entries()(i, j) == 0.5 || r.entries()(i, j) == -0.5);
}

TEST(MakeProjection, GaussianColumnVarianceIsOneOverM) {
  const Index m = 50;
  const ProjectionMatrix r = make_projection(1000, m, Distribution::gaussian, 1);
  for (Index j = 0; j < m; ++j) {
    const auto col = r.entries().col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / double(col.size() - 1);
    EXPECT_NEAR(var, 1.0 / m, 0.2 / m) << "column " << j;
  }
}

TEST(MakeProjection, SameSeedSameMatrix) {
  for (Distribution dist : {Distribution::gaussian, Distribution::rademacher, Distribution::database_friendly}) {
    const ProjectionMatrix a = make_projection(37, 11, dist, 99);
    const ProjectionMatrix b = make_projection(37, 11, dist, 99);
    EXPECT_EQ(a.entries(), b.entries());
    EXPECT_EQ(a.distribution(), dist);
    EXPECT_NE(a.entries(), make_projection(37, 11, dist, 100).entries());
  }
}

TEST(MakeProjection, ZeroDimensionsRejected) {
  EXPECT_THROW(make_projection(0, 3, Distribution::gaussian, 1), std::invalid_argument);
  EXPECT_THROW(make_projection(3, 0, Distribution::gaussian, 1), std::invalid_argument);
}

TEST(MakeProjection, WiderDrawExtendsNarrowerOne) {
  const ProjectionMatrix wide = make_projection(20, 8, Distribution::gaussian, 5);
  const ProjectionMatrix narrow = make_projection(20, 3, Distribution::gaussian, 5);
  // Same S entries, different 1/sqrt(m) scale.
  const Matrix s_wide = wide.entries().leftCols(3) * std::sqrt(8.0);
  const Matrix s_narrow = narrow.entries() * std::sqrt(3.0);
  EXPECT_LE((s_wide - s_narrow).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MakeProjection, DatabaseFriendlyFrequencies) {
  const Index rows = 300, m = 100;
  const ProjectionMatrix r = make_projection(rows, m, Distribution::database_friendly, 3);
  const double scaled = std::sqrt(3.0) / std::sqrt(double(m));
  long plus = 0, minus = 0, zero = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double v = r.entries()(i, j);
      if (v == 0.0) {
        ++zero;
      } else if (std::abs(v - scaled) < 1e-15) {
        ++plus;
      } else if (std::abs(v + scaled) < 1e-15) {
        ++minus;
      } else {
        ADD_FAILURE() << "unexpected entry " << v;
      }
    }
  }
  const double total = double(rows * m);
  auto within = [&](long count, double p) {
    const double se = std::sqrt(p * (1 - p) / total);
    return std::abs(count / total - p) <= 3 * se;
  };
  EXPECT_TRUE(within(plus, 1.0 / 6.0));
  EXPECT_TRUE(within(minus, 1.0 / 6.0));
  EXPECT_TRUE(within(zero, 2.0 / 3.0));
}

TEST(MakeProjection, SaveLoadRoundTrip) {
  const ProjectionMatrix r = make_projection(9, 4, Distribution::database_friendly, 42);
  const auto path = std::filesystem::temp_directory_path() / "sketchsaddle_projection.mtx";
  save_projection(path, r);
  const ProjectionMatrix back = load_projection(path);
  EXPECT_EQ(back.entries(), r.entries());
  EXPECT_EQ(back.seed(), 42u);
  EXPECT_EQ(back.distribution(), Distribution::database_friendly);
}

TEST(ApplySketch, IdentityReproducesBilinearForm) {
  const Matrix a = Matrix::Identity(2, 2);
  const SketchedProblem sp =
      apply_sketch(quadratic_with(a), ProjectionMatrix::from_entries(Matrix::Identity(2, 2)), SketchSide::right);
  EXPECT_EQ(sp.a_hat(), a);
  Rng rng(1);
  const auto k = sp.coupling();
  for (int rep = 0; rep < 10; ++rep) {
    const Vector w = random_vector(rng, 2), l = random_vector(rng, 2);
    EXPECT_NEAR(w.dot(k->apply(l)), w.dot(a * l), 1e-15);
  }
}

TEST(ApplySketch, RightMatchesDenseTripleProduct) {
  Rng rng(2);
  const Matrix a = random_matrix(rng, 10, 20);
  const ProjectionMatrix r = make_projection(20, 5, Distribution::gaussian, 3);
  const SketchedProblem sp = apply_sketch(quadratic_with(a), r, SketchSide::right);
  const Matrix& rr = r.entries();
  EXPECT_LE((sp.a_hat() - a * rr).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix triple = (a * rr) * rr.transpose();
  const auto k = sp.coupling();
  for (int rep = 0; rep < 20; ++rep) {
    const Vector l = random_vector(rng, 20);
    EXPECT_LE((k->apply(l) - triple * l).cwiseAbs().maxCoeff(), 1e-10);
    const Vector w = random_vector(rng, 10);
    EXPECT_LE((k->apply_adjoint(w) - triple.transpose() * w).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ApplySketch, LeftMatchesDenseTripleProduct) {
  Rng rng(3);
  const Matrix a = random_matrix(rng, 10, 20);
  const ProjectionMatrix r = make_projection(10, 3, Distribution::rademacher, 4);
  const SketchedProblem sp = apply_sketch(quadratic_with(a), r, SketchSide::left);
  const Matrix& rr = r.entries();
  EXPECT_EQ(sp.a_hat().rows(), 3);
  const Matrix triple = rr * (rr.transpose() * a);
  const auto k = sp.coupling();
  for (int rep = 0; rep < 20; ++rep) {
    const Vector w = random_vector(rng, 10), l = random_vector(rng, 20);
    EXPECT_NEAR(w.dot(k->apply(l)), w.dot(triple * l), 1e-10);
  }
}

TEST(ApplySketch, DimensionMismatchRejected) {
  Rng rng(4);
  const auto p = quadratic_with(random_matrix(rng, 4, 6));
  EXPECT_THROW(apply_sketch(p, make_projection(4, 2, Distribution::gaussian, 1), SketchSide::right),
               std::invalid_argument);
  EXPECT_THROW(apply_sketch(p, make_projection(6, 2, Distribution::gaussian, 1), SketchSide::left),
               std::invalid_argument);
}

TEST(ApplySketch, RegularizationIsNonnegative) {
  Rng rng(5);
  const SketchedProblem sp = apply_sketch(quadratic_with(random_matrix(rng, 3, 3)),
                                          make_projection(3, 2, Distribution::gaussian, 1), SketchSide::right);
  EXPECT_THROW(sp.with_regularization(-1.0, 0.0), std::invalid_argument);
  const SketchedProblem reg = sp.with_regularization(0.25, 0.5);
  EXPECT_EQ(reg.gamma_w(), 0.25);
  EXPECT_EQ(reg.gamma_lambda(), 0.5);
  EXPECT_EQ(reg.a_hat(), sp.a_hat());
}

TEST(JlFailureRate, GaussianBelowTailBound) {
  const double rate = jl_failure_rate(Distribution::gaussian, 1000, 200, 0.5, 10000, 77);
  EXPECT_LE(rate, jl_tail_bound(200, 0.5, 8.0));
  EXPECT_NEAR(jl_tail_bound(200, 0.5, 8.0), 2 * std::exp(-200 * 0.25 / 8), 1e-15);
}

TEST(JlFailureRate, NoFailuresAtLargeM) {
  for (Distribution dist : {Distribution::gaussian, Distribution::rademacher, Distribution::database_friendly}) {
    EXPECT_EQ(jl_failure_rate(dist, 200, 2000, 0.5, 1000, 9), 0.0);
  }
}

TEST(JlFailureRate, ZeroVectorNeverFails) {
  EXPECT_EQ(jl_failure_rate(Distribution::gaussian, Vector::Zero(50), 5, 0.1, 1000, 1), 0.0);
}

TEST(JlFailureRate, ArgumentChecks) {
  EXPECT_THROW(jl_failure_rate(Distribution::gaussian, 10, 5, 0.0, 1000, 1), std::invalid_argument);
  EXPECT_THROW(jl_failure_rate(Distribution::gaussian, 10, 5, 0.6, 1000, 1), std::invalid_argument);
  EXPECT_THROW(jl_failure_rate(Distribution::gaussian, 10, 5, 0.5, 999, 1), ContractViolation);
}

TEST(JlFailureRate, IndependentOfThreadCount) {
  EXPECT_EQ(jl_failure_rate(Distribution::rademacher, 300, 20, 0.3, 1000, 4, 1),
            jl_failure_rate(Distribution::rademacher, 300, 20, 0.3, 1000, 4, 4));
}

TEST(NormPreservation, FixedProjectionManyVectors) {
  const double c = kDefaultJlConstant;
  const Index m = static_cast<Index>(std::ceil(4 * c * std::log(4 / 0.01)));
  const Index n = 500;
  const ProjectionMatrix r = make_projection(n, m, Distribution::gaussian, 12);
  Rng rng(13);
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Vector x = random_vector(rng, n).normalized();
    const double sq = (r.entries().transpose() * x).squaredNorm();
    if (sq < 0.5 || sq > 1.5) ++violations;
  }
  EXPECT_LE(violations, 10);
}

TEST(InnerProduct, OrthonormalSquareHasNoDistortion) {
  Rng rng(6);
  const Matrix q = random_matrix(rng, 8, 8).householderQr().householderQ();
  const ProjectionMatrix r = ProjectionMatrix::from_entries(q);
  const Vector u = random_vector(rng, 8);
  EXPECT_LE(inner_product_distortion(r, u, u), 1e-12);
}

TEST(InnerProduct, OrthogonalPairMatchesDenseProduct) {
  Rng rng(7);
  const ProjectionMatrix r = make_projection(30, 6, Distribution::gaussian, 8);
  Vector u = random_vector(rng, 30), v = random_vector(rng, 30);
  v -= v.dot(u) / u.squaredNorm() * u;
  const Matrix rr = r.entries() * r.entries().transpose();
  EXPECT_NEAR(inner_product_distortion(r, u, v), std::abs(u.dot(rr * v)), 1e-12);
}

TEST(InnerProduct, PositivelyHomogeneous) {
  Rng rng(8);
  const ProjectionMatrix r = make_projection(15, 4, Distribution::database_friendly, 2);
  const Vector u = random_vector(rng, 15), v = random_vector(rng, 15);
  EXPECT_NEAR(inner_product_distortion(r, 3.5 * u, v), 3.5 * inner_product_distortion(r, u, v), 1e-12);
}

TEST(InnerProduct, LengthMismatchRejected) {
  const ProjectionMatrix r = make_projection(5, 2, Distribution::gaussian, 1);
  EXPECT_THROW(inner_product_distortion(r, Vector::Zero(4), Vector::Zero(5)), ContractViolation);
}

const JlGrid kDeskGrid{{100, 200, 400, 800}, {0.1, 0.2, 0.3, 0.4, 0.5}};

TEST(CalibrateC, GaussianInExpectedRange) {
  const Calibration cal = calibrate_c(Distribution::gaussian, 1000, kDeskGrid, 1000, 31);
  EXPECT_GE(cal.c, 4.0);
  EXPECT_LE(cal.c, 12.0);
  EXPECT_EQ(cal.cells.size(), 20u);
}

TEST(CalibrateC, RademacherFinite) {
  const Calibration cal = calibrate_c(Distribution::rademacher, 1000, kDeskGrid, 1000, 32);
  EXPECT_TRUE(std::isfinite(cal.c));
  EXPECT_GT(cal.c, 0.0);
}

TEST(CalibrateC, HugeMHitsFloor) {
  const Calibration cal = calibrate_c(Distribution::gaussian, 200, JlGrid{{4000}, {0.5}}, 100, 33);
  EXPECT_GT(cal.c, 0.0);
  EXPECT_LE(cal.c, 2 * kMinCalibratedC);
}

TEST(CalibrateC, EmptyGridRejected) {
  EXPECT_THROW(calibrate_c(Distribution::gaussian, 10, JlGrid{}, 10, 1), std::invalid_argument);
}

}  // namespace
}  // namespace sketchsaddle
