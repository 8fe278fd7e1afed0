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

#include <gtest/gtest.h>

#include "sketchsaddle/model.hpp"
#include "test_util.hpp"

namespace sketchsaddle {
namespace {

using testing::random_matrix;
using testing::random_vector;

std::shared_ptr<const CouplingMatrix> zeros(Index d, Index n) {
  return std::make_shared<const CouplingMatrix>(Matrix(Matrix::Zero(d, n)));
}

TEST(Evaluators, HalfSquaredNormAtThreeFour) {
  SaddleProblem p(ConvexFn::quadratic(Vector::Zero(2), 1.0), ConvexFn::quadratic(Vector::Zero(1), 1.0), zeros(2, 1));
  const Vector w{{3.0, 4.0}};
  EXPECT_DOUBLE_EQ(eval_g(p, w), 12.5);
  EXPECT_EQ(grad_g(p, w), w);
}

TEST(Evaluators, ZeroAtCenter) {
  const Vector c{{0.3, -1.2, 4.0}};
  SaddleProblem p(ConvexFn::quadratic(c, 3.0), ConvexFn::quadratic(Vector::Zero(2), 1.0), zeros(3, 2));
  EXPECT_EQ(eval_g(p, c), 0.0);
  EXPECT_EQ(grad_g(p, c).norm(), 0.0);
}

TEST(Evaluators, ModulusTwoOffCenter) {
  SaddleProblem p(ConvexFn::quadratic(Vector{{1.0, 0.0}}, 2.0), ConvexFn::quadratic(Vector::Zero(1), 1.0),
                  zeros(2, 1));
  const Vector w = Vector::Zero(2);
  // (2/2) * ||(0,0) - (1,0)||^2 and 2 * (w - c)
  EXPECT_DOUBLE_EQ(eval_g(p, w), 1.0);
  EXPECT_DOUBLE_EQ(grad_g(p, w)[0], -2.0);
  EXPECT_DOUBLE_EQ(grad_g(p, w)[1], 0.0);
}

TEST(Evaluators, DimensionMismatchIsContractViolation) {
  SaddleProblem p(ConvexFn::quadratic(Vector::Zero(2), 1.0), ConvexFn::quadratic(Vector::Zero(3), 1.0), zeros(2, 3));
  EXPECT_THROW(eval_g(p, Vector::Zero(3)), ContractViolation);
  EXPECT_THROW(grad_h(p, Vector::Zero(2)), ContractViolation);
  EXPECT_THROW(kkt_residual(p, Vector::Zero(2), Vector::Zero(2)), ContractViolation);
}

TEST(Evaluators, HMirrorsG) {
  SaddleProblem p(ConvexFn::quadratic(Vector::Zero(1), 1.0), ConvexFn::quadratic(Vector{{1.0, 2.0}}, 4.0),
                  zeros(1, 2));
  EXPECT_DOUBLE_EQ(eval_h(p, Vector::Zero(2)), 10.0);
  EXPECT_DOUBLE_EQ(grad_h(p, Vector::Zero(2))[1], -8.0);
}

TEST(ProblemInvariants, AlphaBetaAreModuli) {
  SaddleProblem p(ConvexFn::quadratic(Vector::Zero(2), 0.7), ConvexFn::quadratic(Vector::Zero(3), 2.5), zeros(2, 3));
  EXPECT_EQ(p.alpha(), 0.7);
  EXPECT_EQ(p.beta(), 2.5);
}

TEST(ProblemInvariants, DeclaredNormBoundIsEnforced) {
  Matrix a = Matrix::Identity(3, 3);
  a(0, 1) = 1.0;  // row 0 has norm sqrt(2), columns bounded by sqrt(2) too
  auto am = std::make_shared<const CouplingMatrix>(a);
  auto g = ConvexFn::quadratic(Vector::Zero(3), 1.0);
  EXPECT_THROW(SaddleProblem(g, g, am, Domain::all_space(), Domain::all_space(), NormBound::rows),
               std::invalid_argument);
  EXPECT_NO_THROW(SaddleProblem(g, g, std::make_shared<const CouplingMatrix>(Matrix(Matrix::Identity(3, 3))),
                                Domain::all_space(), Domain::all_space(), NormBound::both));
}

TEST(ProblemInvariants, NonPositiveModulusRejected) {
  auto g = ConvexFn::quadratic(Vector::Zero(2), 1.0);
  auto h0 = ConvexFn::quadratic(Vector::Zero(2), 0.0);
  EXPECT_THROW(SaddleProblem(g, h0, zeros(2, 2)), std::invalid_argument);
}

TEST(Kkt, DecoupledProblemAtCenters) {
  const Vector a{{1.0, -2.0}};
  const Vector b{{0.5, 0.0, 3.0}};
  SaddleProblem p(ConvexFn::quadratic(a, 1.0), ConvexFn::quadratic(b, 2.0), zeros(2, 3));
  const KktResidual r = kkt_residual(p, a, b);
  EXPECT_EQ(r.w_inf, 0.0);
  EXPECT_EQ(r.lambda_inf, 0.0);
}

TEST(Kkt, PlantedStationaryPairHasZeroResidual) {
  Rng rng(11);
  const Index d = 12, n = 9;
  const Matrix a = random_matrix(rng, d, n);
  Vector w = Vector::Zero(d), l = Vector::Zero(n);
  w[2] = 1.1;
  w[7] = -0.6;
  l[4] = 0.9;
  const double alpha = 1.5, beta = 0.5;
  const Vector ca = w - a * l / alpha;
  const Vector cb = l + a.transpose() * w / beta;
  SaddleProblem p(ConvexFn::quadratic(ca, alpha), ConvexFn::quadratic(cb, beta),
                  std::make_shared<const CouplingMatrix>(a));
  const KktResidual r = kkt_residual(p, w, l);
  EXPECT_LE(r.max(), 1e-12);
}

// Residuals against hand-written loops over the dense entries.
TEST(Kkt, MatchesIndependentLoopOracle) {
  Rng rng(3);
  const Index d = 7, n = 5;
  auto p = testing::random_quadratic(rng, d, n, 2.0, 0.5);
  const Matrix a = p->a().to_dense();
  for (int rep = 0; rep < 10; ++rep) {
    const Vector w = random_vector(rng, d);
    const Vector l = random_vector(rng, n);
    double rw = 0.0, rl = 0.0;
    for (Index i = 0; i < d; ++i) {
      double al = 0.0;
      for (Index j = 0; j < n; ++j) al += a(i, j) * l[j];
      rw = std::max(rw, std::abs(2.0 * (w[i] - p->g().center()[i]) - al));
    }
    for (Index j = 0; j < n; ++j) {
      double atw = 0.0;
      for (Index i = 0; i < d; ++i) atw += a(i, j) * w[i];
      rl = std::max(rl, std::abs(0.5 * (l[j] - p->h().center()[j]) + atw));
    }
    const KktResidual r = kkt_residual(*p, w, l);
    EXPECT_NEAR(r.w_inf, rw, 1e-12 * (1.0 + rw));
    EXPECT_NEAR(r.lambda_inf, rl, 1e-12 * (1.0 + rl));
  }
}

TEST(Kkt, SolutionPairRecomputesResiduals) {
  Rng rng(5);
  auto p = testing::random_quadratic(rng, 4, 6);
  const Vector w = random_vector(rng, 4), l = random_vector(rng, 6);
  const SolutionPair pair = make_solution_pair(*p, w, l, 17);
  const KktResidual r = kkt_residual(*p, w, l);
  EXPECT_EQ(pair.kkt_w_inf, r.w_inf);
  EXPECT_EQ(pair.kkt_l_inf, r.lambda_inf);
  EXPECT_EQ(pair.iterations, 17);
}

TEST(Kkt, BoxUsesProjectedStationarity) {
  // g = (1/2)(w - 2)^2 on [0, 1]: optimum w = 1 with gradient -1 pushing outward.
  auto a = zeros(1, 1);
  SaddleProblem p(ConvexFn::quadratic(Vector::Constant(1, 2.0), 1.0), ConvexFn::quadratic(Vector::Zero(1), 1.0), a,
                  Domain::box(1, 0.0, 1.0));
  EXPECT_EQ(kkt_residual(p, Vector::Constant(1, 1.0), Vector::Zero(1)).w_inf, 0.0);
  EXPECT_DOUBLE_EQ(kkt_residual(p, Vector::Constant(1, 0.5), Vector::Zero(1)).w_inf, 1.5);
}

TEST(Stationarity, L1SubdifferentialDistance) {
  const Vector lo = Vector::Constant(3, -INFINITY), hi = Vector::Constant(3, INFINITY);
  const Vector x{{0.0, 0.0, 2.0}};
  const Vector q{{0.3, -1.5, -0.2}};
  // zero coordinates: max(0, |q| - 1); nonzero: |q + sign(x)|
  EXPECT_DOUBLE_EQ(stationarity_residual(q, x, 1.0, lo, hi), 0.8);
  EXPECT_DOUBLE_EQ(stationarity_residual(q, x, 0.0, lo, hi), 1.5);
}

TEST(Sparsity, SmallVectorExample) {
  const Vector x{{1.0, 0.0, 0.0, -2.0}};
  const SparsityStats s = sparsity_stats(x, 0.0);
  EXPECT_EQ(s.l0, 2);
  EXPECT_DOUBLE_EQ(s.l1, 3.0);
  EXPECT_DOUBLE_EQ(s.l2, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(s.ratio_l1_l2, 3.0 / std::sqrt(5.0));
}

TEST(Sparsity, UnitVectorRatioIsOne) {
  for (Index k : {1, 5, 100}) {
    Vector e = Vector::Zero(k);
    e[k - 1] = 1.0;
    EXPECT_EQ(sparsity_stats(e).ratio_l1_l2, 1.0);
  }
}

TEST(Sparsity, OnesRatioIsSqrtK) {
  for (Index k : {4, 9, 50}) {
    EXPECT_NEAR(sparsity_stats(Vector::Ones(k)).ratio_l1_l2, std::sqrt(double(k)), 1e-12);
  }
}

TEST(Sparsity, ThresholdIsStrict) {
  const Vector x{{1e-9, 2e-9, -1e-10}};
  EXPECT_EQ(sparsity_stats(x).l0, 1);
  EXPECT_THROW(sparsity_stats(x, -1.0), std::invalid_argument);
}

TEST(Sparsity, RatioPropertiesOnRandomVectors) {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const Index k = 1 + static_cast<Index>(rng.below(60));
    const Vector x = random_vector(rng, k);
    const SparsityStats s = sparsity_stats(x);
    EXPECT_NEAR(s.ratio_l1_l2 * s.l2, s.l1, 1e-10 * s.l1);
    EXPECT_GE(s.ratio_l1_l2, 1.0 - 1e-12);
    EXPECT_LE(s.ratio_l1_l2, std::sqrt(double(k)) + 1e-12);
  }
  EXPECT_EQ(sparsity_stats(Vector::Zero(5)).ratio_l1_l2, 0.0);
}

TEST(QuadraticProperties, GradientMatchesCentralDifferences) {
  Rng rng(21);
  const Index k = 6;
  const ConvexFn f = ConvexFn::quadratic(random_vector(rng, k), 1.7);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector x = random_vector(rng, k);
    const Vector g = f.gradient(x);
    for (Index i = 0; i < k; ++i) {
      const double h = 1e-5;
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (f.value(xp) - f.value(xm)) / (2 * h);
      EXPECT_LE(std::abs(fd - g[i]), 1e-6 * std::max(1.0, std::abs(g[i])));
    }
  }
}

TEST(QuadraticProperties, StrongConvexityInequality) {
  Rng rng(22);
  const Index k = 5;
  const double mod = 0.8;
  const ConvexFn f = ConvexFn::quadratic(random_vector(rng, k), mod);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector x = random_vector(rng, k), y = random_vector(rng, k);
    const double slack = f.value(y) - f.value(x) - f.gradient(x).dot(y - x) - 0.5 * mod * (y - x).squaredNorm();
    EXPECT_GE(slack, -1e-10);
  }
}

TEST(ConjugateProperties, DeclaredSmoothnessHoldsOnSampledPairs) {
  Rng rng(23);
  const ConvexFn f = ConvexFn::separable_conjugate(Loss::squared_hinge, 4);
  ASSERT_TRUE(f.smoothness().has_value());
  for (int rep = 0; rep < 100; ++rep) {
    Vector x(4), y(4);
    for (Index i = 0; i < 4; ++i) {
      x[i] = rng.uniform(-5.0, 0.0);
      y[i] = rng.uniform(-5.0, 0.0);
    }
    EXPECT_LE((f.gradient(x) - f.gradient(y)).norm(), *f.smoothness() * (x - y).norm() + 1e-12);
  }
}

TEST(Coupling, SparseAndDenseStorageAgree) {
  Rng rng(4);
  Matrix a = random_matrix(rng, 8, 6);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (rng.uniform() < 0.6) a(i, j) = 0.0;
  const CouplingMatrix dense(a);
  const CouplingMatrix sparse(SparseMatrix(a.sparseView()));
  EXPECT_TRUE(sparse.is_sparse());
  const Vector l = random_vector(rng, 6), w = random_vector(rng, 8);
  EXPECT_LE((dense.times(l) - sparse.times(l)).norm(), 1e-12);
  EXPECT_LE((dense.transpose_times(w) - sparse.transpose_times(w)).norm(), 1e-12);
  EXPECT_LE((dense.row_norms() - sparse.row_norms()).norm(), 1e-12);
  EXPECT_LE((dense.col_norms() - sparse.col_norms()).norm(), 1e-12);
  EXPECT_EQ(sparse.to_dense(), a);
}

TEST(Coupling, AutomaticIsDenseAtDeskScale) {
  EXPECT_FALSE(CouplingMatrix::automatic(Matrix::Ones(10, 10)).is_sparse());
}

TEST(Domains, BoxBoundsAndAllSpace) {
  const auto [lo, hi] = Domain::all_space().bounds(3);
  EXPECT_TRUE(std::isinf(lo[0]) && lo[0] < 0);
  EXPECT_TRUE(std::isinf(hi[2]) && hi[2] > 0);
  const Domain b = Domain::box(2, -1.0, 0.0);
  EXPECT_TRUE(b.is_box());
  EXPECT_EQ(b.bounds(2).first[1], -1.0);
  EXPECT_THROW(Domain::box(Vector::Zero(2), Vector::Constant(2, -1.0)), std::invalid_argument);
}

TEST(Domains, ConjugateNaturalBoundsIntersectDomain) {
  auto a = zeros(1, 3);
  SaddleProblem p(ConvexFn::quadratic(Vector::Zero(1), 1.0), ConvexFn::separable_conjugate(Loss::logistic, 3), a,
                  Domain::all_space(), Domain::box(3, -0.5, 5.0));
  const auto [lo, hi] = p.bounds_lambda();
  EXPECT_EQ(lo[0], -0.5);
  EXPECT_EQ(hi[0], 0.0);
}

TEST(CustomFn, UsesCallbacks) {
  const ConvexFn f = ConvexFn::custom(
      2, 2.0, [](const Vector& x) { return x.squaredNorm(); }, [](const Vector& x) { return Vector(2.0 * x); });
  EXPECT_FALSE(f.has_prox());
  EXPECT_DOUBLE_EQ(f.value(Vector{{1.0, 1.0}}), 2.0);
  EXPECT_EQ(f.gradient(Vector{{1.0, 0.0}})[0], 2.0);
}

}  // namespace
}  // namespace sketchsaddle
