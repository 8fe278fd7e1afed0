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

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "sketchsaddle/instances.hpp"
#include "sketchsaddle/solver.hpp"
#include "test_util.hpp"

namespace sketchsaddle {
namespace {

using testing::random_matrix;

PlantedSpec spec_of(Index d, Index n, Index s_w, Index s_l, std::uint64_t seed) {
  PlantedSpec spec;
  spec.d = d;
  spec.n = n;
  spec.s_w = s_w;
  spec.s_lambda = s_l;
  spec.seed = seed;
  return spec;
}

TEST(Planted, ResidualIsZeroAtPlantedPair) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PlantedSpec spec = spec_of(40, 25, 4, 2, seed);
    spec.alpha = 0.5 + double(seed);
    spec.beta = 2.0;
    spec.style = seed % 2 ? MatrixStyle::columns : MatrixStyle::rows;
    const PlantedInstance inst = gen_planted_quadratic(spec);
    EXPECT_LE(kkt_residual(*inst.problem, inst.w_star, inst.lambda_star).max(), 1e-12);
  }
}

TEST(Planted, EmptyPrimalSupport) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(10, 12, 0, 3, 4));
  EXPECT_EQ(inst.w_star, Vector::Zero(10));
  const Matrix a = inst.problem->a().to_dense();
  EXPECT_LE((inst.problem->g().center() + a * inst.lambda_star).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(Planted, ClosedFormRecoversPair) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(30, 30, 3, 3, 5));
  const SolutionPair s = solve_exact_quadratic(*inst.problem);
  EXPECT_LE((s.w - inst.w_star).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE((s.lambda - inst.lambda_star).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Planted, SupportsAndMagnitudes) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(50, 60, 7, 5, 6));
  ASSERT_EQ(inst.support_w.size(), 7u);
  ASSERT_EQ(inst.support_lambda.size(), 5u);
  EXPECT_TRUE(std::is_sorted(inst.support_w.begin(), inst.support_w.end()));
  EXPECT_EQ(sparsity_stats(inst.w_star).l0, 7);
  EXPECT_EQ(sparsity_stats(inst.lambda_star).l0, 5);
  for (Index i : inst.support_w) {
    EXPECT_GE(std::abs(inst.w_star[i]), 0.5);
    EXPECT_LE(std::abs(inst.w_star[i]), 1.5);
  }
}

TEST(Planted, DeclaredNormBoundHolds) {
  const PlantedInstance rows = gen_planted_quadratic(spec_of(20, 30, 2, 2, 7));
  EXPECT_NEAR(rows.problem->a().row_norms().maxCoeff(), 1.0, 1e-12);
  PlantedSpec spec = spec_of(20, 30, 2, 2, 7);
  spec.style = MatrixStyle::columns;
  const PlantedInstance cols = gen_planted_quadratic(spec);
  EXPECT_NEAR(cols.problem->a().col_norms().maxCoeff(), 1.0, 1e-12);
  EXPECT_EQ(cols.problem->norm_bound(), NormBound::columns);
}

TEST(Planted, DeterministicInSeed) {
  const PlantedInstance a = gen_planted_quadratic(spec_of(15, 15, 2, 2, 9));
  const PlantedInstance b = gen_planted_quadratic(spec_of(15, 15, 2, 2, 9));
  EXPECT_EQ(a.problem->a().to_dense(), b.problem->a().to_dense());
  EXPECT_EQ(a.w_star, b.w_star);
  EXPECT_NE(a.w_star, gen_planted_quadratic(spec_of(15, 15, 2, 2, 10)).w_star);
}

TEST(Planted, ArgumentChecks) {
  EXPECT_THROW(gen_planted_quadratic(spec_of(5, 5, 6, 1, 1)), std::invalid_argument);
  EXPECT_THROW(gen_planted_quadratic(spec_of(5, 5, 1, 6, 1)), std::invalid_argument);
  PlantedSpec spec = spec_of(5, 5, 1, 1, 1);
  spec.alpha = 0.0;
  EXPECT_THROW(gen_planted_quadratic(spec), std::invalid_argument);
}

TEST(Normalize, UnitBoundUnchanged) {
  const Matrix a = Matrix::Identity(4, 4);
  const Normalized out = normalize(a, MatrixStyle::rows);
  EXPECT_EQ(out.matrix, a);
  EXPECT_EQ(out.factor, 1.0);
}

TEST(Normalize, ScaledIdentity) {
  const Normalized out = normalize(2.0 * Matrix::Identity(3, 3), MatrixStyle::rows);
  EXPECT_EQ(out.matrix, Matrix(Matrix::Identity(3, 3)));
  EXPECT_EQ(out.factor, 0.5);
}

TEST(Normalize, RandomMaxNormIsOne) {
  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = 5.0 * random_matrix(rng, 7, 11);
    EXPECT_NEAR(normalize(a, MatrixStyle::rows).matrix.rowwise().norm().maxCoeff(), 1.0, 1e-12);
    EXPECT_NEAR(normalize(a, MatrixStyle::columns).matrix.colwise().norm().maxCoeff(), 1.0, 1e-12);
  }
}

TEST(Normalize, Idempotent) {
  Rng rng(2);
  const Matrix once = normalize(random_matrix(rng, 6, 9), MatrixStyle::columns).matrix;
  const Normalized twice = normalize(once, MatrixStyle::columns);
  EXPECT_NEAR(twice.factor, 1.0, 1e-15);
  EXPECT_LE((twice.matrix - once).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Normalize, ZeroMatrixRejected) {
  EXPECT_THROW(normalize(Matrix::Zero(3, 3), MatrixStyle::rows), std::invalid_argument);
}

TEST(Perturb, ZeroAmountLeavesInstance) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(20, 20, 3, 3, 11));
  for (PerturbKind kind : {PerturbKind::varsigma, PerturbKind::tau}) {
    const PerturbedInstance out = perturb_to_approx_sparse(inst, kind, 0.0, 5);
    EXPECT_EQ(out.instance.problem->g().center(), inst.problem->g().center());
    EXPECT_EQ(out.instance.problem->h().center(), inst.problem->h().center());
    EXPECT_LE(out.certificate.achieved, 1e-12);
  }
}

TEST(Perturb, VarsigmaResidualIsExact) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(30, 25, 3, 3, 12));
  const double vs = 0.17;
  const PerturbedInstance out = perturb_to_approx_sparse(inst, PerturbKind::varsigma, vs, 6);
  const KktResidual r = kkt_residual(*out.instance.problem, inst.w_star, inst.lambda_star);
  EXPECT_NEAR(r.w_inf, vs, 1e-12);
  EXPECT_NEAR(r.lambda_inf, vs, 1e-12);
  EXPECT_NEAR(out.certificate.achieved, vs, 1e-12);
  // Centers moved by at most varsigma / modulus in every coordinate.
  EXPECT_LE((out.instance.problem->g().center() - inst.problem->g().center()).lpNorm<Eigen::Infinity>(),
            vs / inst.problem->alpha() + 1e-15);
}

TEST(Perturb, TauTailHasRequestedNorm) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(30, 25, 3, 3, 13));
  const double tau = 0.01;
  const PerturbedInstance out = perturb_to_approx_sparse(inst, PerturbKind::tau, tau, 7);
  ASSERT_TRUE(out.w_opt && out.lambda_opt);
  EXPECT_NEAR((*out.w_opt - inst.w_star).norm(), tau, 1e-12);
  EXPECT_NEAR((*out.lambda_opt - inst.lambda_star).norm(), tau, 1e-12);
  // The dense pair is the exact saddle point of the rebuilt problem.
  const SolutionPair s = solve_exact_quadratic(*out.instance.problem);
  EXPECT_LE((s.w - *out.w_opt).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE((s.lambda - *out.lambda_opt).lpNorm<Eigen::Infinity>(), 1e-10);
  // Tail sits off the support.
  for (Index i : inst.support_w) EXPECT_EQ((*out.w_opt)[i], inst.w_star[i]);
  EXPECT_EQ(out.certificate.mu, 1.0);
}

TEST(Perturb, NegativeAmountRejected) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(5, 5, 1, 1, 1));
  EXPECT_THROW(perturb_to_approx_sparse(inst, PerturbKind::tau, -1.0, 1), std::invalid_argument);
}

ErmSpec erm_spec(Loss loss, double margin, std::uint64_t seed) {
  ErmSpec spec;
  spec.n = 60;
  spec.d = 15;
  spec.loss = loss;
  spec.margin_fraction = margin;
  spec.seed = seed;
  return spec;
}

TEST(Erm, DualMatchesLossDerivativeOfPrimal) {
  for (Loss loss : {Loss::squared_hinge, Loss::logistic}) {
    const ErmInstance erm = gen_erm(erm_spec(loss, 0.9, 3));
    const SolveReport rep = solve_exact(*erm.problem);
    ASSERT_TRUE(rep.converged);
    const Vector from_primal = dual_from_primal(erm, rep.pair.w);
    EXPECT_LE((rep.pair.lambda - from_primal).lpNorm<Eigen::Infinity>(), 1e-4) << to_string(loss);
  }
}

TEST(Erm, LogisticDualInBox) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ErmInstance erm = gen_erm(erm_spec(Loss::logistic, 0.7, seed));
    const SolveReport rep = solve_exact(*erm.problem);
    EXPECT_GE(rep.pair.lambda.minCoeff(), -1.0);
    EXPECT_LE(rep.pair.lambda.maxCoeff(), 0.0);
  }
}

// The primal solution minimizes the regularized empirical risk.
TEST(Erm, PrimalMinimizesRegularizedRisk) {
  const ErmInstance erm = gen_erm(erm_spec(Loss::squared_hinge, 0.8, 4));
  const SolveReport rep = solve_exact(*erm.problem);
  auto risk = [&](const Vector& w) {
    double r = 0.5 * erm.gamma_reg * double(erm.x.rows()) * w.squaredNorm();
    for (Index i = 0; i < erm.x.rows(); ++i) r += loss_value(erm.loss, erm.y[i] * erm.x.row(i).dot(w));
    return r;
  };
  const double at = risk(rep.pair.w);
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    EXPECT_GE(risk(rep.pair.w + 1e-3 * testing::random_vector(rng, 15)), at - 1e-9);
  }
}

TEST(Erm, FullMarginLabelsFollowDirection) {
  const ErmInstance erm = gen_erm(erm_spec(Loss::squared_hinge, 1.0, 5));
  const Vector scores = erm.x * erm.direction;
  for (Index i = 0; i < scores.size(); ++i) EXPECT_GE(erm.y[i] * scores[i], 0.0);
  EXPECT_NEAR(erm.x.rowwise().norm().maxCoeff(), 1.0, 1e-12);
  EXPECT_NEAR(erm.direction.norm(), 1.0, 1e-12);
  EXPECT_EQ(erm.problem->alpha(), erm.gamma_reg * 60);
  EXPECT_NEAR(erm.gamma_reg, 1.0 / std::sqrt(60.0), 1e-15);
}

// With weak regularization and separable labels, most examples clear the
// margin and their dual coordinates vanish.
TEST(Erm, SeparableDataGivesSparseDual) {
  ErmSpec spec = erm_spec(Loss::squared_hinge, 1.0, 6);
  spec.n = 200;
  spec.d = 10;
  spec.gamma_reg = 1e-4;
  spec.direction_support = 3;
  const ErmInstance erm = gen_erm(spec);
  const SolveReport rep = solve_exact(*erm.problem);
  ASSERT_TRUE(rep.converged);
  const SparsityStats s = sparsity_stats(rep.pair.lambda, 1e-6);
  EXPECT_LE(s.l0, spec.n / 2);
}

TEST(Erm, ArgumentChecks) {
  ErmSpec spec = erm_spec(Loss::logistic, 1.5, 1);
  EXPECT_THROW(gen_erm(spec), std::invalid_argument);
  spec.margin_fraction = 1.0;
  spec.gamma_reg = 0.0;
  EXPECT_THROW(gen_erm(spec), std::invalid_argument);
}

TEST(Storage, PlantedRoundTrip) {
  const PlantedInstance inst = gen_planted_quadratic(spec_of(12, 9, 2, 3, 14));
  const auto dir = std::filesystem::temp_directory_path() / "sketchsaddle_planted_store";
  std::filesystem::remove_all(dir);
  save_instance(dir, inst);
  const StoredInstance back = load_instance(dir);
  EXPECT_EQ(back.kind, "planted_quadratic");
  EXPECT_EQ(back.seed, 14u);
  EXPECT_EQ(back.problem->a().to_dense(), inst.problem->a().to_dense());
  EXPECT_EQ(back.problem->g().center(), inst.problem->g().center());
  EXPECT_EQ(back.problem->h().center(), inst.problem->h().center());
  EXPECT_EQ(*back.w_star, inst.w_star);
  EXPECT_EQ(*back.lambda_star, inst.lambda_star);
}

TEST(Storage, ErmRoundTrip) {
  const ErmInstance erm = gen_erm(erm_spec(Loss::logistic, 0.9, 15));
  const auto dir = std::filesystem::temp_directory_path() / "sketchsaddle_erm_store";
  std::filesystem::remove_all(dir);
  save_instance(dir, erm);
  const StoredInstance back = load_instance(dir);
  EXPECT_EQ(back.kind, "erm");
  EXPECT_EQ(back.problem->a().to_dense(), erm.problem->a().to_dense());
  EXPECT_EQ(back.problem->h().kind(), ConvexKind::separable_conjugate);
  EXPECT_EQ(back.problem->h().loss(), Loss::logistic);
  EXPECT_EQ(back.problem->alpha(), erm.problem->alpha());
}

TEST(Storage, MissingDirectoryIsIoError) {
  EXPECT_THROW(load_instance(std::filesystem::temp_directory_path() / "sketchsaddle_nope_dir"), IoError);
}

}  // namespace
}  // namespace sketchsaddle
