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

#include "sketchsaddle/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "sketchsaddle/io.hpp"
#include "sketchsaddle/random.hpp"

namespace sketchsaddle {

namespace {

using nlohmann::json;

// Independent streams of one instance seed.
enum Stream : std::uint64_t { kMatrix = 1, kSupportW, kSupportL, kValuesW, kValuesL, kPerturbW, kPerturbL, kLabels };

std::vector<Index> random_support(Index dim, Index s, Rng& rng) {
  // Partial Fisher-Yates: the first s entries form a uniform s-subset.
  std::vector<Index> idx(static_cast<std::size_t>(dim));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < s; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(dim - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector planted_values(Index dim, const std::vector<Index>& support, Rng& rng) {
  Vector x = Vector::Zero(dim);
  for (Index i : support) x[i] = rng.rademacher() * rng.uniform(0.5, 1.5);
  return x;
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  }
  return a;
}

NormBound bound_for(MatrixStyle style) { return style == MatrixStyle::rows ? NormBound::rows : NormBound::columns; }

std::shared_ptr<const SaddleProblem> planted_problem(std::shared_ptr<const CouplingMatrix> a, const Vector& w,
                                                     const Vector& lambda, double alpha, double beta,
                                                     NormBound bound) {
  Vector center_w = w - a->times(lambda) / alpha;
  Vector center_l = lambda + a->transpose_times(w) / beta;
  return std::make_shared<const SaddleProblem>(ConvexFn::quadratic(std::move(center_w), alpha),
                                               ConvexFn::quadratic(std::move(center_l), beta), std::move(a),
                                               Domain::all_space(), Domain::all_space(), bound);
}

Vector random_signs(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.rademacher();
  return v;
}

// Gaussian vector on the complement of `support` (everywhere if that is
// empty), scaled to l2 norm `norm`.
Vector dense_tail(Index dim, const std::vector<Index>& support, double norm, Rng& rng) {
  Vector t(dim);
  for (Index i = 0; i < dim; ++i) t[i] = rng.normal();
  if (static_cast<Index>(support.size()) < dim) {
    for (Index i : support) t[i] = 0.0;
  }
  const double len = t.norm();
  if (len == 0.0 || norm == 0.0) return Vector::Zero(dim);
  return t * (norm / len);
}

json support_json(const std::vector<Index>& s) { return json(std::vector<long long>(s.begin(), s.end())); }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string norm_bound_name(NormBound b) {
  switch (b) {
    case NormBound::rows:
      return "rows";
    case NormBound::columns:
      return "columns";
    case NormBound::both:
      return "both";
    case NormBound::none:
      break;
  }
  return "none";
}

NormBound parse_norm_bound(const std::string& s) {
  if (s == "rows") return NormBound::rows;
  if (s == "columns") return NormBound::columns;
  if (s == "both") return NormBound::both;
  if (s == "none") return NormBound::none;
  throw IoError("unknown norm_bound in meta.json: " + s);
}

}  // namespace

std::string_view to_string(MatrixStyle style) { return style == MatrixStyle::rows ? "rows" : "columns"; }

MatrixStyle parse_matrix_style(std::string_view name) {
  if (name == "rows") return MatrixStyle::rows;
  if (name == "columns") return MatrixStyle::columns;
  throw std::invalid_argument("unknown matrix style: " + std::string(name));
}

Normalized normalize(const Matrix& a, MatrixStyle style) {
  const double largest =
      a.size() == 0 ? 0.0 : (style == MatrixStyle::rows ? a.rowwise().norm().maxCoeff() : a.colwise().norm().maxCoeff());
  if (!(largest > 0.0)) throw std::invalid_argument("normalize: matrix is all zero");
  if (largest == 1.0) return {a, 1.0};
  const double factor = 1.0 / largest;
  return {a * factor, factor};
}

PlantedInstance gen_planted_quadratic(const PlantedSpec& spec) {
  if (spec.d < 1 || spec.n < 1) throw std::invalid_argument("gen_planted_quadratic: d and n must be positive");
  if (spec.s_w < 0 || spec.s_w > spec.d) throw std::invalid_argument("gen_planted_quadratic: s_w must lie in [0, d]");
  if (spec.s_lambda < 0 || spec.s_lambda > spec.n) {
    throw std::invalid_argument("gen_planted_quadratic: s_lambda must lie in [0, n]");
  }
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0)) {
    throw std::invalid_argument("gen_planted_quadratic: alpha and beta must be positive");
  }
  PlantedInstance out;
  out.seed = spec.seed;
  out.style = spec.style;

  Rng matrix_rng(derive_seed(spec.seed, kMatrix));
  auto a = std::make_shared<const CouplingMatrix>(normalize(gaussian_matrix(spec.d, spec.n, matrix_rng), spec.style).matrix);

  Rng sw_rng(derive_seed(spec.seed, kSupportW));
  Rng sl_rng(derive_seed(spec.seed, kSupportL));
  out.support_w = random_support(spec.d, spec.s_w, sw_rng);
  out.support_lambda = random_support(spec.n, spec.s_lambda, sl_rng);
  Rng vw_rng(derive_seed(spec.seed, kValuesW));
  Rng vl_rng(derive_seed(spec.seed, kValuesL));
  out.w_star = planted_values(spec.d, out.support_w, vw_rng);
  out.lambda_star = planted_values(spec.n, out.support_lambda, vl_rng);

  out.problem = planted_problem(std::move(a), out.w_star, out.lambda_star, spec.alpha, spec.beta, bound_for(spec.style));
  return out;
}

ErmInstance gen_erm(const ErmSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("gen_erm: n and d must be positive");
  if (!(spec.margin_fraction >= 0.0 && spec.margin_fraction <= 1.0)) {
    throw std::invalid_argument("gen_erm: margin_fraction must lie in [0, 1]");
  }
  const double gamma = spec.gamma_reg.value_or(1.0 / std::sqrt(static_cast<double>(spec.n)));
  if (!(gamma > 0.0)) throw std::invalid_argument("gen_erm: gamma_reg must be positive");
  const Index k = std::clamp<Index>(spec.direction_support.value_or(std::max<Index>(1, spec.d / 10)), 1, spec.d);

  ErmInstance out;
  out.loss = spec.loss;
  out.gamma_reg = gamma;
  out.seed = spec.seed;

  Rng support_rng(derive_seed(spec.seed, kSupportW));
  Rng value_rng(derive_seed(spec.seed, kValuesW));
  out.direction = planted_values(spec.d, random_support(spec.d, k, support_rng), value_rng);
  out.direction.normalize();

  Rng matrix_rng(derive_seed(spec.seed, kMatrix));
  out.x = normalize(gaussian_matrix(spec.n, spec.d, matrix_rng), MatrixStyle::rows).matrix;

  Rng label_rng(derive_seed(spec.seed, kLabels));
  out.y.resize(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    const double score = out.x.row(i).dot(out.direction);
    const double sign = score >= 0.0 ? 1.0 : -1.0;
    out.y[i] = label_rng.uniform() < spec.margin_fraction ? sign : -sign;
  }

  Matrix a = -(out.x.transpose() * out.y.asDiagonal());
  const double alpha = gamma * static_cast<double>(spec.n);
  out.problem = std::make_shared<const SaddleProblem>(
      ConvexFn::quadratic(Vector::Zero(spec.d), alpha), ConvexFn::separable_conjugate(spec.loss, spec.n),
      std::make_shared<const CouplingMatrix>(std::move(a)), Domain::all_space(), Domain::all_space(),
      NormBound::columns);
  return out;
}

Vector dual_from_primal(const ErmInstance& erm, const Vector& w) {
  require_size(w.size(), erm.x.cols(), "dual_from_primal: w");
  const Vector margins = erm.y.cwiseProduct(erm.x * w);
  Vector lambda(margins.size());
  for (Index i = 0; i < margins.size(); ++i) lambda[i] = loss_derivative(erm.loss, margins[i]);
  return lambda;
}

PerturbedInstance perturb_to_approx_sparse(const PlantedInstance& instance, PerturbKind kind, double amount,
                                           std::uint64_t seed) {
  if (!(amount >= 0.0)) throw std::invalid_argument("perturb_to_approx_sparse: amount must be nonnegative");
  const SaddleProblem& p = *instance.problem;
  if (p.g().kind() != ConvexKind::quadratic || p.h().kind() != ConvexKind::quadratic) {
    throw UnsupportedProblem("perturb_to_approx_sparse needs a quadratic planted instance");
  }
  PerturbedInstance out;
  out.instance = instance;
  out.certificate.kind = kind;
  out.certificate.requested = amount;
  out.certificate.mu = std::max(p.g().smoothness().value_or(0.0), p.h().smoothness().value_or(0.0));

  const double alpha = p.alpha();
  const double beta = p.beta();
  Rng rng_w(derive_seed(seed, kPerturbW));
  Rng rng_l(derive_seed(seed, kPerturbL));

  if (kind == PerturbKind::varsigma) {
    if (amount > 0.0) {
      const Vector v = random_signs(p.d(), rng_w);
      const Vector u = random_signs(p.n(), rng_l);
      Vector center_w = p.g().center() - (amount / alpha) * v;
      Vector center_l = p.h().center() - (amount / beta) * u;
      out.instance.problem = std::make_shared<const SaddleProblem>(
          ConvexFn::quadratic(std::move(center_w), alpha), ConvexFn::quadratic(std::move(center_l), beta),
          p.a_ptr(), p.domain_w(), p.domain_lambda(), p.norm_bound());
    } else {
      out.w_opt = instance.w_star;
      out.lambda_opt = instance.lambda_star;
    }
    const KktResidual r = kkt_residual(*out.instance.problem, instance.w_star, instance.lambda_star);
    out.certificate.achieved = r.max();
    return out;
  }

  Vector w_opt = instance.w_star + dense_tail(p.d(), instance.support_w, amount, rng_w);
  Vector l_opt = instance.lambda_star + dense_tail(p.n(), instance.support_lambda, amount, rng_l);
  if (amount > 0.0) {
    out.instance.problem = planted_problem(p.a_ptr(), w_opt, l_opt, alpha, beta, p.norm_bound());
  }
  out.certificate.achieved = std::max((w_opt - instance.w_star).norm(), (l_opt - instance.lambda_star).norm());
  out.w_opt = std::move(w_opt);
  out.lambda_opt = std::move(l_opt);
  return out;
}

// --- persistence ----------------------------------------------------------------

void save_instance(const std::filesystem::path& dir, const PlantedInstance& instance) {
  prepare_dir(dir);
  const SaddleProblem& p = *instance.problem;
  io::write_matrix_market(dir / "A.mtx", p.a());
  io::write_vector(dir / "w_star.txt", instance.w_star);
  io::write_vector(dir / "lambda_star.txt", instance.lambda_star);
  io::write_vector(dir / "center_w.txt", p.g().center());
  io::write_vector(dir / "center_lambda.txt", p.h().center());
  json meta = {
      {"kind", "planted_quadratic"},
      {"d", p.d()},
      {"n", p.n()},
      {"alpha", p.alpha()},
      {"beta", p.beta()},
      {"seed", instance.seed},
      {"matrix_style", std::string(to_string(instance.style))},
      {"norm_bound", norm_bound_name(p.norm_bound())},
      {"s_w", instance.support_w.size()},
      {"s_lambda", instance.support_lambda.size()},
      {"support_w", support_json(instance.support_w)},
      {"support_lambda", support_json(instance.support_lambda)},
  };
  write_json(dir / "meta.json", meta);
}

void save_instance(const std::filesystem::path& dir, const ErmInstance& instance) {
  prepare_dir(dir);
  const SaddleProblem& p = *instance.problem;
  io::write_matrix_market(dir / "A.mtx", p.a());
  io::write_vector(dir / "labels.txt", instance.y);
  io::write_vector(dir / "direction.txt", instance.direction);
  json meta = {
      {"kind", "erm"},
      {"d", p.d()},
      {"n", p.n()},
      {"alpha", p.alpha()},
      {"beta", p.beta()},
      {"loss", std::string(to_string(instance.loss))},
      {"gamma_reg", instance.gamma_reg},
      {"seed", instance.seed},
      {"norm_bound", norm_bound_name(p.norm_bound())},
  };
  write_json(dir / "meta.json", meta);
}

StoredInstance load_instance(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw IoError("cannot read " + (dir / "meta.json").string());
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw IoError("malformed meta.json in " + dir.string() + ": " + e.what());
  }
  StoredInstance out;
  try {
    out.kind = meta.at("kind").get<std::string>();
    out.seed = meta.value("seed", std::uint64_t{0});
    auto a = std::make_shared<const CouplingMatrix>(io::read_matrix_market(dir / "A.mtx").matrix);
    const NormBound bound = parse_norm_bound(meta.value("norm_bound", std::string("none")));
    const double alpha = meta.at("alpha").get<double>();
    if (out.kind == "planted_quadratic") {
      const double beta = meta.at("beta").get<double>();
      out.problem = std::make_shared<const SaddleProblem>(
          ConvexFn::quadratic(io::read_vector(dir / "center_w.txt"), alpha),
          ConvexFn::quadratic(io::read_vector(dir / "center_lambda.txt"), beta), std::move(a), Domain::all_space(),
          Domain::all_space(), bound);
      out.w_star = io::read_vector(dir / "w_star.txt");
      out.lambda_star = io::read_vector(dir / "lambda_star.txt");
    } else if (out.kind == "erm") {
      const Loss loss = parse_loss(meta.at("loss").get<std::string>());
      const Index n = a->cols();
      const Index d = a->rows();
      out.problem = std::make_shared<const SaddleProblem>(ConvexFn::quadratic(Vector::Zero(d), alpha),
                                                          ConvexFn::separable_conjugate(loss, n), std::move(a),
                                                          Domain::all_space(), Domain::all_space(), bound);
    } else {
      throw IoError("unknown instance kind in meta.json: " + out.kind);
    }
  } catch (const json::exception& e) {
    throw IoError("meta.json in " + dir.string() + ": " + e.what());
  }
  return out;
}

}  // namespace sketchsaddle
