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

#include "sketchsaddle/sketch.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>

#include "sketchsaddle/io.hpp"
#include "sketchsaddle/parallel.hpp"

namespace sketchsaddle {

namespace {

constexpr std::uint64_t kFixedVectorStream = 0x6a09e667f3bcc908ULL;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("JL distortion eps must lie in (0, 1/2]");
}

Vector fixed_unit_vector(Index n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kFixedVectorStream));
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = rng.normal();
  return x / x.norm();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace

std::string_view to_string(Distribution dist) {
  switch (dist) {
    case Distribution::gaussian:
      return "gaussian";
    case Distribution::rademacher:
      return "rademacher";
    case Distribution::database_friendly:
      return "database_friendly";
  }
  return "unknown";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "gaussian") return Distribution::gaussian;
  if (name == "rademacher") return Distribution::rademacher;
  if (name == "database_friendly" || name == "database-friendly") return Distribution::database_friendly;
  throw std::invalid_argument("unknown distribution: " + std::string(name));
}

std::string_view to_string(SketchSide side) { return side == SketchSide::right ? "right" : "left"; }

SketchSide parse_side(std::string_view name) {
  if (name == "right") return SketchSide::right;
  if (name == "left") return SketchSide::left;
  throw std::invalid_argument("unknown sketch side: " + std::string(name));
}

// --- ProjectionMatrix ------------------------------------------------------

ProjectionMatrix ProjectionMatrix::from_entries(Matrix entries) {
  if (entries.rows() == 0 || entries.cols() == 0) throw std::invalid_argument("projection must be non-empty");
  return ProjectionMatrix(std::make_shared<const Matrix>(std::move(entries)), std::nullopt, 0);
}

ProjectionMatrix make_projection(Index rows, Index m, Distribution dist, std::uint64_t seed) {
  if (rows < 1 || m < 1) throw std::invalid_argument("make_projection: rows and m must be at least 1");
  Matrix entries(rows, m);
  EntryStream stream(dist, seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < rows; ++i) entries(i, j) = stream.next() * scale;
  }
  return ProjectionMatrix(std::make_shared<const Matrix>(std::move(entries)), dist, seed);
}

void save_projection(const std::filesystem::path& path, const ProjectionMatrix& r) {
  std::vector<std::string> comments;
  comments.push_back(" distribution: " +
                     std::string(r.distribution() ? to_string(*r.distribution()) : std::string_view("explicit")));
  comments.push_back(" seed: " + std::to_string(r.seed()));
  comments.push_back(" m: " + std::to_string(r.m()));
  io::write_matrix_market(path, r.entries(), comments);
}

ProjectionMatrix load_projection(const std::filesystem::path& path) {
  io::MarketMatrix mm = io::read_matrix_market(path);
  std::optional<Distribution> dist;
  std::uint64_t seed = 0;
  for (const auto& raw : mm.comments) {
    const std::string line = trim(raw);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "distribution" && value != "explicit") dist = parse_distribution(value);
    if (key == "seed") std::from_chars(value.data(), value.data() + value.size(), seed);
    if (key == "m" && std::stol(value) != mm.matrix.cols()) {
      throw IoError("projection header m disagrees with column count in " + path.string());
    }
  }
  ProjectionMatrix r = ProjectionMatrix::from_entries(mm.matrix.to_dense());
  if (!dist) return r;
  return ProjectionMatrix(r.entries_ptr(), dist, seed);
}

// --- SketchedProblem -------------------------------------------------------

SketchedProblem::SketchedProblem(std::shared_ptr<const SaddleProblem> base, ProjectionMatrix r,
                                 std::shared_ptr<const Matrix> a_hat, SketchSide side, double gamma_w,
                                 double gamma_lambda)
    : base_(std::move(base)),
      r_(std::move(r)),
      a_hat_(std::move(a_hat)),
      side_(side),
      gamma_w_(gamma_w),
      gamma_lambda_(gamma_lambda) {
  if (!(gamma_w_ >= 0.0) || !(gamma_lambda_ >= 0.0)) {
    throw std::invalid_argument("SketchedProblem: regularization parameters must be nonnegative");
  }
}

SketchedProblem SketchedProblem::with_regularization(double gamma_w, double gamma_lambda) const {
  return SketchedProblem(base_, r_, a_hat_, side_, gamma_w, gamma_lambda);
}

std::unique_ptr<BilinearOperator> SketchedProblem::coupling() const {
  if (side_ == SketchSide::right) return std::make_unique<RightSketchOperator>(a_hat_, r_.entries_ptr());
  return std::make_unique<LeftSketchOperator>(r_.entries_ptr(), a_hat_);
}

SketchedProblem apply_sketch(std::shared_ptr<const SaddleProblem> problem, const ProjectionMatrix& r,
                             SketchSide side) {
  if (!problem) throw ContractViolation("apply_sketch: null problem");
  const Index want = side == SketchSide::right ? problem->n() : problem->d();
  if (r.rows() != want) {
    throw std::invalid_argument("apply_sketch: projection has " + std::to_string(r.rows()) + " rows, expected " +
                                std::to_string(want));
  }
  auto a_hat = std::make_shared<const Matrix>(side == SketchSide::right
                                                  ? problem->a().times_dense(r.entries())
                                                  : Matrix(problem->a().transpose_times_dense(r.entries()).transpose()));
  return SketchedProblem(std::move(problem), r, std::move(a_hat), side);
}

// --- JL diagnostics --------------------------------------------------------

double jl_tail_bound(Index m, double eps, double c) {
  return 2.0 * std::exp(-static_cast<double>(m) * eps * eps / c);
}

double jl_failure_rate(Distribution dist, const Vector& x, Index m, double eps, long trials, std::uint64_t seed,
                       unsigned threads) {
  check_eps(eps);
  if (m < 1) throw std::invalid_argument("jl_failure_rate: m must be at least 1");
  if (trials < 1000) throw ContractViolation("jl_failure_rate: at least 1000 trials required");
  const double norm_sq = x.squaredNorm();
  const double lo = (1.0 - eps) * norm_sq;
  const double hi = (1.0 + eps) * norm_sq;
  const Index n = x.size();
  std::vector<char> failed(static_cast<std::size_t>(trials), 0);
  parallel_for(failed.size(), threads, [&](std::size_t t) {
    EntryStream stream(dist, derive_seed(seed, t));
    double acc = 0.0;
    for (Index j = 0; j < m; ++j) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += x[i] * stream.next();
      acc += s * s;
    }
    const double projected = acc / static_cast<double>(m);
    failed[t] = (projected < lo || projected > hi) ? 1 : 0;
  });
  return static_cast<double>(std::count(failed.begin(), failed.end(), 1)) / static_cast<double>(trials);
}

double jl_failure_rate(Distribution dist, Index n, Index m, double eps, long trials, std::uint64_t seed,
                       unsigned threads) {
  if (n < 1) throw std::invalid_argument("jl_failure_rate: n must be at least 1");
  return jl_failure_rate(dist, fixed_unit_vector(n, seed), m, eps, trials, seed, threads);
}

double inner_product_distortion(const ProjectionMatrix& r, const Vector& u, const Vector& v) {
  require_size(u.size(), r.rows(), "inner_product_distortion: u");
  require_size(v.size(), r.rows(), "inner_product_distortion: v");
  const Vector ru = r.entries().transpose() * u;
  const Vector rv = r.entries().transpose() * v;
  return std::abs(ru.dot(rv) - u.dot(v));
}

Calibration calibrate_c(Distribution dist, long trials, const JlGrid& grid, Index n, std::uint64_t seed,
                        unsigned threads) {
  if (grid.m_values.empty() || grid.eps_values.empty()) throw std::invalid_argument("calibrate_c: empty grid");
  if (trials < 1) throw std::invalid_argument("calibrate_c: trials must be positive");
  for (double eps : grid.eps_values) check_eps(eps);
  std::vector<Index> ms = grid.m_values;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms.front() < 1) throw std::invalid_argument("calibrate_c: m values must be positive");

  const Vector x = fixed_unit_vector(n, seed);
  const Index m_max = ms.back();
  const std::size_t n_m = ms.size();
  // projected[t * n_m + k] = ||R_k^T x||^2 for the k-th m value.
  std::vector<double> projected(static_cast<std::size_t>(trials) * n_m);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    EntryStream stream(dist, derive_seed(seed, t));
    double acc = 0.0;
    std::size_t k = 0;
    for (Index j = 0; j < m_max; ++j) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += x[i] * stream.next();
      acc += s * s;
      if (j + 1 == ms[k]) {
        projected[t * n_m + k] = acc / static_cast<double>(ms[k]);
        ++k;
      }
    }
  });

  Calibration result{kMinCalibratedC, {}};
  double required_max = 0.0;
  for (std::size_t k = 0; k < n_m; ++k) {
    for (double eps : grid.eps_values) {
      long failures = 0;
      for (long t = 0; t < trials; ++t) {
        const double p = projected[static_cast<std::size_t>(t) * n_m + k];
        if (p < 1.0 - eps || p > 1.0 + eps) ++failures;
      }
      const double rate = static_cast<double>(failures) / static_cast<double>(trials);
      const double mass = static_cast<double>(ms[k]) * eps * eps;
      const double required = failures > 0 ? mass / std::log(2.0 / rate) : 0.0;
      required_max = std::max(required_max, required);
      result.cells.push_back({ms[k], eps, rate, required});
    }
  }
  result.c = std::max(kMinCalibratedC, 2.0 * required_max);
  return result;
}

}  // namespace sketchsaddle
