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

#include <cstdint>
#include <memory>

#include "sketchsaddle/model.hpp"
#include "sketchsaddle/random.hpp"

namespace sketchsaddle::testing {

inline Vector random_vector(Rng& rng, Index k) {
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = rng.normal();
  return v;
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  return a;
}

// Quadratic problem with random centers, moduli alpha and beta.
inline std::shared_ptr<const SaddleProblem> random_quadratic(Rng& rng, Index d, Index n, double alpha = 1.0,
                                                             double beta = 1.0) {
  auto a = std::make_shared<const CouplingMatrix>(random_matrix(rng, d, n));
  return std::make_shared<const SaddleProblem>(ConvexFn::quadratic(random_vector(rng, d), alpha),
                                               ConvexFn::quadratic(random_vector(rng, n), beta), a);
}

}  // namespace sketchsaddle::testing
