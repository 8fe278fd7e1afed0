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

#include <stdexcept>

#include "sketchsaddle/types.hpp"

namespace sketchsaddle {

/// Componentwise sign(v_i) max(|v_i| - t, 0).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> prox_soft_threshold(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  if (t < Scalar(0)) throw std::invalid_argument("prox_soft_threshold: threshold must be nonnegative");
  return v.unaryExpr([t](Scalar x) {
    const Scalar mag = std::abs(x) - t;
    return mag > Scalar(0) ? (x > Scalar(0) ? mag : -mag) : Scalar(0);
  });
}

/// argmin_x (1/(2 step))||x - v||^2 + (modulus/2)||x - center||^2 + gamma ||x||_1.
///
/// The smooth part is a quadratic with curvature 1/step + modulus centred at
/// the weighted average of v and center, so the minimizer is that average
/// soft-thresholded at gamma / (1/step + modulus).
template <typename DerivedV, typename DerivedC>
Eigen::Matrix<typename DerivedV::Scalar, Eigen::Dynamic, 1> prox_quadratic_plus_l1(
    const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedC>& center,
    typename DerivedV::Scalar modulus, typename DerivedV::Scalar gamma, typename DerivedV::Scalar step) {
  using Scalar = typename DerivedV::Scalar;
  if (modulus < Scalar(0) || gamma < Scalar(0) || !(step > Scalar(0))) {
    throw std::invalid_argument("prox_quadratic_plus_l1: need modulus >= 0, gamma >= 0, step > 0");
  }
  require_size(center.size(), v.size(), "prox_quadratic_plus_l1: center");
  const Scalar curvature = Scalar(1) / step + modulus;
  return prox_soft_threshold(((v / step + modulus * center) / curvature).eval(), gamma / curvature);
}

}  // namespace sketchsaddle
