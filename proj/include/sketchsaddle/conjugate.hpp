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

#include <string>
#include <string_view>

namespace sketchsaddle {

/// Classification losses whose Fenchel conjugates turn regularized ERM into a
/// bilinear saddle problem.
///
/// squared_hinge: l(z) = max(0, 1 - z)^2, l*(t) = t + t^2/4 on t <= 0.
/// logistic:      l(z) = log(1 + exp(-z)),
///                l*(t) = (-t) log(-t) + (1 + t) log(1 + t) on [-1, 0].
enum class Loss { squared_hinge, logistic };

struct Interval {
  double lower;
  double upper;
};

std::string_view to_string(Loss loss);
Loss parse_loss(std::string_view name);

/// Closed domain of l*.
Interval conjugate_domain(Loss loss);

/// Strong-convexity modulus of l* on its domain (1/2 and 4).
double conjugate_modulus(Loss loss);

double loss_value(Loss loss, double z);
double loss_derivative(Loss loss, double z);

/// l*(t). Throws std::domain_error when t lies outside conjugate_domain.
double conjugate_value(Loss loss, double t);

/// Derivative of l* at t; +/-infinity at the logistic endpoints.
double conjugate_derivative(Loss loss, double t);

/// argmin_t (1/(2 step)) (t - v)^2 + l*(t), restricted to the conjugate domain.
/// Closed form for the squared hinge, safeguarded Newton for the logistic.
double conjugate_prox(Loss loss, double v, double step);

}  // namespace sketchsaddle
