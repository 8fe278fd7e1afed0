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

#include "sketchsaddle/conjugate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sketchsaddle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x log x with the 0 log 0 = 0 convention.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double logistic_prox(double v, double step) {
  // phi(t) = (t - v)/step + log((1 + t)/(-t)) is strictly increasing on
  // (-1, 0), running from -inf to +inf, so it has exactly one root.
  auto phi = [&](double t) { return (t - v) / step + std::log1p(t) - std::log(-t); };
  double lo = -1.0;
  double hi = 0.0;
  double t = -0.5;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = phi(t);
    if (f == 0.0) return t;
    if (f > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double fprime = 1.0 / step + 1.0 / (1.0 + t) - 1.0 / t;
    double next = t - f / fprime;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16 * (1.0 + std::abs(t))) return next;
    if (next <= -1.0 || next >= 0.0) return t;  // bracket collapsed onto an endpoint
    t = next;
  }
  return t;
}

}  // namespace

std::string_view to_string(Loss loss) {
  return loss == Loss::squared_hinge ? "squared_hinge" : "logistic";
}

Loss parse_loss(std::string_view name) {
  if (name == "squared_hinge") return Loss::squared_hinge;
  if (name == "logistic") return Loss::logistic;
  throw std::invalid_argument("unknown loss: " + std::string(name));
}

Interval conjugate_domain(Loss loss) {
  return loss == Loss::squared_hinge ? Interval{-kInf, 0.0} : Interval{-1.0, 0.0};
}

double conjugate_modulus(Loss loss) { return loss == Loss::squared_hinge ? 0.5 : 4.0; }

double loss_value(Loss loss, double z) {
  if (loss == Loss::squared_hinge) {
    const double slack = std::max(0.0, 1.0 - z);
    return slack * slack;
  }
  // log(1 + exp(-z)) without overflow.
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double loss_derivative(Loss loss, double z) {
  if (loss == Loss::squared_hinge) return -2.0 * std::max(0.0, 1.0 - z);
  return z > 0.0 ? -std::exp(-z) / (1.0 + std::exp(-z)) : -1.0 / (1.0 + std::exp(z));
}

double conjugate_value(Loss loss, double t) {
  const Interval dom = conjugate_domain(loss);
  if (!(t >= dom.lower && t <= dom.upper)) {
    throw std::domain_error("conjugate argument outside its domain");
  }
  if (loss == Loss::squared_hinge) return t + 0.25 * t * t;
  return xlogx(-t) + xlogx(1.0 + t);
}

double conjugate_derivative(Loss loss, double t) {
  if (loss == Loss::squared_hinge) return 1.0 + 0.5 * t;
  if (t <= -1.0) return -kInf;
  if (t >= 0.0) return kInf;
  return std::log1p(t) - std::log(-t);
}

double conjugate_prox(Loss loss, double v, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("conjugate_prox: step must be positive");
  if (loss == Loss::squared_hinge) {
    // Stationarity (t - v)/step + 1 + t/2 = 0, then clamp onto t <= 0.
    const double t = (v - step) / (1.0 + 0.5 * step);
    return std::min(t, 0.0);
  }
  return logistic_prox(v, step);
}

}  // namespace sketchsaddle
