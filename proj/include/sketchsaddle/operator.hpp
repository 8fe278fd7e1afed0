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

#include <memory>

#include "sketchsaddle/model.hpp"

namespace sketchsaddle {

/// A d x n linear map K used as the bilinear coupling w^T K lambda, available
/// only through forward and adjoint products.
class BilinearOperator {
 public:
  virtual ~BilinearOperator() = default;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  /// K lambda, length rows().
  virtual Vector apply(const Vector& lambda) const = 0;
  /// K^T w, length cols().
  virtual Vector apply_adjoint(const Vector& w) const = 0;
};

/// K = A for a stored coupling matrix.
class CouplingOperator final : public BilinearOperator {
 public:
  explicit CouplingOperator(std::shared_ptr<const CouplingMatrix> a) : a_(std::move(a)) {}
  Index rows() const override { return a_->rows(); }
  Index cols() const override { return a_->cols(); }
  Vector apply(const Vector& lambda) const override { return a_->times(lambda); }
  Vector apply_adjoint(const Vector& w) const override { return a_->transpose_times(w); }

 private:
  std::shared_ptr<const CouplingMatrix> a_;
};

/// K = M for an explicit dense matrix (tests and small problems).
class DenseOperator final : public BilinearOperator {
 public:
  explicit DenseOperator(Matrix m) : m_(std::move(m)) {}
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  Vector apply(const Vector& lambda) const override { return m_ * lambda; }
  Vector apply_adjoint(const Vector& w) const override { return m_.transpose() * w; }

 private:
  Matrix m_;
};

/// K = A_hat R^T with A_hat = A R (d x m) and R (n x m). O(dm + nm) per product.
class RightSketchOperator final : public BilinearOperator {
 public:
  RightSketchOperator(std::shared_ptr<const Matrix> a_hat, std::shared_ptr<const Matrix> r)
      : a_hat_(std::move(a_hat)), r_(std::move(r)) {}
  Index rows() const override { return a_hat_->rows(); }
  Index cols() const override { return r_->rows(); }
  Vector apply(const Vector& lambda) const override {
    require_size(lambda.size(), cols(), "RightSketchOperator::apply");
    return *a_hat_ * (r_->transpose() * lambda);
  }
  Vector apply_adjoint(const Vector& w) const override {
    require_size(w.size(), rows(), "RightSketchOperator::apply_adjoint");
    return *r_ * (a_hat_->transpose() * w);
  }

 private:
  std::shared_ptr<const Matrix> a_hat_;
  std::shared_ptr<const Matrix> r_;
};

/// K = R A_hat with A_hat = R^T A (m x n) and R (d x m).
class LeftSketchOperator final : public BilinearOperator {
 public:
  LeftSketchOperator(std::shared_ptr<const Matrix> r, std::shared_ptr<const Matrix> a_hat)
      : r_(std::move(r)), a_hat_(std::move(a_hat)) {}
  Index rows() const override { return r_->rows(); }
  Index cols() const override { return a_hat_->cols(); }
  Vector apply(const Vector& lambda) const override {
    require_size(lambda.size(), cols(), "LeftSketchOperator::apply");
    return *r_ * (*a_hat_ * lambda);
  }
  Vector apply_adjoint(const Vector& w) const override {
    require_size(w.size(), rows(), "LeftSketchOperator::apply_adjoint");
    return a_hat_->transpose() * (r_->transpose() * w);
  }

 private:
  std::shared_ptr<const Matrix> r_;
  std::shared_ptr<const Matrix> a_hat_;
};

}  // namespace sketchsaddle
