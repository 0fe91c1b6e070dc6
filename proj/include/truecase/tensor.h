// Copyright 2026 The Truecase Authors.
//
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

#ifndef TRUECASE_TENSOR_H_
#define TRUECASE_TENSOR_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace truecase {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

using Shape = std::vector<size_t>;

std::string ShapeToString(const Shape& shape);

// Dense row-major array of doubles. All model math goes through this type;
// rank-1 and rank-2 tensors can be viewed as Eigen matrices for the heavy
// kernels.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  // Builds a rank-2 tensor from nested rows, e.g. {{1, 2}, {3, 4}}.
  static Tensor FromRows(
      std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Vector(std::initializer_list<double> values);
  static Tensor Identity(size_t n);
  static Tensor ZerosLike(const Tensor& other) { return Tensor(other.shape_); }

  const Shape& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t dim(size_t axis) const { return shape_.at(axis); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& operator()(size_t i, size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(size_t i, size_t j) const {
    return data_[i * shape_[1] + j];
  }

  // Rank-2 view (rank-1 tensors are viewed as a single row).
  MatrixMap matrix();
  ConstMatrixMap matrix() const;
  // Row i of a rank-2 tensor.
  std::span<double> row(size_t i);
  std::span<const double> row(size_t i) const;

  void Fill(double value);
  void SetZero() { Fill(0.0); }
  // True iff every element is finite.
  bool AllFinite() const;
  // Same as AllFinite but ignores -inf entries (used for guarded CRF
  // transitions).
  bool AllFiniteOrNegInf() const;

  bool operator==(const Tensor& other) const = default;

 private:
  size_t rows() const;
  size_t cols() const;

  Shape shape_;
  std::vector<double> data_;
};

// [m x k] * [k x n] -> [m x n]. Throws ShapeError naming both shapes.
Tensor MatMul(const Tensor& a, const Tensor& b);

// log(sum(exp(v))) with max subtraction. Throws DataError on empty input.
double LogSumExp(std::span<const double> v);
double LogSumExp(const Tensor& v);

// out[j] += sum_i m(i, j), summed in row order. Eigen's vectorized
// reductions pick an order from the buffer's address, which would make
// gradients depend on where an allocation happened to land.
void AddColumnSums(const Eigen::Ref<const RowMatrix>& m, std::span<double> out);

enum class UnaryOp { kRelu, kSigmoid, kTanh };
enum class BinaryOp { kAdd, kMul };

Tensor Apply(UnaryOp op, const Tensor& x);
Tensor Apply(BinaryOp op, const Tensor& a, const Tensor& b);

inline Tensor Relu(const Tensor& x) { return Apply(UnaryOp::kRelu, x); }
inline Tensor Sigmoid(const Tensor& x) { return Apply(UnaryOp::kSigmoid, x); }
inline Tensor Tanh(const Tensor& x) { return Apply(UnaryOp::kTanh, x); }
inline Tensor Add(const Tensor& a, const Tensor& b) {
  return Apply(BinaryOp::kAdd, a, b);
}
inline Tensor Mul(const Tensor& a, const Tensor& b) {
  return Apply(BinaryOp::kMul, a, b);
}

// Adds a bias row to every row of a rank-2 tensor. The only broadcast the
// library supports.
Tensor AddRowBias(const Tensor& x, const Tensor& bias);

// Row-wise softmax of a rank-2 tensor.
Tensor SoftmaxRows(const Tensor& x);

inline double SigmoidScalar(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                : std::exp(x) / (1.0 + std::exp(x));
}

// Computes the loss and, when grads is non-null, fills it with one gradient
// per parameter (same shapes as params).
using LossFunction =
    std::function<double(std::span<const Tensor> params,
                         std::vector<Tensor>* grads)>;

// Identifies the linear piece a piecewise-linear loss is evaluated on (e.g.
// the sign pattern of every ReLU input).
using ActivationPattern =
    std::function<std::vector<uint8_t>(std::span<const Tensor> params)>;

struct GradCheckOptions {
  double eps = 1e-5;
  // Sampled coordinates; all coordinates are used when there are fewer.
  size_t min_coordinates = 200;
  uint64_t seed = 0;
  // When set, a coordinate whose +eps and -eps evaluations fall on different
  // pieces straddles a kink; it is skipped and replaced by another sample.
  ActivationPattern activation_pattern;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  size_t coordinates_checked = 0;
  size_t kinks_skipped = 0;
  // Checked coordinates per parameter tensor.
  std::vector<size_t> per_param;
  // Parameter index and flat offset of the worst coordinate.
  size_t worst_param = 0;
  size_t worst_offset = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares analytic gradients with central differences on a sampled set of
// coordinates. Coordinates are spread round-robin over the parameter tensors
// so every tensor is represented. Non-finite parameter entries (e.g. -inf CRF
// guards) are never perturbed. Throws NumericError if a loss is non-finite.
GradCheckResult FiniteDiffCheck(const LossFunction& loss,
                                std::vector<Tensor> params,
                                const GradCheckOptions& options = {});

}  // namespace truecase

#endif  // TRUECASE_TENSOR_H_
