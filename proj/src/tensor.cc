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

#include "truecase/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "truecase/errors.h"
#include "truecase/random.h"

namespace truecase {

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {

size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), size_t{1},
                         std::multiplies<size_t>());
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (NumElements(shape_) != data_.size()) {
    throw ShapeError("tensor shape " + ShapeToString(shape_) + " needs " +
                     std::to_string(NumElements(shape_)) + " values, got " +
                     std::to_string(data_.size()));
  }
}

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const size_t n = rows.size();
  const size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw ShapeError("FromRows: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n, m}, std::move(data));
}

Tensor Tensor::Vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::Identity(size_t n) {
  Tensor t({n, n});
  for (size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

size_t Tensor::rows() const {
  if (shape_.size() == 1) return 1;
  if (shape_.size() != 2) {
    throw ShapeError("matrix view needs rank 1 or 2, got " +
                     ShapeToString(shape_));
  }
  return shape_[0];
}

size_t Tensor::cols() const {
  return shape_.size() == 1 ? shape_[0] : shape_.at(1);
}

MatrixMap Tensor::matrix() {
  const size_t r = rows();
  return MatrixMap(data_.data(), static_cast<Eigen::Index>(r),
                   static_cast<Eigen::Index>(cols()));
}

ConstMatrixMap Tensor::matrix() const {
  const size_t r = rows();
  return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(r),
                        static_cast<Eigen::Index>(cols()));
}

std::span<double> Tensor::row(size_t i) {
  const size_t c = cols();
  return std::span<double>(data_).subspan(i * c, c);
}

std::span<const double> Tensor::row(size_t i) const {
  const size_t c = cols();
  return std::span<const double>(data_).subspan(i * c, c);
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

bool Tensor::AllFiniteOrNegInf() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) {
    return std::isfinite(v) || v == -std::numeric_limits<double>::infinity();
  });
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: cannot multiply " + ShapeToString(a.shape()) +
                     " by " + ShapeToString(b.shape()));
  }
  Tensor out({a.dim(0), b.dim(1)});
  out.matrix().noalias() = a.matrix() * b.matrix();
  return out;
}

double LogSumExp(std::span<const double> v) {
  if (v.empty()) throw DataError("log_sum_exp: empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

double LogSumExp(const Tensor& v) { return LogSumExp(v.values()); }

void AddColumnSums(const Eigen::Ref<const RowMatrix>& m, std::span<double> out) {
  if (static_cast<size_t>(m.cols()) != out.size()) {
    throw ShapeError("column sums: " + std::to_string(m.cols()) +
                     " columns into " + std::to_string(out.size()));
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[j] += m(i, j);
  }
}

Tensor Apply(UnaryOp op, const Tensor& x) {
  Tensor out = x;
  for (double& v : out.values()) {
    switch (op) {
      case UnaryOp::kRelu:
        v = v > 0.0 ? v : 0.0;
        break;
      case UnaryOp::kSigmoid:
        v = SigmoidScalar(v);
        break;
      case UnaryOp::kTanh:
        v = std::tanh(v);
        break;
    }
  }
  return out;
}

Tensor Apply(BinaryOp op, const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, op == BinaryOp::kAdd ? "add" : "mul");
  Tensor out = a;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = op == BinaryOp::kAdd ? a[i] + b[i] : a[i] * b[i];
  }
  return out;
}

Tensor AddRowBias(const Tensor& x, const Tensor& bias) {
  if (x.rank() != 2 || bias.rank() != 1 || bias.dim(0) != x.dim(1)) {
    throw ShapeError("add_row_bias: " + ShapeToString(x.shape()) + " + " +
                     ShapeToString(bias.shape()));
  }
  Tensor out = x;
  out.matrix().rowwise() += bias.matrix().row(0);
  return out;
}

Tensor SoftmaxRows(const Tensor& x) {
  if (x.rank() != 2) {
    throw ShapeError("softmax: need rank 2, got " + ShapeToString(x.shape()));
  }
  Tensor out = x;
  for (size_t i = 0; i < x.dim(0); ++i) {
    auto r = out.row(i);
    const double lse = LogSumExp(r);
    for (double& v : r) v = std::exp(v - lse);
  }
  return out;
}

GradCheckResult FiniteDiffCheck(const LossFunction& loss,
                                std::vector<Tensor> params,
                                const GradCheckOptions& options) {
  if (!(options.eps >= 1e-7 && options.eps <= 1e-3)) {
    throw DataError("finite_diff_check: eps must be in [1e-7, 1e-3]");
  }
  std::vector<Tensor> grads;
  const double base = loss(params, &grads);
  if (!std::isfinite(base)) throw NumericError("finite_diff_check: loss is non-finite");
  if (grads.size() != params.size()) {
    throw ShapeError("finite_diff_check: gradient count mismatch");
  }

  // Candidate coordinates per tensor, skipping guarded entries.
  std::vector<std::vector<size_t>> candidates(params.size());
  size_t total = 0;
  for (size_t p = 0; p < params.size(); ++p) {
    if (grads[p].shape() != params[p].shape()) {
      throw ShapeError("finite_diff_check: gradient " + std::to_string(p) +
                       " has shape " + ShapeToString(grads[p].shape()) +
                       ", parameter has " + ShapeToString(params[p].shape()));
    }
    for (size_t i = 0; i < params[p].size(); ++i) {
      if (std::isfinite(params[p][i])) candidates[p].push_back(i);
    }
    total += candidates[p].size();
  }

  // Shuffle each tensor's candidates, then take round-robin until the budget
  // of non-kink coordinates is met.
  Rng rng(MixSeed(options.seed));
  for (auto& c : candidates) {
    for (size_t i = c.size(); i > 1; --i) std::swap(c[i - 1], c[rng.Below(i)]);
  }
  // Round-robin visiting order over the tensors.
  std::vector<std::pair<size_t, size_t>> order;
  order.reserve(total);
  for (size_t round = 0; order.size() < total; ++round) {
    for (size_t p = 0; p < params.size(); ++p) {
      if (round < candidates[p].size()) order.emplace_back(p, candidates[p][round]);
    }
  }
  const size_t budget = std::min(options.min_coordinates, total);

  GradCheckResult result;
  result.per_param.assign(params.size(), 0);
  for (const auto& [p, i] : order) {
    if (result.coordinates_checked >= budget) break;
    const double saved = params[p][i];
    params[p][i] = saved + options.eps;
    const double plus = loss(params, nullptr);
    std::vector<uint8_t> pattern_plus;
    if (options.activation_pattern) pattern_plus = options.activation_pattern(params);
    params[p][i] = saved - options.eps;
    const double minus = loss(params, nullptr);
    const bool kink = options.activation_pattern &&
                      options.activation_pattern(params) != pattern_plus;
    params[p][i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericError("finite_diff_check: loss is non-finite");
    }
    if (kink) {
      ++result.kinks_skipped;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * options.eps);
    const double analytic = grads[p][i];
    const double rel = std::abs(analytic - numeric) /
                       std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    ++result.coordinates_checked;
    ++result.per_param[p];
    if (rel > result.max_relative_error || result.coordinates_checked == 1) {
      result.max_relative_error = rel;
      result.worst_param = p;
      result.worst_offset = i;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace truecase
