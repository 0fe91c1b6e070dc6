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

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.h"
#include "truecase/errors.h"

namespace truecase {
namespace {

using testing::NaiveMatMul;
using testing::RandomTensor;

TEST(TensorTest, ShapeMustMatchData) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
  const Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t(1, 2), 1.5);
}

TEST(MatMulTest, IdentityLeavesMatrixUnchanged) {
  Rng rng(1);
  const Tensor x = RandomTensor({3, 4}, &rng);
  EXPECT_EQ(MatMul(Tensor::Identity(3), x), x);
}

TEST(MatMulTest, HandExample) {
  const Tensor a = Tensor::FromRows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::FromRows({{0}, {1}});
  EXPECT_EQ(MatMul(a, b), Tensor::FromRows({{2}, {4}}));
}

TEST(MatMulTest, MatchesTripleLoop) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = RandomTensor({7, 5}, &rng);
    const Tensor b = RandomTensor({5, 3}, &rng);
    const Tensor got = MatMul(a, b);
    const Tensor want = NaiveMatMul(a, b);
    for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(MatMulTest, ShapeErrorNamesBothShapes) {
  try {
    MatMul(Tensor({2, 3}), Tensor({4, 5}));
    FAIL() << "no exception";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4x5]"), std::string::npos) << msg;
  }
}

TEST(LogSumExpTest, Examples) {
  EXPECT_NEAR(LogSumExp(Tensor::Vector({0, 0})), std::numbers::ln2, 1e-15);
  for (double x : {-3.5, 0.0, 2.25, 700.0}) {
    EXPECT_EQ(LogSumExp(Tensor::Vector({x})), x);
  }
  EXPECT_NEAR(LogSumExp(Tensor::Vector({1000, 1000})),
              1000 + std::numbers::ln2, 1e-12);
  EXPECT_EQ(LogSumExp(Tensor::Vector({5, 5, 5, 5})), 5 + std::log(4.0));
}

TEST(LogSumExpTest, EmptyThrows) {
  EXPECT_THROW(LogSumExp(std::span<const double>()), DataError);
}

TEST(LogSumExpTest, NegativeInfinityEntriesAreIgnored) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(LogSumExp(Tensor::Vector({-inf, 0, 0})), std::numbers::ln2,
              1e-15);
  EXPECT_EQ(LogSumExp(Tensor::Vector({-inf, -inf})), -inf);
}

TEST(LogSumExpTest, BoundedByMaxAndMaxPlusLogN) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + rng.Below(20);
    const Tensor v = RandomTensor({n}, &rng, 50.0);
    const double m = *std::max_element(v.values().begin(), v.values().end());
    const double lse = LogSumExp(v);
    EXPECT_GE(lse, m);
    EXPECT_LE(lse, m + std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST(ElementwiseTest, Relu) {
  EXPECT_EQ(Relu(Tensor::Vector({-1, 0, 2})), Tensor::Vector({0, 0, 2}));
}

TEST(ElementwiseTest, Sigmoid) {
  EXPECT_EQ(Sigmoid(Tensor::Vector({0}))[0], 0.5);
  const Tensor s = Sigmoid(Tensor::Vector({-800, 800}));
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 1.0);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.Uniform(-20, 20);
    EXPECT_NEAR(SigmoidScalar(x), 1.0 / (1.0 + std::exp(-x)), 1e-15);
  }
}

TEST(ElementwiseTest, TanhMatchesExpm1Formula) {
  Rng rng(5);
  Tensor x({100});
  for (double& v : x.values()) v = rng.Uniform(-5, 5);
  const Tensor y = Tanh(x);
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = std::expm1(2 * x[i]);
    EXPECT_NEAR(y[i], e / (e + 2), 1e-12);
  }
}

TEST(ElementwiseTest, BinaryOps) {
  const Tensor a = Tensor::Vector({1, 2, 3});
  const Tensor b = Tensor::Vector({4, -5, 0.5});
  EXPECT_EQ(Add(a, b), Tensor::Vector({5, -3, 3.5}));
  EXPECT_EQ(Mul(a, b), Tensor::Vector({4, -10, 1.5}));
  EXPECT_THROW(Add(a, Tensor::Vector({1, 2})), ShapeError);
  EXPECT_THROW(Mul(Tensor({2, 3}), Tensor({3, 2})), ShapeError);
}

TEST(ElementwiseTest, AddRowBias) {
  const Tensor x = Tensor::FromRows({{1, 2}, {3, 4}});
  EXPECT_EQ(AddRowBias(x, Tensor::Vector({10, 20})),
            Tensor::FromRows({{11, 22}, {13, 24}}));
  EXPECT_THROW(AddRowBias(x, Tensor::Vector({1, 2, 3})), ShapeError);
}

TEST(ElementwiseTest, SoftmaxRowsSumToOne) {
  Rng rng(2);
  const Tensor p = SoftmaxRows(RandomTensor({30, 2}, &rng, 10.0));
  for (size_t i = 0; i < 30; ++i) EXPECT_NEAR(p(i, 0) + p(i, 1), 1.0, 1e-12);
}

LossFunction SumOfSquares() {
  return [](std::span<const Tensor> params, std::vector<Tensor>* grads) {
    double f = 0.0;
    if (grads) grads->clear();
    for (const Tensor& t : params) {
      Tensor g = Tensor::ZerosLike(t);
      for (size_t i = 0; i < t.size(); ++i) {
        f += t[i] * t[i];
        g[i] = 2 * t[i];
      }
      if (grads) grads->push_back(std::move(g));
    }
    return f;
  };
}

TEST(FiniteDiffCheckTest, QuadraticIsExact) {
  std::vector<Tensor> grads;
  const std::vector<Tensor> params = {Tensor::Vector({1, 2})};
  SumOfSquares()(params, &grads);
  EXPECT_EQ(grads[0], Tensor::Vector({2, 4}));
  const GradCheckResult r = FiniteDiffCheck(SumOfSquares(), params);
  EXPECT_EQ(r.coordinates_checked, 2u);
  EXPECT_LE(r.max_relative_error, 1e-9);
}

TEST(FiniteDiffCheckTest, UnusedParameterHasZeroGradient) {
  LossFunction loss = [](std::span<const Tensor> p, std::vector<Tensor>* g) {
    if (g) *g = {Tensor::Vector({3 * p[0][0] * p[0][0]}), Tensor::ZerosLike(p[1])};
    return p[0][0] * p[0][0] * p[0][0];
  };
  std::vector<Tensor> grads;
  const std::vector<Tensor> params = {Tensor::Vector({0.7}),
                                      Tensor::Vector({1, 2, 3})};
  loss(params, &grads);
  for (double v : grads[1].values()) EXPECT_EQ(v, 0.0);
  EXPECT_LE(FiniteDiffCheck(loss, params).max_relative_error, 1e-8);
}

TEST(FiniteDiffCheckTest, SamplesAtLeastTheBudgetAcrossTensors) {
  Rng rng(4);
  std::vector<Tensor> params = {RandomTensor({30, 10}, &rng),
                                RandomTensor({3}, &rng)};
  GradCheckOptions options;
  options.min_coordinates = 200;
  const GradCheckResult r = FiniteDiffCheck(SumOfSquares(), params, options);
  EXPECT_EQ(r.coordinates_checked, 200u);
  options.min_coordinates = 1000;
  EXPECT_EQ(FiniteDiffCheck(SumOfSquares(), params, options).coordinates_checked,
            303u);
}

TEST(FiniteDiffCheckTest, DetectsWrongGradient) {
  LossFunction loss = [](std::span<const Tensor> p, std::vector<Tensor>* g) {
    if (g) *g = {Tensor::Vector({1.01 * 2 * p[0][0]})};
    return p[0][0] * p[0][0];
  };
  EXPECT_GT(FiniteDiffCheck(loss, {Tensor::Vector({1.0})}).max_relative_error,
            1e-3);
}

TEST(FiniteDiffCheckTest, SkipsCoordinatesAcrossAKink) {
  // f = sum relu(theta); the first entry sits within eps of the kink.
  LossFunction loss = [](std::span<const Tensor> p, std::vector<Tensor>* g) {
    double f = 0.0;
    Tensor d = Tensor::ZerosLike(p[0]);
    for (size_t i = 0; i < p[0].size(); ++i) {
      f += std::max(0.0, p[0][i]);
      d[i] = p[0][i] > 0 ? 1.0 : 0.0;
    }
    if (g) *g = {d};
    return f;
  };
  const std::vector<Tensor> params = {Tensor::Vector({1e-6, 0.5, -0.5})};
  GradCheckOptions options;
  options.eps = 1e-4;
  EXPECT_GT(FiniteDiffCheck(loss, params, options).max_relative_error, 0.1);
  options.activation_pattern = [](std::span<const Tensor> p) {
    std::vector<uint8_t> s;
    for (double v : p[0].values()) s.push_back(v > 0);
    return s;
  };
  const GradCheckResult r = FiniteDiffCheck(loss, params, options);
  EXPECT_EQ(r.kinks_skipped, 1u);
  EXPECT_EQ(r.coordinates_checked, 2u);
  EXPECT_LE(r.max_relative_error, 1e-9);
}

TEST(FiniteDiffCheckTest, GuardedEntriesAreNotPerturbed) {
  const double inf = std::numeric_limits<double>::infinity();
  LossFunction loss = [](std::span<const Tensor> p, std::vector<Tensor>* g) {
    if (g) *g = {Tensor::Vector({2 * p[0][0], 0})};
    return p[0][0] * p[0][0];
  };
  const GradCheckResult r =
      FiniteDiffCheck(loss, {Tensor::Vector({0.3, -inf})});
  EXPECT_EQ(r.coordinates_checked, 1u);
}

TEST(FiniteDiffCheckTest, Errors) {
  LossFunction nan_loss = [](std::span<const Tensor> p, std::vector<Tensor>* g) {
    if (g) *g = {Tensor::ZerosLike(p[0])};
    return std::nan("");
  };
  EXPECT_THROW(FiniteDiffCheck(nan_loss, {Tensor::Vector({1})}), NumericError);
  GradCheckOptions options;
  options.eps = 1e-2;
  EXPECT_THROW(FiniteDiffCheck(SumOfSquares(), {Tensor::Vector({1})}, options),
               DataError);
  options.eps = 1e-8;
  EXPECT_THROW(FiniteDiffCheck(SumOfSquares(), {Tensor::Vector({1})}, options),
               DataError);
}

}  // namespace
}  // namespace truecase
