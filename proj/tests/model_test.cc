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

#include "truecase/model.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.h"
#include "truecase/errors.h"
#include "truecase/gradcheck.h"

namespace truecase {
namespace {

ModelConfig Small(Head head = Head::kCrf, bool use_cnn = true) {
  ModelConfig cfg = TinyModelConfig();
  cfg.head = head;
  cfg.use_cnn = use_cnn;
  return cfg;
}

Batch OneBatch(const std::vector<LabeledSequence>& data) {
  return MakeBatches(data, data.size(), std::nullopt).front();
}

TEST(ModelConfigTest, DefaultsMatchThePaperArchitecture) {
  const ModelConfig cfg;
  EXPECT_EQ(cfg.conv_width, 5u);
  EXPECT_EQ(cfg.conv_filters, 32u);
  EXPECT_EQ(cfg.embed_dim, 32u);
  EXPECT_EQ(cfg.hidden, 150u);
  EXPECT_EQ(cfg.num_layers, 2u);
  EXPECT_EQ(cfg.head, Head::kCrf);
  EXPECT_TRUE(cfg.use_cnn);
}

TEST(ModelConfigTest, Validate) {
  ModelConfig cfg = Small();
  EXPECT_NO_THROW(cfg.Validate());
  cfg.conv_width = 4;
  EXPECT_THROW(cfg.Validate(), DataError);
  cfg = Small();
  cfg.hidden = 0;
  EXPECT_THROW(cfg.Validate(), DataError);
  EXPECT_EQ(ParseHead("softmax"), Head::kSoftmax);
  EXPECT_THROW(ParseHead("hmm"), DataError);
}

TEST(ModelParamsTest, DefaultShapes) {
  ModelConfig cfg;
  cfg.vocab_size = 50;
  const ModelParams p = ModelParams::Initialize(cfg, 1);
  const auto named = p.Named();
  std::vector<std::string> names;
  for (const auto& [name, t] : named) names.push_back(name);
  EXPECT_EQ(names, (std::vector<std::string>{
                       "embedding", "conv.filters", "conv.bias",
                       "lstm.0.fwd.w", "lstm.0.fwd.u", "lstm.0.fwd.b",
                       "lstm.0.bwd.w", "lstm.0.bwd.u", "lstm.0.bwd.b",
                       "lstm.1.fwd.w", "lstm.1.fwd.u", "lstm.1.fwd.b",
                       "lstm.1.bwd.w", "lstm.1.bwd.u", "lstm.1.bwd.b",
                       "emission.weight", "emission.bias", "crf.transitions"}));
  EXPECT_EQ(p.embedding.shape(), (Shape{50, 32}));
  EXPECT_EQ(p.conv_filters.shape(), (Shape{5, 32, 32}));
  EXPECT_EQ(p.lstm[0].w.shape(), (Shape{600, 32}));
  EXPECT_EQ(p.lstm[2].w.shape(), (Shape{600, 300}));
  EXPECT_EQ(p.lstm[3].u.shape(), (Shape{600, 150}));
  EXPECT_EQ(p.emission_weight.shape(), (Shape{300, 2}));
  EXPECT_EQ(p.crf.transitions.shape(), (Shape{4, 4}));
}

TEST(ModelParamsTest, AblationsDropTensors) {
  ModelConfig cfg = Small(Head::kSoftmax, false);
  const ModelParams p = ModelParams::Initialize(cfg, 1);
  for (const auto& [name, t] : p.Named()) {
    EXPECT_EQ(name.find("conv"), std::string::npos);
    EXPECT_EQ(name.find("crf"), std::string::npos);
  }
  EXPECT_EQ(p.lstm[0].w.dim(1), cfg.embed_dim);
}

TEST(ModelParamsTest, Initialization) {
  const ModelParams p = ModelParams::Initialize(Small(), 3);
  const size_t H = p.config.hidden;
  for (const LstmParams& lp : p.lstm) {
    for (size_t k = 0; k < 4 * H; ++k) {
      EXPECT_EQ(lp.b[k], k >= H && k < 2 * H ? 1.0 : 0.0);
    }
    const double limit = std::sqrt(6.0 / (lp.w.dim(1) + 4 * H));
    for (double v : lp.w.values()) EXPECT_LE(std::abs(v), limit);
  }
  for (double v : p.conv_bias.values()) EXPECT_EQ(v, 0.0);
  for (double v : p.emission_bias.values()) EXPECT_EQ(v, 0.0);
  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = 0; j < 4; ++j) {
      if (CrfParams::IsLearned(i, j)) EXPECT_EQ(p.crf(i, j), 0.0);
    }
  }
  EXPECT_EQ(ModelParams::Initialize(Small(), 3).embedding, p.embedding);
  EXPECT_NE(ModelParams::Initialize(Small(), 4).embedding, p.embedding);
}

TEST(ModelParamsTest, RoundToFloat) {
  ModelParams p = ModelParams::Initialize(Small(), 1);
  p.RoundToFloat();
  for (const auto& [name, t] : p.Named()) {
    for (double v : t->values()) {
      if (std::isfinite(v)) EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
    }
  }
}

TEST(BatchLossTest, BatchEqualsSumOfSingles) {
  for (Head head : {Head::kCrf, Head::kSoftmax}) {
    const ModelParams p = ModelParams::Initialize(Small(head), 5);
    const auto data = RandomSequences(5, 15, 20, 6);
    const DropoutSpec eval;
    const LossStats all = BatchLoss(p, OneBatch(data), eval, 0, nullptr);
    double sum = 0.0;
    for (const auto& seq : data) {
      sum += BatchLoss(p, OneBatch({seq}), eval, 0, nullptr).total_nll;
    }
    EXPECT_NEAR(all.total_nll, sum, 1e-10);
    EXPECT_EQ(all.sequences, 5u);
  }
}

TEST(BatchLossTest, MatchesCrfNllOfEmissions) {
  const ModelParams p = ModelParams::Initialize(Small(), 7);
  const auto data = RandomSequences(3, 10, 20, 8);
  const Batch batch = OneBatch(data);
  const auto ems = BatchEmissions(p, batch);
  double want = 0.0;
  for (size_t b = 0; b < data.size(); ++b) {
    want += Nll(ems[b], p.crf, data[b].labels);
  }
  EXPECT_NEAR(BatchLoss(p, batch, {}, 0, nullptr).total_nll, want, 1e-12);
}

TEST(BatchLossTest, UninformedModelIsNearUniform) {
  const ModelParams p = ModelParams::Initialize(Small(), 9);
  const auto data = RandomSequences(20, 30, 20, 10);
  const LossStats s = BatchLoss(p, OneBatch(data), {}, 0, nullptr);
  const double per_char = s.total_nll / static_cast<double>(s.characters);
  EXPECT_NEAR(per_char, std::numbers::ln2, 0.1);
}

TEST(MeanBatchLossTest, ThreadCountDoesNotChangeResult) {
  const ModelParams p = ModelParams::Initialize(Small(), 11);
  const auto data = RandomSequences(37, 20, 20, 12);
  const Batch batch = OneBatch(data);
  DropoutSpec train;
  train.mode = Mode::kTrain;
  ModelParams g1 = ModelParams::ZerosLike(p), g4 = ModelParams::ZerosLike(p);
  const double l1 = MeanBatchLoss(p, batch, train, 99, &g1, 8, 1);
  const double l4 = MeanBatchLoss(p, batch, train, 99, &g4, 8, 4);
  EXPECT_EQ(l1, l4);
  const auto a = g1.Named(), b = g4.Named();
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].second, *b[i].second);
}

TEST(MeanBatchLossTest, DropoutDependsOnStreamAndModeOnly) {
  const ModelParams p = ModelParams::Initialize(Small(), 13);
  const Batch batch = OneBatch(RandomSequences(4, 12, 20, 14));
  DropoutSpec train;
  train.mode = Mode::kTrain;
  const double a = MeanBatchLoss(p, batch, train, 1, nullptr);
  EXPECT_EQ(a, MeanBatchLoss(p, batch, train, 1, nullptr));
  EXPECT_NE(a, MeanBatchLoss(p, batch, train, 2, nullptr));
  const DropoutSpec eval;
  EXPECT_EQ(MeanBatchLoss(p, batch, eval, 1, nullptr),
            MeanBatchLoss(p, batch, eval, 2, nullptr));
}

TEST(MeanBatchLossTest, DropoutMaskFollowsTheExampleNotItsSlot) {
  // The same example gets the same masks wherever it lands in a batch.
  const ModelParams p = ModelParams::Initialize(Small(), 15);
  const auto data = RandomSequences(6, 12, 20, 16);
  DropoutSpec train;
  train.mode = Mode::kTrain;
  const auto batches = MakeBatches(data, 6, 77);
  const double shuffled = BatchLoss(p, batches[0], train, 5, nullptr).total_nll;
  const double ordered = BatchLoss(p, OneBatch(data), train, 5, nullptr).total_nll;
  EXPECT_NEAR(shuffled, ordered, 1e-10);
}

TEST(GradientTest, TinyModelAllHeads) {
  struct Case {
    Head head;
    bool cnn;
  };
  for (const Case c : {Case{Head::kCrf, true}, Case{Head::kSoftmax, true},
                       Case{Head::kCrf, false}}) {
    ModelParams p = ModelParams::Initialize(Small(c.head, c.cnn), 21);
    Rng rng(22);
    for (auto& lp : p.lstm) {
      for (double& v : lp.b.values()) v += 0.1 * rng.Normal();
    }
    for (double& v : p.emission_bias.values()) v = 0.1 * rng.Normal();
    const auto data = RandomSequences(2, 12, 20, 23);
    GradCheckOptions options;
    options.eps = 3e-4;
    options.min_coordinates = 300;
    const GradCheckResult r = CheckModelGradient(p, data, options);
    EXPECT_LE(r.max_relative_error, kGradCheckTolerance)
        << HeadName(c.head) << " cnn=" << c.cnn << " worst "
        << p.Named()[r.worst_param].first;
    EXPECT_EQ(r.coordinates_checked, 300u);
  }
}

TEST(GradientTest, DefaultCheckSeeds) {
  for (uint64_t seed : {0, 1, 2}) {
    const GradCheckResult r = RunDefaultGradCheck(seed);
    EXPECT_LE(r.max_relative_error, kGradCheckTolerance) << seed;
    EXPECT_GE(r.coordinates_checked, 200u);
  }
}

TEST(FinitenessTest, ForwardAndBackwardStayFinite) {
  // Large weights push gates and CRF scores toward saturation.
  for (uint64_t seed = 0; seed < 5; ++seed) {
    ModelParams p = ModelParams::Initialize(Small(), seed);
    ModelParams big = ModelParams::ZerosLike(p);
    big.AddScaled(p, 30.0);
    for (const ModelParams* params : {&p, &big}) {
      const Batch batch = OneBatch(RandomSequences(8, 40, 20, seed));
      DropoutSpec train;
      train.mode = Mode::kTrain;
      ModelParams g = ModelParams::ZerosLike(*params);
      const double loss = MeanBatchLoss(*params, batch, train, seed, &g);
      EXPECT_TRUE(std::isfinite(loss));
      for (const auto& [name, t] : g.Named()) {
        EXPECT_TRUE(t->AllFiniteOrNegInf()) << name;
        if (name != "crf.transitions") EXPECT_TRUE(t->AllFinite()) << name;
      }
    }
  }
}

TEST(PredictTest, SoftmaxTiesPreferLower) {
  ModelParams p = ModelParams::Initialize(Small(Head::kSoftmax), 1);
  p.emission_weight.SetZero();
  p.emission_bias.SetZero();
  for (const auto& labels : Predict(p, OneBatch(RandomSequences(3, 9, 20, 2)))) {
    for (Label l : labels) EXPECT_EQ(l, Label::kLower);
  }
}

TEST(PredictTest, CrfUsesViterbi) {
  const ModelParams p = ModelParams::Initialize(Small(), 31);
  const Batch batch = OneBatch(RandomSequences(4, 10, 20, 32));
  const auto ems = BatchEmissions(p, batch);
  const auto pred = Predict(p, batch);
  for (size_t b = 0; b < 4; ++b) {
    EXPECT_EQ(ems[b].dim(0), batch.lengths[b]);
    EXPECT_EQ(pred[b], Viterbi(ems[b], p.crf).labels);
  }
}

TEST(SliceBatchTest, TrimsPadding) {
  const auto data = RandomSequences(5, 20, 20, 3);
  const Batch batch = OneBatch(data);
  const Batch part = SliceBatch(batch, 1, 3);
  EXPECT_EQ(part.batch_size, 2u);
  EXPECT_EQ(part.max_length, std::max(data[1].size(), data[2].size()));
  for (size_t t = 0; t < data[2].size(); ++t) {
    EXPECT_EQ(part.id(1, t), data[2].char_ids[t]);
  }
}

}  // namespace
}  // namespace truecase
