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

#include "truecase/gradcheck.h"

#include "truecase/layers.h"
#include "truecase/random.h"

namespace truecase {

ModelConfig TinyModelConfig() {
  ModelConfig cfg;
  cfg.vocab_size = 20;
  cfg.embed_dim = 8;
  cfg.conv_width = 5;
  cfg.conv_filters = 8;
  cfg.hidden = 16;
  cfg.num_layers = 2;
  return cfg;
}

std::vector<LabeledSequence> RandomSequences(size_t count, size_t max_length,
                                             size_t vocab_size,
                                             uint64_t seed) {
  Rng rng(MixSeed(seed, 0x5e9));
  std::vector<LabeledSequence> out(count);
  for (auto& seq : out) {
    const size_t len = 1 + rng.Below(max_length);
    for (size_t t = 0; t < len; ++t) {
      const int id = 2 + static_cast<int>(rng.Below(vocab_size - 2));
      seq.char_ids.push_back(id);
      seq.raw_chars.push_back(U'a' + static_cast<char32_t>(id));
      seq.labels.push_back(rng.Bernoulli(0.3) ? Label::kUpper : Label::kLower);
    }
  }
  return out;
}

GradCheckResult CheckModelGradient(const ModelParams& params,
                                   const std::vector<LabeledSequence>& data,
                                   const GradCheckOptions& options) {
  const Batch batch = MakeBatches(data, data.size(), {}).front();
  DropoutSpec eval;
  eval.mode = Mode::kEval;

  std::vector<Tensor> flat;
  for (const auto& [name, t] : params.Named()) flat.push_back(*t);

  LossFunction loss = [&](std::span<const Tensor> values,
                          std::vector<Tensor>* grads) {
    ModelParams p = params;
    auto named = p.Named();
    for (size_t i = 0; i < named.size(); ++i) *named[i].second = values[i];
    ModelParams g = ModelParams::ZerosLike(p);
    const double value =
        MeanBatchLoss(p, batch, eval, 0, grads ? &g : nullptr, data.size());
    if (grads) {
      grads->clear();
      for (const auto& [name, t] : g.Named()) grads->push_back(*t);
    }
    return value;
  };
  GradCheckOptions opts = options;
  if (params.config.use_cnn && !opts.activation_pattern) {
    // Time-major ids and mask, as the model lays them out.
    const size_t B = batch.batch_size, T = batch.max_length;
    std::vector<int> ids(T * B, kPadId);
    std::vector<uint8_t> mask(T * B, 0);
    for (size_t b = 0; b < B; ++b) {
      for (size_t t = 0; t < T; ++t) {
        ids[t * B + b] = batch.id(b, t);
        mask[t * B + b] = batch.real(b, t);
      }
    }
    // ReLU signs of the convolution; the only kinks in the loss.
    opts.activation_pattern = [ids, mask, B](std::span<const Tensor> values) {
      const Tensor x = Embed(ids, values[0], mask);
      const Tensor y = Conv1dSame(x, B, values[1], values[2]);
      std::vector<uint8_t> signs;
      for (size_t r = 0; r < y.dim(0); ++r) {
        if (!mask[r]) continue;
        for (double v : y.row(r)) signs.push_back(v > 0.0);
      }
      return signs;
    };
  }
  return FiniteDiffCheck(loss, std::move(flat), opts);
}

GradCheckResult RunDefaultGradCheck(uint64_t seed) {
  ModelParams params = ModelParams::Initialize(TinyModelConfig(), seed);
  Rng rng(MixSeed(seed, 0xb1a5));
  for (auto& lp : params.lstm) {
    for (double& v : lp.b.values()) v += 0.1 * rng.Normal();
  }
  for (double& v : params.conv_bias.values()) v = 0.1 * rng.Normal();
  for (double& v : params.emission_bias.values()) v = 0.1 * rng.Normal();
  for (size_t i = 0; i < crf::kNumTags; ++i) {
    for (size_t j = 0; j < crf::kNumTags; ++j) {
      if (CrfParams::IsLearned(i, j)) params.crf(i, j) = 0.5 * rng.Normal();
    }
  }
  const auto data = RandomSequences(2, 12, params.config.vocab_size, seed);
  GradCheckOptions options;
  options.seed = seed;
  options.min_coordinates = 400;
  // Smaller steps drown gradients of ~1e-8 in rounding noise of the loss.
  options.eps = 3e-4;
  return CheckModelGradient(params, data, options);
}

}  // namespace truecase
