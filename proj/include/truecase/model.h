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

#ifndef TRUECASE_MODEL_H_
#define TRUECASE_MODEL_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "truecase/corpus.h"
#include "truecase/crf.h"
#include "truecase/layers.h"
#include "truecase/tensor.h"

namespace truecase {

enum class Head { kCrf, kSoftmax };

const char* HeadName(Head head);
Head ParseHead(const std::string& name);

// Architecture hyperparameters. Defaults are the full CNN -> 2-layer BiLSTM
// -> CRF configuration.
struct ModelConfig {
  size_t vocab_size = 0;
  size_t embed_dim = 32;
  size_t conv_width = 5;
  size_t conv_filters = 32;
  size_t hidden = 150;
  size_t num_layers = 2;
  bool use_cnn = true;
  Head head = Head::kCrf;

  // Width of the first BiLSTM layer's input.
  size_t lstm_input_dim() const { return use_cnn ? conv_filters : embed_dim; }
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// All learnable tensors. Conv tensors are empty without the CNN and the
// transition matrix is empty for the softmax head.
struct ModelParams {
  ModelConfig config;
  Tensor embedding;      // [V x d_emb]
  Tensor conv_filters;   // [k x d_emb x F]
  Tensor conv_bias;      // [F]
  std::vector<LstmParams> lstm;  // layer * 2 + direction
  Tensor emission_weight;  // [2H x 2]
  Tensor emission_bias;    // [2]
  CrfParams crf;

  // Glorot-uniform weights, forget-gate bias 1, other biases 0, zero
  // transitions with -inf guards.
  static ModelParams Initialize(const ModelConfig& config, uint64_t seed);
  // Same shapes, all zero (used for gradients).
  static ModelParams ZerosLike(const ModelParams& params);

  // Stable, ordered names of every non-empty tensor, e.g. "lstm.1.bwd.u".
  std::vector<std::pair<std::string, Tensor*>> Named();
  std::vector<std::pair<std::string, const Tensor*>> Named() const;

  size_t NumParameters() const;
  // Adds other * scale element-wise.
  void AddScaled(const ModelParams& other, double scale);
  // Rounds every value to the nearest 32-bit float.
  void RoundToFloat();
};

// Per-batch training statistics. Losses are sums over sequences.
struct LossStats {
  double total_nll = 0.0;
  size_t sequences = 0;
  size_t characters = 0;
};

// Forward + backward over a batch. Returns summed NLL over the batch's
// sequences and, when grad is non-null, accumulates the summed gradient into
// it. In train mode per-sequence dropout masks are drawn from
// Rng(MixSeed(dropout_stream, example_index)).
LossStats BatchLoss(const ModelParams& params, const Batch& batch,
                    const DropoutSpec& dropout, uint64_t dropout_stream,
                    ModelParams* grad);

// Mean-over-sequences loss and gradient. The batch is split into fixed
// micro-batches of at most micro_batch sequences that may run on up to
// `threads` workers; their gradients are summed in micro-batch order, so the
// result does not depend on the thread count.
double MeanBatchLoss(const ModelParams& params, const Batch& batch,
                     const DropoutSpec& dropout, uint64_t dropout_stream,
                     ModelParams* grad, size_t micro_batch = 32,
                     size_t threads = 1);

// Per-position emission scores for each sequence in eval mode (T_b x 2).
std::vector<Tensor> BatchEmissions(const ModelParams& params,
                                   const Batch& batch);

// Decodes each sequence: Viterbi for the CRF head, per-position argmax (L
// on ties) for the softmax head.
std::vector<LabelSequence> Predict(const ModelParams& params,
                                   const Batch& batch);

// Copies rows [begin, end) of a batch, trimming padding to the new maximum.
Batch SliceBatch(const Batch& batch, size_t begin, size_t end);

}  // namespace truecase

#endif  // TRUECASE_MODEL_H_
