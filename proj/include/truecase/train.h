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

#ifndef TRUECASE_TRAIN_H_
#define TRUECASE_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "truecase/checkpoint.h"
#include "truecase/corpus.h"
#include "truecase/model.h"

namespace truecase {

struct TrainConfig {
  double lr = 0.002;
  size_t batch_size = 64;
  double input_dropout = 0.25;
  double recurrent_dropout = 0.25;
  size_t max_epochs = 30;
  size_t patience = 3;
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Global gradient-norm clip; off when unset.
  std::optional<double> clip_norm;
  int min_count = 1;
  // Stop as soon as dev character accuracy reaches this value (0..1).
  std::optional<double> target_dev_accuracy;
  // Sequences per forward/backward unit and worker count; see
  // MeanBatchLoss.
  size_t micro_batch = 32;
  size_t threads = 1;

  // Architecture (vocab_size is filled in from the training corpus).
  ModelConfig model;

  void Validate() const;
};

// First and second moment estimates, one tensor per model parameter.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  uint64_t step = 0;

  static AdamState ZerosLike(const ModelParams& params);
};

// One Adam update. The step counter is incremented before the update. Throws
// NumericError naming the parameter if a gradient is non-finite.
void AdamStep(ModelParams* params, const ModelParams& grads, AdamState* state,
              const TrainConfig& cfg);

// Same update on a flat list of tensors (used by the optimizer tests).
void AdamStep(std::vector<Tensor>* params, const std::vector<Tensor>& grads,
              AdamState* state, const TrainConfig& cfg);

// Scales grads so their global L2 norm is at most max_norm. Returns the norm
// before clipping.
double ClipGradNorm(ModelParams* grads, double max_norm);

struct EpochRecord {
  size_t epoch = 0;
  // Mean over sequences of the training-mode NLL.
  double train_nll = 0.0;
  double train_nll_per_char = 0.0;
  double dev_accuracy = 0.0;
  double dev_f1 = 0.0;
  bool improved = false;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;
  // Why training stopped: "max_epochs", "patience" or "target".
  std::string stop_reason;
};

// Progress callback, invoked after each epoch.
using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains on already-derived sequences; the vocabulary is built from the
// training sequences only. Throws DataError for empty inputs and
// NumericError (with the last good epoch) on divergence.
TrainResult Train(const std::vector<LabeledSequence>& train,
                  const std::vector<LabeledSequence>& dev,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

TrainResult TrainFromFiles(const std::string& train_path,
                           const std::string& dev_path, const TrainConfig& cfg,
                           const EpochCallback& on_epoch = {});

}  // namespace truecase

#endif  // TRUECASE_TRAIN_H_
