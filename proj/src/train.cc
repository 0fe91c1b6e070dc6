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

#include "truecase/train.h"

#include <cmath>
#include <sstream>

#include "truecase/errors.h"
#include "truecase/eval.h"
#include "truecase/random.h"

namespace truecase {
namespace {

void UpdateTensor(Tensor* param, const Tensor& grad, Tensor* m, Tensor* v,
                  double lr_t, const TrainConfig& cfg, double bias2) {
  for (size_t i = 0; i < param->size(); ++i) {
    const double g = grad[i];
    (*m)[i] = cfg.adam_beta1 * (*m)[i] + (1.0 - cfg.adam_beta1) * g;
    (*v)[i] = cfg.adam_beta2 * (*v)[i] + (1.0 - cfg.adam_beta2) * g * g;
    const double v_hat = (*v)[i] / bias2;
    (*param)[i] -= lr_t * (*m)[i] / (std::sqrt(v_hat) + cfg.adam_eps);
  }
}

std::string SettingsString(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "lr=" << cfg.lr << " batch_size=" << cfg.batch_size
      << " input_dropout=" << cfg.input_dropout
      << " recurrent_dropout=" << cfg.recurrent_dropout
      << " max_epochs=" << cfg.max_epochs << " patience=" << cfg.patience
      << " seed=" << cfg.seed;
  if (cfg.clip_norm) out << " clip=" << *cfg.clip_norm;
  return out.str();
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(lr > 0.0)) throw DataError("train: lr must be > 0");
  if (batch_size < 1) throw DataError("train: batch size must be >= 1");
  if (patience < 1) throw DataError("train: patience must be >= 1");
  if (clip_norm && !(*clip_norm > 0.0)) {
    throw DataError("train: clip norm must be > 0");
  }
  DropoutSpec{input_dropout, recurrent_dropout, Mode::kTrain}.Validate();
}

AdamState AdamState::ZerosLike(const ModelParams& params) {
  AdamState state;
  for (const auto& [name, t] : params.Named()) {
    state.m.push_back(Tensor::ZerosLike(*t));
    state.v.push_back(Tensor::ZerosLike(*t));
  }
  return state;
}

void AdamStep(std::vector<Tensor>* params, const std::vector<Tensor>& grads,
              AdamState* state, const TrainConfig& cfg) {
  if (grads.size() != params->size()) {
    throw ShapeError("adam: gradient count mismatch");
  }
  if (state->m.empty()) {
    for (const Tensor& p : *params) {
      state->m.push_back(Tensor::ZerosLike(p));
      state->v.push_back(Tensor::ZerosLike(p));
    }
  }
  for (size_t i = 0; i < params->size(); ++i) {
    if (grads[i].shape() != (*params)[i].shape()) {
      throw ShapeError("adam: gradient " + std::to_string(i) + " shape " +
                       ShapeToString(grads[i].shape()) + " vs parameter " +
                       ShapeToString((*params)[i].shape()));
    }
    if (!grads[i].AllFinite()) {
      throw NumericError("adam: non-finite gradient for parameter " +
                         std::to_string(i));
    }
  }
  ++state->step;
  const auto t = static_cast<double>(state->step);
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, t);
  for (size_t i = 0; i < params->size(); ++i) {
    UpdateTensor(&(*params)[i], grads[i], &state->m[i], &state->v[i],
                 cfg.lr / bias1, cfg, bias2);
  }
}

void AdamStep(ModelParams* params, const ModelParams& grads, AdamState* state,
              const TrainConfig& cfg) {
  auto p = params->Named();
  const auto g = grads.Named();
  if (p.size() != g.size()) throw ShapeError("adam: tensor count mismatch");
  if (state->m.empty()) *state = AdamState::ZerosLike(*params);
  for (size_t i = 0; i < p.size(); ++i) {
    if (!g[i].second->AllFinite()) {
      throw NumericError("adam: non-finite gradient for " + p[i].first);
    }
  }
  ++state->step;
  const auto t = static_cast<double>(state->step);
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, t);
  for (size_t i = 0; i < p.size(); ++i) {
    UpdateTensor(p[i].second, *g[i].second, &state->m[i], &state->v[i],
                 cfg.lr / bias1, cfg, bias2);
  }
}

double ClipGradNorm(ModelParams* grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, t] : grads->Named()) {
    for (double v : t->values()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [name, t] : grads->Named()) {
      for (double& v : t->values()) v *= scale;
    }
  }
  return norm;
}

TrainResult Train(const std::vector<LabeledSequence>& train,
                  const std::vector<LabeledSequence>& dev,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.Validate();
  if (train.empty()) throw DataError("train: empty training corpus");
  if (dev.empty()) throw DataError("train: empty dev corpus");

  std::vector<std::u32string> lowered;
  lowered.reserve(train.size());
  for (const auto& s : train) lowered.push_back(s.raw_chars);
  const Vocabulary vocab = BuildVocab(lowered, cfg.min_count);

  std::vector<LabeledSequence> train_enc, dev_enc;
  for (const auto& s : train) train_enc.push_back(Encode(s, vocab));
  for (const auto& s : dev) dev_enc.push_back(Encode(s, vocab));
  std::vector<LabelSequence> dev_gold;
  for (const auto& s : dev) dev_gold.push_back(s.labels);

  ModelConfig model_cfg = cfg.model;
  model_cfg.vocab_size = vocab.size();
  ModelParams params = ModelParams::Initialize(model_cfg, cfg.seed);
  AdamState adam = AdamState::ZerosLike(params);
  const DropoutSpec dropout{cfg.input_dropout, cfg.recurrent_dropout,
                            Mode::kTrain};
  const std::string settings = SettingsString(cfg);

  TrainResult result;
  double best_f1 = -1.0;
  size_t since_best = 0;
  result.stop_reason = "max_epochs";
  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const std::vector<Batch> batches =
        MakeBatches(train_enc, cfg.batch_size, MixSeed(cfg.seed, epoch));
    const uint64_t stream = MixSeed(cfg.seed ^ 0xd20f0u, epoch);
    double nll_sum = 0.0;
    size_t chars = 0;
    for (const Batch& batch : batches) {
      ModelParams grad = ModelParams::ZerosLike(params);
      const double loss = MeanBatchLoss(params, batch, dropout, stream, &grad,
                                        cfg.micro_batch, cfg.threads);
      if (!std::isfinite(loss)) {
        throw NumericError("training diverged in epoch " +
                           std::to_string(epoch) + "; last good epoch " +
                           std::to_string(epoch - 1));
      }
      if (cfg.clip_norm) ClipGradNorm(&grad, *cfg.clip_norm);
      try {
        AdamStep(&params, grad, &adam, cfg);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " in epoch " +
                           std::to_string(epoch) + "; last good epoch " +
                           std::to_string(epoch - 1));
      }
      nll_sum += loss * static_cast<double>(batch.batch_size);
      for (size_t len : batch.lengths) chars += len;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_nll = nll_sum / static_cast<double>(train_enc.size());
    record.train_nll_per_char = nll_sum / static_cast<double>(chars);
    const EvalReport report =
        Score(PredictSequences(params, dev_enc, cfg.threads), dev_gold);
    record.dev_accuracy = report.accuracy();
    record.dev_f1 = report.f1();
    record.improved = record.dev_f1 > best_f1;
    if (record.improved) {
      best_f1 = record.dev_f1;
      since_best = 0;
      result.checkpoint =
          Checkpoint::Snapshot(params, vocab, best_f1, epoch, settings);
    } else {
      ++since_best;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (cfg.target_dev_accuracy && record.dev_accuracy >= *cfg.target_dev_accuracy) {
      result.stop_reason = "target";
      break;
    }
    if (since_best >= cfg.patience) {
      result.stop_reason = "patience";
      break;
    }
  }
  return result;
}

TrainResult TrainFromFiles(const std::string& train_path,
                           const std::string& dev_path, const TrainConfig& cfg,
                           const EpochCallback& on_epoch) {
  const auto train = ReadCorpus(train_path);
  if (train.empty()) throw DataError("empty corpus: " + train_path);
  const auto dev = ReadCorpus(dev_path);
  if (dev.empty()) throw DataError("empty corpus: " + dev_path);
  return Train(train, dev, cfg, on_epoch);
}

}  // namespace truecase
