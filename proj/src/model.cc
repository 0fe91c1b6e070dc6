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

#include "truecase/errors.h"
#include "truecase/parallel.h"
#include "truecase/random.h"

namespace truecase {
namespace {

const char* kDirectionNames[] = {"fwd", "bwd"};

// Batch inputs rearranged to the time-major layout used by the layers.
struct TimeMajor {
  SequenceLayout layout;
  std::vector<int> ids;
};

TimeMajor ToTimeMajor(const Batch& batch) {
  TimeMajor tm;
  tm.layout.batch = batch.batch_size;
  tm.layout.length = batch.max_length;
  const size_t n = batch.batch_size * batch.max_length;
  tm.ids.resize(n);
  tm.layout.mask.resize(n);
  for (size_t b = 0; b < batch.batch_size; ++b) {
    for (size_t t = 0; t < batch.max_length; ++t) {
      tm.ids[t * batch.batch_size + b] = batch.id(b, t);
      tm.layout.mask[t * batch.batch_size + b] = batch.real(b, t) ? 1 : 0;
    }
  }
  return tm;
}

// Emission rows of sequence b as a [T_b x 2] tensor.
Tensor GatherSequence(const Tensor& emissions, const Batch& batch, size_t b) {
  const size_t len = batch.lengths[b];
  Tensor out({len, kNumLabels});
  for (size_t t = 0; t < len; ++t) {
    const auto src = emissions.row(t * batch.batch_size + b);
    out(t, 0) = src[0];
    out(t, 1) = src[1];
  }
  return out;
}

LabelSequence BatchLabels(const Batch& batch, size_t b) {
  LabelSequence labels(batch.lengths[b]);
  for (size_t t = 0; t < labels.size(); ++t) labels[t] = batch.label(b, t);
  return labels;
}

// Activations kept for the backward pass.
struct ForwardPass {
  TimeMajor tm;
  Tensor input_mask;  // dropout mask on embeddings, empty in eval
  std::vector<Tensor> rec_masks;
  Tensor embedded;    // after input dropout
  Tensor conv_out;
  Tensor encoded;     // BiLSTM output
  BiLstmCache lstm_cache;
  Tensor emissions;
};

void DrawDropoutMasks(const ModelParams& params, const Batch& batch,
                      const DropoutSpec& dropout, uint64_t stream,
                      ForwardPass* fp) {
  if (dropout.mode != Mode::kTrain) return;
  const ModelConfig& cfg = params.config;
  const size_t bsz = batch.batch_size;
  const bool input = dropout.input_p > 0.0;
  const bool recurrent = dropout.recurrent_p > 0.0;
  if (input) fp->input_mask = Tensor({fp->tm.layout.rows(), cfg.embed_dim});
  if (recurrent) {
    fp->rec_masks.assign(params.lstm.size(), Tensor({bsz, cfg.hidden}));
  }
  for (size_t b = 0; b < bsz; ++b) {
    Rng rng(MixSeed(stream, batch.example_indices[b]));
    if (input) {
      for (size_t t = 0; t < batch.lengths[b]; ++t) {
        FillDropoutMask(dropout.input_p, &rng,
                        fp->input_mask.row(t * bsz + b));
      }
    }
    if (recurrent) {
      for (Tensor& mask : fp->rec_masks) {
        FillDropoutMask(dropout.recurrent_p, &rng, mask.row(b));
      }
    }
  }
}

ForwardPass RunForward(const ModelParams& params, const Batch& batch,
                       const DropoutSpec& dropout, uint64_t stream) {
  const ModelConfig& cfg = params.config;
  ForwardPass fp;
  fp.tm = ToTimeMajor(batch);
  DrawDropoutMasks(params, batch, dropout, stream, &fp);
  fp.embedded = Embed(fp.tm.ids, params.embedding, fp.tm.layout.mask);
  if (!fp.input_mask.empty()) {
    fp.embedded.matrix().array() *= fp.input_mask.matrix().array();
  }
  const Tensor* lstm_input = &fp.embedded;
  if (cfg.use_cnn) {
    fp.conv_out = Conv1dSame(fp.embedded, batch.batch_size,
                             params.conv_filters, params.conv_bias);
    lstm_input = &fp.conv_out;
  }
  fp.encoded = BiLstmForward(*lstm_input, fp.tm.layout, params.lstm,
                             fp.rec_masks, &fp.lstm_cache);
  fp.emissions =
      Emissions(fp.encoded, params.emission_weight, params.emission_bias);
  return fp;
}

}  // namespace

const char* HeadName(Head head) {
  return head == Head::kCrf ? "crf" : "softmax";
}

Head ParseHead(const std::string& name) {
  if (name == "crf") return Head::kCrf;
  if (name == "softmax") return Head::kSoftmax;
  throw DataError("unknown head '" + name + "'");
}

void ModelConfig::Validate() const {
  if (vocab_size < 3 || embed_dim == 0 || hidden == 0 || num_layers == 0) {
    throw DataError("model config: sizes must be positive (vocab >= 3)");
  }
  if (use_cnn && (conv_width == 0 || conv_width % 2 == 0 || conv_filters == 0)) {
    throw DataError("model config: conv width must be odd and filters > 0");
  }
}

ModelParams ModelParams::Initialize(const ModelConfig& config, uint64_t seed) {
  config.Validate();
  Rng rng(MixSeed(seed, 0x1e1));
  ModelParams p;
  p.config = config;
  const size_t d = config.embed_dim, h = config.hidden;
  p.embedding = Tensor({config.vocab_size, d});
  GlorotUniform(config.vocab_size, d, &rng, &p.embedding);
  if (config.use_cnn) {
    const size_t k = config.conv_width, f = config.conv_filters;
    p.conv_filters = Tensor({k, d, f});
    GlorotUniform(k * d, k * f, &rng, &p.conv_filters);
    p.conv_bias = Tensor({f});
  }
  for (size_t l = 0; l < config.num_layers; ++l) {
    const size_t in = l == 0 ? config.lstm_input_dim() : 2 * h;
    for (size_t dir = 0; dir < 2; ++dir) {
      LstmParams lp{Tensor({4 * h, in}), Tensor({4 * h, h}), Tensor({4 * h})};
      GlorotUniform(in, 4 * h, &rng, &lp.w);
      GlorotUniform(h, 4 * h, &rng, &lp.u);
      for (size_t k = h; k < 2 * h; ++k) lp.b[k] = 1.0;
      p.lstm.push_back(std::move(lp));
    }
  }
  p.emission_weight = Tensor({2 * h, kNumLabels});
  GlorotUniform(2 * h, kNumLabels, &rng, &p.emission_weight);
  p.emission_bias = Tensor({kNumLabels});
  if (config.head == Head::kCrf) p.crf = CrfParams::Zero();
  return p;
}

ModelParams ModelParams::ZerosLike(const ModelParams& params) {
  ModelParams z = params;
  for (auto& [name, t] : z.Named()) t->SetZero();
  return z;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::Named() {
  std::vector<std::pair<std::string, Tensor*>> out;
  auto add = [&out](std::string name, Tensor* t) {
    if (!t->empty()) out.emplace_back(std::move(name), t);
  };
  add("embedding", &embedding);
  add("conv.filters", &conv_filters);
  add("conv.bias", &conv_bias);
  for (size_t i = 0; i < lstm.size(); ++i) {
    const std::string prefix = "lstm." + std::to_string(i / 2) + "." +
                               kDirectionNames[i % 2] + ".";
    add(prefix + "w", &lstm[i].w);
    add(prefix + "u", &lstm[i].u);
    add(prefix + "b", &lstm[i].b);
  }
  add("emission.weight", &emission_weight);
  add("emission.bias", &emission_bias);
  add("crf.transitions", &crf.transitions);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::Named() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->Named()) {
    out.emplace_back(name, t);
  }
  return out;
}

size_t ModelParams::NumParameters() const {
  size_t n = 0;
  for (const auto& [name, t] : Named()) n += t->size();
  return n;
}

void ModelParams::AddScaled(const ModelParams& other, double scale) {
  auto mine = Named();
  auto theirs = other.Named();
  if (mine.size() != theirs.size()) {
    throw ShapeError("model params: tensor count mismatch");
  }
  for (size_t i = 0; i < mine.size(); ++i) {
    Tensor& a = *mine[i].second;
    const Tensor& b = *theirs[i].second;
    if (a.shape() != b.shape()) {
      throw ShapeError("model params: " + mine[i].first + " shape mismatch");
    }
    for (size_t k = 0; k < a.size(); ++k) a[k] += scale * b[k];
  }
}

void ModelParams::RoundToFloat() {
  for (auto& [name, t] : Named()) {
    for (double& v : t->values()) v = static_cast<double>(static_cast<float>(v));
  }
}

LossStats BatchLoss(const ModelParams& params, const Batch& batch,
                    const DropoutSpec& dropout, uint64_t dropout_stream,
                    ModelParams* grad) {
  const ModelConfig& cfg = params.config;
  ForwardPass fp = RunForward(params, batch, dropout, dropout_stream);
  const size_t bsz = batch.batch_size;

  LossStats stats;
  stats.sequences = bsz;
  Tensor d_emissions(fp.emissions.shape());
  for (size_t b = 0; b < bsz; ++b) {
    const size_t len = batch.lengths[b];
    stats.characters += len;
    const LabelSequence gold = BatchLabels(batch, b);
    if (cfg.head == Head::kCrf) {
      const Tensor em = GatherSequence(fp.emissions, batch, b);
      Tensor d_em;
      stats.total_nll += NllWithGradient(
          em, params.crf, gold, grad ? &d_em : nullptr,
          grad ? &grad->crf.transitions : nullptr);
      if (grad) {
        for (size_t t = 0; t < len; ++t) {
          auto dst = d_emissions.row(t * bsz + b);
          dst[0] = d_em(t, 0);
          dst[1] = d_em(t, 1);
        }
      }
    } else {
      for (size_t t = 0; t < len; ++t) {
        const size_t r = t * bsz + b;
        const auto row = fp.emissions.row(r);
        const double lse = LogSumExp(row);
        const auto y = static_cast<size_t>(gold[t]);
        stats.total_nll += lse - row[y];
        if (grad) {
          auto dst = d_emissions.row(r);
          for (size_t j = 0; j < kNumLabels; ++j) {
            dst[j] = std::exp(row[j] - lse) - (j == y ? 1.0 : 0.0);
          }
        }
      }
    }
  }
  if (grad == nullptr) return stats;

  grad->emission_weight.matrix().noalias() +=
      fp.encoded.matrix().transpose() * d_emissions.matrix();
  AddColumnSums(d_emissions.matrix(), grad->emission_bias.values());
  Tensor d_encoded(fp.encoded.shape());
  d_encoded.matrix().noalias() =
      d_emissions.matrix() * params.emission_weight.matrix().transpose();

  Tensor d_lstm_in = BiLstmBackward(d_encoded, fp.tm.layout, params.lstm,
                                    fp.rec_masks, fp.lstm_cache, grad->lstm);
  Tensor d_embedded;
  if (cfg.use_cnn) {
    Conv1dSameBackward(fp.embedded, bsz, params.conv_filters, fp.conv_out,
                       d_lstm_in, &d_embedded, &grad->conv_filters,
                       &grad->conv_bias);
  } else {
    d_embedded = std::move(d_lstm_in);
  }
  if (!fp.input_mask.empty()) {
    d_embedded.matrix().array() *= fp.input_mask.matrix().array();
  }
  EmbedBackward(fp.tm.ids, d_embedded, &grad->embedding, fp.tm.layout.mask);
  return stats;
}

Batch SliceBatch(const Batch& batch, size_t begin, size_t end) {
  Batch out;
  out.batch_size = end - begin;
  for (size_t b = begin; b < end; ++b) {
    out.max_length = std::max(out.max_length, batch.lengths[b]);
  }
  const size_t t_max = out.max_length;
  out.ids.assign(out.batch_size * t_max, kPadId);
  out.labels.assign(out.batch_size * t_max, Label::kLower);
  out.mask.assign(out.batch_size * t_max, 0);
  for (size_t b = begin; b < end; ++b) {
    out.lengths.push_back(batch.lengths[b]);
    out.example_indices.push_back(batch.example_indices[b]);
    for (size_t t = 0; t < t_max; ++t) {
      const size_t dst = (b - begin) * t_max + t;
      out.ids[dst] = batch.id(b, t);
      out.labels[dst] = batch.label(b, t);
      out.mask[dst] = batch.mask[b * batch.max_length + t];
    }
  }
  return out;
}

double MeanBatchLoss(const ModelParams& params, const Batch& batch,
                     const DropoutSpec& dropout, uint64_t dropout_stream,
                     ModelParams* grad, size_t micro_batch, size_t threads) {
  micro_batch = std::max<size_t>(micro_batch, 1);
  const size_t parts = (batch.batch_size + micro_batch - 1) / micro_batch;
  std::vector<LossStats> stats(parts);
  std::vector<ModelParams> grads;
  if (grad) grads.assign(parts, ModelParams::ZerosLike(params));
  ParallelFor(parts, threads, [&](size_t i) {
    const size_t begin = i * micro_batch;
    const size_t end = std::min(batch.batch_size, begin + micro_batch);
    const Batch part = parts == 1 ? batch : SliceBatch(batch, begin, end);
    stats[i] = BatchLoss(params, part, dropout, dropout_stream,
                         grad ? &grads[i] : nullptr);
  });
  const double scale = 1.0 / static_cast<double>(batch.batch_size);
  double total = 0.0;
  for (size_t i = 0; i < parts; ++i) {
    total += stats[i].total_nll;
    if (grad) grad->AddScaled(grads[i], scale);
  }
  return total * scale;
}

std::vector<Tensor> BatchEmissions(const ModelParams& params,
                                   const Batch& batch) {
  DropoutSpec eval;
  eval.mode = Mode::kEval;
  const ForwardPass fp = RunForward(params, batch, eval, 0);
  std::vector<Tensor> out;
  for (size_t b = 0; b < batch.batch_size; ++b) {
    out.push_back(GatherSequence(fp.emissions, batch, b));
  }
  return out;
}

std::vector<LabelSequence> Predict(const ModelParams& params,
                                   const Batch& batch) {
  std::vector<LabelSequence> out;
  for (const Tensor& em : BatchEmissions(params, batch)) {
    if (params.config.head == Head::kCrf) {
      out.push_back(Viterbi(em, params.crf).labels);
    } else {
      LabelSequence labels(em.dim(0));
      for (size_t t = 0; t < labels.size(); ++t) {
        labels[t] = em(t, 0) > em(t, 1) ? Label::kUpper : Label::kLower;
      }
      out.push_back(std::move(labels));
    }
  }
  return out;
}

}  // namespace truecase
