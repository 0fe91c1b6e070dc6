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

#ifndef TRUECASE_LAYERS_H_
#define TRUECASE_LAYERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "truecase/random.h"
#include "truecase/tensor.h"

namespace truecase {

// Encoder layers. Batched activations use a time-major layout: a tensor of
// shape [T*B x d] whose row t*B + b holds position t of sequence b. With
// B = 1 this is simply the [T x d] sequence matrix.

enum class Mode { kTrain, kEval };

struct DropoutSpec {
  double input_p = 0.25;
  double recurrent_p = 0.25;
  Mode mode = Mode::kEval;

  // Throws DataError unless both probabilities are in [0, 1).
  void Validate() const;
};

// Time-major padding description for a batch of B sequences of length up to
// T. mask[t*B + b] is 1 for real characters.
struct SequenceLayout {
  size_t batch = 1;
  size_t length = 0;
  std::vector<uint8_t> mask;

  static SequenceLayout Single(size_t length);
  size_t rows() const { return batch * length; }
  bool real(size_t row) const { return mask[row] != 0; }
};

// Weights of one LSTM direction: input W [4H x d_in], recurrent U [4H x H],
// bias b [4H]. Gate blocks are ordered i, f, g, o.
struct LstmParams {
  Tensor w;
  Tensor u;
  Tensor b;

  size_t hidden() const { return u.dim(1); }
  size_t input_dim() const { return w.dim(1); }
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// Row r is embedding row ids[r]. Rows with mask 0 (when a mask is given)
// are zero. Throws DataError for ids outside the table.
Tensor Embed(std::span<const int> ids, const Tensor& embedding,
             std::span<const uint8_t> mask = {});
// Accumulates d_out rows into d_embedding; masked rows are skipped.
void EmbedBackward(std::span<const int> ids, const Tensor& d_out,
                   Tensor* d_embedding, std::span<const uint8_t> mask = {});

// 'Same'-padded 1-D convolution followed by ReLU. filters is [k x d_in x F]
// with k odd, bias [F]. Positions outside [0, T) read as zero, so length is
// preserved.
Tensor Conv1dSame(const Tensor& x, size_t batch, const Tensor& filters,
                  const Tensor& bias);
// Gradients given the forward input and output. Outputs may be null;
// d_filters and d_bias are accumulated into, d_x is overwritten.
void Conv1dSameBackward(const Tensor& x, size_t batch, const Tensor& filters,
                        const Tensor& output, const Tensor& d_out, Tensor* d_x,
                        Tensor* d_filters, Tensor* d_bias);

// Inverted dropout mask: entries are 0 with probability p, else 1/(1-p).
void FillDropoutMask(double p, Rng* rng, std::span<double> out);
// Identity in eval mode or for p == 0; otherwise inverted dropout with a
// mask drawn from Rng(seed).
Tensor Dropout(const Tensor& x, double p, Mode mode, uint64_t seed);

// One LSTM step. rec_mask multiplies h_prev before the recurrent product
// (all ones in eval mode).
LstmState LstmCell(const Tensor& x_t, const Tensor& h_prev,
                   const Tensor& c_prev, const LstmParams& params,
                   const Tensor& rec_mask);

// Values saved by one LSTM direction for the backward pass.
struct LstmCache {
  Tensor input;     // [N x d_in]
  Tensor gates;     // [N x 4H] activated i, f, g, o
  Tensor cell_prev;  // [N x H]
  Tensor cell;       // [N x H]
  Tensor h_masked;   // [N x H] h_prev * rec_mask
};

// Runs one direction over the layout. Masked positions leave the state
// untouched and output zero. rec_mask is [B x H] or empty (all ones).
Tensor LstmForward(const Tensor& x, const SequenceLayout& layout,
                   const LstmParams& params, bool reverse,
                   const Tensor& rec_mask, LstmCache* cache);
// Returns d_x; parameter gradients are accumulated into grads.
Tensor LstmBackward(const Tensor& d_out, const SequenceLayout& layout,
                    const LstmParams& params, bool reverse,
                    const Tensor& rec_mask, const LstmCache& cache,
                    LstmParams* grads);

struct BiLstmCache {
  std::vector<LstmCache> directions;  // layer * 2 + {0 fwd, 1 bwd}
};

// Stacked bidirectional LSTM. params and rec_masks are indexed by
// layer * 2 + direction; rec_masks may be empty (eval). Output is
// [N x 2H], the per-position concatenation [forward ; backward] of the top
// layer.
Tensor BiLstmForward(const Tensor& x, const SequenceLayout& layout,
                     std::span<const LstmParams> params,
                     std::span<const Tensor> rec_masks, BiLstmCache* cache);
Tensor BiLstmBackward(const Tensor& d_out, const SequenceLayout& layout,
                      std::span<const LstmParams> params,
                      std::span<const Tensor> rec_masks,
                      const BiLstmCache& cache, std::span<LstmParams> grads);

// Affine map to per-character {U, L} scores: h [N x 2H] * weight [2H x 2]
// + bias [2].
Tensor Emissions(const Tensor& h, const Tensor& weight, const Tensor& bias);

// Glorot-uniform fill in +-sqrt(6 / (fan_in + fan_out)).
void GlorotUniform(size_t fan_in, size_t fan_out, Rng* rng, Tensor* t);

}  // namespace truecase

#endif  // TRUECASE_LAYERS_H_
