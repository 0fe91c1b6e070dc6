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

#include "truecase/layers.h"

#include <cmath>

#include "truecase/errors.h"

namespace truecase {
namespace {

void CheckRows(const Tensor& t, size_t rows, const char* what) {
  if (t.rank() != 2 || t.dim(0) != rows) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) +
                     " rows, got " + ShapeToString(t.shape()));
  }
}

void CheckLstm(const LstmParams& p) {
  const size_t h = p.u.rank() == 2 ? p.u.dim(1) : 0;
  if (h == 0 || p.u.shape() != Shape{4 * h, h} || p.w.rank() != 2 ||
      p.w.dim(0) != 4 * h || p.b.shape() != Shape{4 * h}) {
    throw ShapeError("lstm: inconsistent weights W " +
                     ShapeToString(p.w.shape()) + ", U " +
                     ShapeToString(p.u.shape()) + ", b " +
                     ShapeToString(p.b.shape()));
  }
}

ConstMatrixMap FilterTap(const Tensor& filters, size_t j) {
  const size_t d = filters.dim(1), f = filters.dim(2);
  return ConstMatrixMap(filters.data() + j * d * f, static_cast<Eigen::Index>(d),
                        static_cast<Eigen::Index>(f));
}

MatrixMap FilterTap(Tensor& filters, size_t j) {
  const size_t d = filters.dim(1), f = filters.dim(2);
  return MatrixMap(filters.data() + j * d * f, static_cast<Eigen::Index>(d),
                   static_cast<Eigen::Index>(f));
}

// Range of output steps [begin, end) whose input step t + shift is inside
// [0, length).
std::pair<size_t, size_t> ValidSteps(size_t length, long shift) {
  const long n = static_cast<long>(length);
  const long begin = std::max(0L, -shift);
  const long end = std::min(n, n - shift);
  if (begin >= end) return {0, 0};
  return {static_cast<size_t>(begin), static_cast<size_t>(end)};
}

// Applies the gate nonlinearities to one block of pre-activations in place
// and advances the cell state. Row r of `rows_real` tells whether the row
// takes part; masked rows keep h and c.
void LstmStep(RowMatrix& pre, size_t hidden, RowMatrix* h, RowMatrix* c,
              double* cell_prev, double* cell_out, double* out,
              const uint8_t* rows_real) {
  const auto batch = static_cast<size_t>(pre.rows());
  for (size_t r = 0; r < batch; ++r) {
    double* g = pre.data() + r * 4 * hidden;
    for (size_t k = 0; k < hidden; ++k) {
      const double i = SigmoidScalar(g[k]);
      const double f = SigmoidScalar(g[hidden + k]);
      const double gg = std::tanh(g[2 * hidden + k]);
      const double o = SigmoidScalar(g[3 * hidden + k]);
      g[k] = i;
      g[hidden + k] = f;
      g[2 * hidden + k] = gg;
      g[3 * hidden + k] = o;
      const double cp = (*c)(r, k);
      const double cn = f * cp + i * gg;
      const double hn = o * std::tanh(cn);
      cell_prev[r * hidden + k] = cp;
      cell_out[r * hidden + k] = cn;
      if (rows_real[r]) {
        out[r * hidden + k] = hn;
        (*h)(r, k) = hn;
        (*c)(r, k) = cn;
      } else {
        out[r * hidden + k] = 0.0;
      }
    }
  }
}

}  // namespace

void DropoutSpec::Validate() const {
  if (!(input_p >= 0.0 && input_p < 1.0) ||
      !(recurrent_p >= 0.0 && recurrent_p < 1.0)) {
    throw DataError("dropout probabilities must be in [0, 1)");
  }
}

SequenceLayout SequenceLayout::Single(size_t length) {
  SequenceLayout layout;
  layout.batch = 1;
  layout.length = length;
  layout.mask.assign(length, 1);
  return layout;
}

Tensor Embed(std::span<const int> ids, const Tensor& embedding,
             std::span<const uint8_t> mask) {
  if (embedding.rank() != 2) {
    throw ShapeError("embed: table must be rank 2, got " +
                     ShapeToString(embedding.shape()));
  }
  const size_t d = embedding.dim(1);
  Tensor out({ids.size(), d});
  for (size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || static_cast<size_t>(ids[r]) >= embedding.dim(0)) {
      throw DataError("embed: id " + std::to_string(ids[r]) +
                      " outside vocabulary of " +
                      std::to_string(embedding.dim(0)));
    }
    if (!mask.empty() && !mask[r]) continue;
    const auto src = embedding.row(static_cast<size_t>(ids[r]));
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void EmbedBackward(std::span<const int> ids, const Tensor& d_out,
                   Tensor* d_embedding, std::span<const uint8_t> mask) {
  CheckRows(d_out, ids.size(), "embed_backward");
  for (size_t r = 0; r < ids.size(); ++r) {
    if (!mask.empty() && !mask[r]) continue;
    auto dst = d_embedding->row(static_cast<size_t>(ids[r]));
    const auto src = d_out.row(r);
    for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

Tensor Conv1dSame(const Tensor& x, size_t batch, const Tensor& filters,
                  const Tensor& bias) {
  if (filters.rank() != 3 || filters.dim(0) % 2 == 0 || x.rank() != 2 ||
      filters.dim(1) != x.dim(1) || bias.shape() != Shape{filters.dim(2)}) {
    throw ShapeError("conv1d: input " + ShapeToString(x.shape()) +
                     ", filters " + ShapeToString(filters.shape()) +
                     ", bias " + ShapeToString(bias.shape()));
  }
  if (batch == 0 || x.dim(0) % batch != 0) {
    throw ShapeError("conv1d: rows not a multiple of batch size");
  }
  const size_t length = x.dim(0) / batch;
  const size_t k = filters.dim(0);
  const long half = static_cast<long>(k / 2);
  Tensor out({x.dim(0), filters.dim(2)});
  MatrixMap y = out.matrix();
  y.rowwise() = bias.matrix().row(0);
  const ConstMatrixMap in = x.matrix();
  for (size_t j = 0; j < k; ++j) {
    const long shift = static_cast<long>(j) - half;
    const auto [begin, end] = ValidSteps(length, shift);
    if (begin == end) continue;
    const auto n = static_cast<Eigen::Index>((end - begin) * batch);
    y.middleRows(static_cast<Eigen::Index>(begin * batch), n).noalias() +=
        in.middleRows(static_cast<Eigen::Index>((begin + shift) * batch), n) *
        FilterTap(filters, j);
  }
  y = y.cwiseMax(0.0);
  return out;
}

void Conv1dSameBackward(const Tensor& x, size_t batch, const Tensor& filters,
                        const Tensor& output, const Tensor& d_out, Tensor* d_x,
                        Tensor* d_filters, Tensor* d_bias) {
  CheckRows(d_out, x.dim(0), "conv1d_backward");
  const size_t length = x.dim(0) / batch;
  const size_t k = filters.dim(0);
  const long half = static_cast<long>(k / 2);
  RowMatrix d_pre = d_out.matrix();
  const ConstMatrixMap y = output.matrix();
  for (Eigen::Index i = 0; i < d_pre.size(); ++i) {
    if (y.data()[i] <= 0.0) d_pre.data()[i] = 0.0;
  }
  if (d_bias != nullptr) AddColumnSums(d_pre, d_bias->values());
  const ConstMatrixMap in = x.matrix();
  if (d_x != nullptr) *d_x = Tensor(x.shape());
  for (size_t j = 0; j < k; ++j) {
    const long shift = static_cast<long>(j) - half;
    const auto [begin, end] = ValidSteps(length, shift);
    if (begin == end) continue;
    const auto n = static_cast<Eigen::Index>((end - begin) * batch);
    const auto out_rows =
        d_pre.middleRows(static_cast<Eigen::Index>(begin * batch), n);
    const auto src = static_cast<Eigen::Index>((begin + shift) * batch);
    if (d_filters != nullptr) {
      FilterTap(*d_filters, j).noalias() +=
          in.middleRows(src, n).transpose() * out_rows;
    }
    if (d_x != nullptr) {
      d_x->matrix().middleRows(src, n).noalias() +=
          out_rows * FilterTap(filters, j).transpose();
    }
  }
}

void FillDropoutMask(double p, Rng* rng, std::span<double> out) {
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& v : out) v = rng->Uniform() < p ? 0.0 : keep_scale;
}

Tensor Dropout(const Tensor& x, double p, Mode mode, uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw DataError("dropout: p must be in [0, 1)");
  if (mode == Mode::kEval || p == 0.0) return x;
  Tensor mask(x.shape());
  Rng rng(seed);
  FillDropoutMask(p, &rng, mask.values());
  return Mul(x, mask);
}

LstmState LstmCell(const Tensor& x_t, const Tensor& h_prev,
                   const Tensor& c_prev, const LstmParams& params,
                   const Tensor& rec_mask) {
  CheckLstm(params);
  const size_t hidden = params.hidden();
  if (x_t.size() != params.input_dim() || h_prev.size() != hidden ||
      c_prev.size() != hidden || rec_mask.size() != hidden) {
    throw ShapeError("lstm_cell: x " + ShapeToString(x_t.shape()) + ", h " +
                     ShapeToString(h_prev.shape()) + ", c " +
                     ShapeToString(c_prev.shape()) + " for W " +
                     ShapeToString(params.w.shape()));
  }
  RowMatrix h = h_prev.matrix().cwiseProduct(rec_mask.matrix());
  RowMatrix c = c_prev.matrix();
  RowMatrix pre = x_t.matrix() * params.w.matrix().transpose() +
                  h * params.u.matrix().transpose() + params.b.matrix();
  std::vector<double> cell_prev(hidden), cell(hidden);
  LstmState state{Tensor({hidden}), Tensor({hidden})};
  const uint8_t real = 1;
  LstmStep(pre, hidden, &h, &c, cell_prev.data(), cell.data(),
           state.h.data(), &real);
  std::copy(cell.begin(), cell.end(), state.c.data());
  return state;
}

Tensor LstmForward(const Tensor& x, const SequenceLayout& layout,
                   const LstmParams& params, bool reverse,
                   const Tensor& rec_mask, LstmCache* cache) {
  CheckLstm(params);
  CheckRows(x, layout.rows(), "lstm");
  if (x.dim(1) != params.input_dim()) {
    throw ShapeError("lstm: input " + ShapeToString(x.shape()) +
                     " does not match W " + ShapeToString(params.w.shape()));
  }
  const size_t hidden = params.hidden();
  const size_t batch = layout.batch;
  const size_t n = layout.rows();
  const auto bi = static_cast<Eigen::Index>(batch);

  cache->input = x;
  cache->gates = Tensor({n, 4 * hidden});
  cache->cell_prev = Tensor({n, hidden});
  cache->cell = Tensor({n, hidden});
  cache->h_masked = Tensor({n, hidden});
  MatrixMap gates = cache->gates.matrix();
  gates.noalias() = x.matrix() * params.w.matrix().transpose();
  gates.rowwise() += params.b.matrix().row(0);

  const auto u_t = params.u.matrix().transpose();
  RowMatrix h = RowMatrix::Zero(bi, static_cast<Eigen::Index>(hidden));
  RowMatrix c = RowMatrix::Zero(bi, static_cast<Eigen::Index>(hidden));
  RowMatrix pre;
  Tensor out({n, hidden});
  MatrixMap h_masked = cache->h_masked.matrix();
  for (size_t s = 0; s < layout.length; ++s) {
    const size_t t = reverse ? layout.length - 1 - s : s;
    const auto r0 = static_cast<Eigen::Index>(t * batch);
    auto hm = h_masked.middleRows(r0, bi);
    if (rec_mask.empty()) {
      hm = h;
    } else {
      hm = h.cwiseProduct(rec_mask.matrix());
    }
    pre.noalias() = hm * u_t;
    pre += gates.middleRows(r0, bi);
    LstmStep(pre, hidden, &h, &c, cache->cell_prev.row(t * batch).data(),
             cache->cell.row(t * batch).data(), out.row(t * batch).data(),
             layout.mask.data() + t * batch);
    gates.middleRows(r0, bi) = pre;
  }
  return out;
}

Tensor LstmBackward(const Tensor& d_out, const SequenceLayout& layout,
                    const LstmParams& params, bool reverse,
                    const Tensor& rec_mask, const LstmCache& cache,
                    LstmParams* grads) {
  const size_t hidden = params.hidden();
  const size_t batch = layout.batch;
  const size_t n = layout.rows();
  const auto bi = static_cast<Eigen::Index>(batch);
  CheckRows(d_out, n, "lstm_backward");

  RowMatrix d_gates = RowMatrix::Zero(static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(4 * hidden));
  RowMatrix dh = RowMatrix::Zero(bi, static_cast<Eigen::Index>(hidden));
  RowMatrix dc = RowMatrix::Zero(bi, static_cast<Eigen::Index>(hidden));
  RowMatrix dh_prev;
  const ConstMatrixMap u = params.u.matrix();
  MatrixMap du = grads->u.matrix();

  for (size_t s = layout.length; s-- > 0;) {
    const size_t t = reverse ? layout.length - 1 - s : s;
    const size_t r0 = t * batch;
    for (size_t r = 0; r < batch; ++r) {
      if (!layout.real(r0 + r)) continue;
      const double* g = cache.gates.row(r0 + r).data();
      const double* cp = cache.cell_prev.row(r0 + r).data();
      const double* cn = cache.cell.row(r0 + r).data();
      const double* dy = d_out.row(r0 + r).data();
      double* dg = d_gates.row(static_cast<Eigen::Index>(r0 + r)).data();
      for (size_t k = 0; k < hidden; ++k) {
        const double i = g[k], f = g[hidden + k], gg = g[2 * hidden + k],
                     o = g[3 * hidden + k];
        const double dhk = dh(r, k) + dy[k];
        const double tc = std::tanh(cn[k]);
        const double dck = dc(r, k) + dhk * o * (1.0 - tc * tc);
        dg[k] = dck * gg * i * (1.0 - i);
        dg[hidden + k] = dck * cp[k] * f * (1.0 - f);
        dg[2 * hidden + k] = dck * i * (1.0 - gg * gg);
        dg[3 * hidden + k] = dhk * tc * o * (1.0 - o);
        dc(r, k) = dck * f;
      }
    }
    const auto block = d_gates.middleRows(static_cast<Eigen::Index>(r0), bi);
    dh_prev.noalias() = block * u;
    if (!rec_mask.empty()) dh_prev = dh_prev.cwiseProduct(rec_mask.matrix());
    for (size_t r = 0; r < batch; ++r) {
      if (layout.real(r0 + r)) dh.row(r) = dh_prev.row(r);
    }
    du.noalias() += block.transpose() *
                    cache.h_masked.matrix().middleRows(
                        static_cast<Eigen::Index>(r0), bi);
  }
  grads->w.matrix().noalias() += d_gates.transpose() * cache.input.matrix();
  AddColumnSums(d_gates, grads->b.values());
  Tensor d_x(cache.input.shape());
  d_x.matrix().noalias() = d_gates * params.w.matrix();
  return d_x;
}

Tensor BiLstmForward(const Tensor& x, const SequenceLayout& layout,
                     std::span<const LstmParams> params,
                     std::span<const Tensor> rec_masks, BiLstmCache* cache) {
  if (params.empty() || params.size() % 2 != 0) {
    throw ShapeError("bilstm: need two directions per layer");
  }
  const size_t layers = params.size() / 2;
  cache->directions.assign(params.size(), LstmCache{});
  static const Tensor kNoMask;
  Tensor input = x;
  for (size_t l = 0; l < layers; ++l) {
    Tensor outs[2];
    for (size_t dir = 0; dir < 2; ++dir) {
      const size_t idx = l * 2 + dir;
      outs[dir] = LstmForward(input, layout, params[idx], dir == 1,
                              rec_masks.empty() ? kNoMask : rec_masks[idx],
                              &cache->directions[idx]);
    }
    const size_t h = params[l * 2].hidden();
    Tensor cat({layout.rows(), 2 * h});
    cat.matrix().leftCols(static_cast<Eigen::Index>(h)) = outs[0].matrix();
    cat.matrix().rightCols(static_cast<Eigen::Index>(h)) = outs[1].matrix();
    input = std::move(cat);
  }
  return input;
}

Tensor BiLstmBackward(const Tensor& d_out, const SequenceLayout& layout,
                      std::span<const LstmParams> params,
                      std::span<const Tensor> rec_masks,
                      const BiLstmCache& cache, std::span<LstmParams> grads) {
  static const Tensor kNoMask;
  const size_t layers = params.size() / 2;
  Tensor d_top = d_out;
  for (size_t l = layers; l-- > 0;) {
    const size_t h = params[l * 2].hidden();
    const auto hi = static_cast<Eigen::Index>(h);
    Tensor d_input;
    for (size_t dir = 0; dir < 2; ++dir) {
      const size_t idx = l * 2 + dir;
      Tensor d_dir({layout.rows(), h});
      d_dir.matrix() = dir == 0 ? d_top.matrix().leftCols(hi)
                                : d_top.matrix().rightCols(hi);
      Tensor dx = LstmBackward(d_dir, layout, params[idx], dir == 1,
                               rec_masks.empty() ? kNoMask : rec_masks[idx],
                               cache.directions[idx], &grads[idx]);
      if (d_input.empty()) {
        d_input = std::move(dx);
      } else {
        d_input.matrix() += dx.matrix();
      }
    }
    d_top = std::move(d_input);
  }
  return d_top;
}

Tensor Emissions(const Tensor& h, const Tensor& weight, const Tensor& bias) {
  return AddRowBias(MatMul(h, weight), bias);
}

void GlorotUniform(size_t fan_in, size_t fan_out, Rng* rng, Tensor* t) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t->values()) v = rng->Uniform(-limit, limit);
}

}  // namespace truecase
