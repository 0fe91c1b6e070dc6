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

#include "truecase/crf.h"

#include <array>
#include <cmath>
#include <limits>

#include "truecase/errors.h"

namespace truecase {
namespace {

using crf::kEnd;
using crf::kLower;
using crf::kNumTags;
using crf::kStart;
using crf::kUpper;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr size_t kReal[] = {kUpper, kLower};

double Lse2(double a, double b) {
  const double m = std::max(a, b);
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void CheckInstance(const Tensor& emissions, const CrfParams& params) {
  if (emissions.rank() != 2 || emissions.dim(1) != kNumLabels ||
      emissions.dim(0) == 0) {
    throw ShapeError("crf: emissions must be T x 2 with T >= 1, got " +
                     ShapeToString(emissions.shape()));
  }
  if (params.transitions.shape() != Shape{kNumTags, kNumTags}) {
    throw ShapeError("crf: transitions must be 4 x 4, got " +
                     ShapeToString(params.transitions.shape()));
  }
}

size_t Tag(Label l) {
  const auto v = static_cast<size_t>(l);
  if (v >= kNumLabels) throw DataError("crf: label outside {U, L}");
  return v;
}

// alpha[t][j]: log-sum of scores of prefixes ending in tag j at position t.
Tensor Forward(const Tensor& p, const CrfParams& a) {
  const size_t n = p.dim(0);
  Tensor alpha({n, kNumLabels});
  for (size_t j : kReal) alpha(0, j) = a(kStart, j) + p(0, j);
  for (size_t t = 1; t < n; ++t) {
    for (size_t j : kReal) {
      alpha(t, j) = p(t, j) + Lse2(alpha(t - 1, kUpper) + a(kUpper, j),
                                   alpha(t - 1, kLower) + a(kLower, j));
    }
  }
  return alpha;
}

// beta[t][i]: log-sum of scores of suffixes after position t given tag i.
Tensor Backward(const Tensor& p, const CrfParams& a) {
  const size_t n = p.dim(0);
  Tensor beta({n, kNumLabels});
  for (size_t i : kReal) beta(n - 1, i) = a(i, kEnd);
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t i : kReal) {
      beta(t, i) = Lse2(a(i, kUpper) + p(t + 1, kUpper) + beta(t + 1, kUpper),
                        a(i, kLower) + p(t + 1, kLower) + beta(t + 1, kLower));
    }
  }
  return beta;
}

double FinishForward(const Tensor& alpha, const CrfParams& a) {
  const size_t last = alpha.dim(0) - 1;
  return Lse2(alpha(last, kUpper) + a(kUpper, kEnd),
              alpha(last, kLower) + a(kLower, kEnd));
}

}  // namespace

CrfParams CrfParams::Zero() {
  CrfParams params{Tensor({kNumTags, kNumTags})};
  params.ApplyGuards();
  return params;
}

bool CrfParams::IsLearned(size_t from, size_t to) {
  if (to == kStart || from == kEnd) return false;
  if (from == kStart && to == kEnd) return false;
  return true;
}

void CrfParams::ApplyGuards() {
  for (size_t i = 0; i < kNumTags; ++i) {
    for (size_t j = 0; j < kNumTags; ++j) {
      if (!IsLearned(i, j)) transitions(i, j) = kNegInf;
    }
  }
}

double SequenceScore(const Tensor& emissions, const CrfParams& params,
                     const LabelSequence& labels) {
  CheckInstance(emissions, params);
  if (labels.size() != emissions.dim(0)) {
    throw ShapeError("crf: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(emissions.dim(0)) +
                     " positions");
  }
  double score = params(kStart, Tag(labels[0]));
  for (size_t t = 0; t < labels.size(); ++t) {
    const size_t y = Tag(labels[t]);
    score += emissions(t, y);
    const size_t next = t + 1 < labels.size() ? Tag(labels[t + 1]) : kEnd;
    score += params(y, next);
  }
  return score;
}

double LogPartition(const Tensor& emissions, const CrfParams& params) {
  CheckInstance(emissions, params);
  return FinishForward(Forward(emissions, params), params);
}

double Nll(const Tensor& emissions, const CrfParams& params,
           const LabelSequence& gold) {
  return NllWithGradient(emissions, params, gold, nullptr, nullptr);
}

double NllWithGradient(const Tensor& emissions, const CrfParams& params,
                       const LabelSequence& gold, Tensor* d_emissions,
                       Tensor* d_transitions) {
  const double gold_score = SequenceScore(emissions, params, gold);
  const Tensor alpha = Forward(emissions, params);
  const double log_z = FinishForward(alpha, params);
  const double nll = log_z - gold_score;
  if (d_emissions == nullptr && d_transitions == nullptr) return nll;

  const size_t n = emissions.dim(0);
  const Tensor beta = Backward(emissions, params);
  if (d_emissions != nullptr) {
    *d_emissions = Tensor({n, kNumLabels});
    for (size_t t = 0; t < n; ++t) {
      for (size_t j : kReal) {
        (*d_emissions)(t, j) = std::exp(alpha(t, j) + beta(t, j) - log_z);
      }
      (*d_emissions)(t, Tag(gold[t])) -= 1.0;
    }
  }
  if (d_transitions != nullptr) {
    if (d_transitions->shape() != Shape{kNumTags, kNumTags}) {
      *d_transitions = Tensor({kNumTags, kNumTags});
    }
    Tensor& g = *d_transitions;
    for (size_t j : kReal) {
      g(kStart, j) += std::exp(alpha(0, j) + beta(0, j) - log_z);
      g(j, kEnd) += std::exp(alpha(n - 1, j) + beta(n - 1, j) - log_z);
    }
    for (size_t t = 0; t + 1 < n; ++t) {
      for (size_t i : kReal) {
        for (size_t j : kReal) {
          g(i, j) += std::exp(alpha(t, i) + params(i, j) +
                              emissions(t + 1, j) + beta(t + 1, j) - log_z);
        }
      }
    }
    g(kStart, Tag(gold[0])) -= 1.0;
    for (size_t t = 0; t + 1 < n; ++t) {
      g(Tag(gold[t]), Tag(gold[t + 1])) -= 1.0;
    }
    g(Tag(gold[n - 1]), kEnd) -= 1.0;
  }
  return nll;
}

Tensor Marginals(const Tensor& emissions, const CrfParams& params) {
  CheckInstance(emissions, params);
  const Tensor alpha = Forward(emissions, params);
  const Tensor beta = Backward(emissions, params);
  const double log_z = FinishForward(alpha, params);
  Tensor out({emissions.dim(0), kNumLabels});
  for (size_t t = 0; t < out.dim(0); ++t) {
    for (size_t j : kReal) out(t, j) = std::exp(alpha(t, j) + beta(t, j) - log_z);
  }
  return out;
}

ViterbiResult Viterbi(const Tensor& emissions, const CrfParams& params) {
  CheckInstance(emissions, params);
  const size_t n = emissions.dim(0);
  std::vector<std::array<double, 2>> delta(n);
  std::vector<std::array<uint8_t, 2>> back(n);
  for (size_t j : kReal) delta[0][j] = params(kStart, j) + emissions(0, j);
  for (size_t t = 1; t < n; ++t) {
    for (size_t j : kReal) {
      const double via_upper = delta[t - 1][kUpper] + params(kUpper, j);
      const double via_lower = delta[t - 1][kLower] + params(kLower, j);
      const bool lower = via_lower >= via_upper;
      back[t][j] = lower ? kLower : kUpper;
      delta[t][j] = emissions(t, j) + (lower ? via_lower : via_upper);
    }
  }
  const double end_upper = delta[n - 1][kUpper] + params(kUpper, kEnd);
  const double end_lower = delta[n - 1][kLower] + params(kLower, kEnd);
  size_t tag = end_lower >= end_upper ? kLower : kUpper;

  ViterbiResult result;
  result.labels.resize(n);
  for (size_t t = n; t-- > 0;) {
    result.labels[t] = static_cast<Label>(tag);
    if (t > 0) tag = back[t][tag];
  }
  result.score = SequenceScore(emissions, params, result.labels);
  return result;
}

BruteForceResult BruteForce(const Tensor& emissions, const CrfParams& params) {
  CheckInstance(emissions, params);
  const size_t n = emissions.dim(0);
  if (n > crf::kMaxBruteForceLength) {
    throw DataError("brute_force: T = " + std::to_string(n) + " exceeds " +
                    std::to_string(crf::kMaxBruteForceLength));
  }
  // Bit t of the code set means U at position t. Visiting codes in
  // increasing order and replacing only on a strictly better score keeps the
  // smallest code among ties, i.e. L preferred from the last position back.
  BruteForceResult result;
  std::vector<double> scores;
  scores.reserve(size_t{1} << n);
  LabelSequence labels(n);
  for (uint32_t code = 0; code < (uint32_t{1} << n); ++code) {
    for (size_t t = 0; t < n; ++t) {
      labels[t] = (code >> t) & 1 ? Label::kUpper : Label::kLower;
    }
    const double s = SequenceScore(emissions, params, labels);
    scores.push_back(s);
    if (code == 0 || s > result.best_score) {
      result.best_score = s;
      result.best = labels;
    }
  }
  result.log_partition = LogSumExp(scores);
  return result;
}

}  // namespace truecase
