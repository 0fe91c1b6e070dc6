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

#ifndef TRUECASE_CRF_H_
#define TRUECASE_CRF_H_

#include "truecase/label.h"
#include "truecase/tensor.h"

namespace truecase {

// Linear-chain CRF over the case labels {U, L} plus START/END boundary
// tags.
//
// The score of a label sequence y_1..y_T for emissions P (T x 2) is
//
//   s(y) = A[START, y_1] + sum_t A[y_t, y_t+1] + A[y_T, END] + sum_t P[t, y_t]
//
// and p(y | x) = exp(s(y)) / Z with Z summed over all 2^T sequences.
namespace crf {

inline constexpr size_t kUpper = 0;
inline constexpr size_t kLower = 1;
inline constexpr size_t kStart = 2;
inline constexpr size_t kEnd = 3;
inline constexpr size_t kNumTags = 4;
// Enumeration limit for BruteForce.
inline constexpr size_t kMaxBruteForceLength = 16;

}  // namespace crf

// Transition scores, rows = source tag, columns = destination tag. Moves into
// START, out of END and START -> END are fixed at -inf.
struct CrfParams {
  Tensor transitions;

  // Zero scores on every legal move.
  static CrfParams Zero();
  // Entries that are learned (finite) versus guarded (-inf).
  static bool IsLearned(size_t from, size_t to);
  // Resets guarded entries to -inf.
  void ApplyGuards();

  double operator()(size_t from, size_t to) const {
    return transitions(from, to);
  }
  double& operator()(size_t from, size_t to) { return transitions(from, to); }
};

struct ViterbiResult {
  LabelSequence labels;
  double score = 0.0;
};

struct BruteForceResult {
  double log_partition = 0.0;
  LabelSequence best;
  double best_score = 0.0;
};

// emissions is T x 2 with columns (U, L); T >= 1 for every function below.
double SequenceScore(const Tensor& emissions, const CrfParams& params,
                     const LabelSequence& labels);

// log Z by the forward recursion in O(T * S^2).
double LogPartition(const Tensor& emissions, const CrfParams& params);

// -log p(gold | x) = log Z - s(gold).
double Nll(const Tensor& emissions, const CrfParams& params,
           const LabelSequence& gold);

// Nll plus its gradient. d_emissions is overwritten with marginals minus the
// gold one-hot; d_transitions (4 x 4) is accumulated into (expected minus
// observed transition counts). Either output may be null.
double NllWithGradient(const Tensor& emissions, const CrfParams& params,
                       const LabelSequence& gold, Tensor* d_emissions,
                       Tensor* d_transitions);

// Per-position posterior marginals p(y_t = j | x), T x 2.
Tensor Marginals(const Tensor& emissions, const CrfParams& params);

// Highest-scoring sequence. Exact ties prefer L at every backtrack step.
ViterbiResult Viterbi(const Tensor& emissions, const CrfParams& params);

// Exhaustive enumeration for T <= 16; same tie-break as Viterbi. Throws
// DataError for longer inputs.
BruteForceResult BruteForce(const Tensor& emissions, const CrfParams& params);

}  // namespace truecase

#endif  // TRUECASE_CRF_H_
