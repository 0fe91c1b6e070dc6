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

#ifndef TRUECASE_GRADCHECK_H_
#define TRUECASE_GRADCHECK_H_

#include <cstdint>
#include <vector>

#include "truecase/corpus.h"
#include "truecase/model.h"
#include "truecase/tensor.h"

namespace truecase {

// Small architecture used for end-to-end gradient checks: vocabulary 20,
// 8-dim embeddings, 8 filters of width 5, 16 hidden units, 2 layers.
ModelConfig TinyModelConfig();

// Random encoded sequences with lengths in [1, max_length] over ids
// [2, vocab_size).
std::vector<LabeledSequence> RandomSequences(size_t count, size_t max_length,
                                             size_t vocab_size, uint64_t seed);

// Finite-difference check of the mean-batch NLL (dropout off) with respect
// to every parameter tensor of `params`.
GradCheckResult CheckModelGradient(const ModelParams& params,
                                   const std::vector<LabeledSequence>& data,
                                   const GradCheckOptions& options = {});

// The default check: tiny model with randomized biases and transitions, two
// sequences of length <= 12, 64-bit, 400 coordinates, eps 3e-4. Coordinates
// whose step crosses a conv ReLU kink are skipped (see kinks_skipped).
GradCheckResult RunDefaultGradCheck(uint64_t seed);

inline constexpr double kGradCheckTolerance = 1e-4;

}  // namespace truecase

#endif  // TRUECASE_GRADCHECK_H_
