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

#ifndef TRUECASE_LABEL_H_
#define TRUECASE_LABEL_H_

#include <cstdint>
#include <string>
#include <vector>

namespace truecase {

// Per-character case label. The numeric values double as emission columns
// and CRF tag indices.
enum class Label : uint8_t { kUpper = 0, kLower = 1 };

inline constexpr int kNumLabels = 2;

using LabelSequence = std::vector<Label>;

inline char LabelChar(Label l) { return l == Label::kUpper ? 'U' : 'L'; }

inline std::string LabelString(const LabelSequence& labels) {
  std::string s;
  s.reserve(labels.size());
  for (Label l : labels) s.push_back(LabelChar(l));
  return s;
}

}  // namespace truecase

#endif  // TRUECASE_LABEL_H_
