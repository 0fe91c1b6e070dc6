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

#ifndef TRUECASE_CORPUS_H_
#define TRUECASE_CORPUS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "truecase/label.h"

namespace truecase {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
// Longer lines are split into chunks of this many characters.
inline constexpr size_t kMaxSequenceLength = 512;

// Character alphabet over lowercased text. Ids 0 and 1 are reserved for
// padding and unknown characters.
class Vocabulary {
 public:
  Vocabulary();
  // Characters in id order starting at id 2.
  explicit Vocabulary(std::u32string_view chars);

  int Id(char32_t c) const;
  // Character for a real id; throws DataError for reserved or out-of-range
  // ids.
  char32_t Char(int id) const;
  bool Contains(char32_t c) const { return char_to_id_.count(c) > 0; }
  size_t size() const { return id_to_char_.size(); }
  // Real characters in id order (ids 2, 3, ...).
  std::u32string Chars() const;

  int pad_id() const { return kPadId; }
  int unk_id() const { return kUnkId; }

  bool operator==(const Vocabulary& other) const {
    return id_to_char_ == other.id_to_char_;
  }

 private:
  void Add(char32_t c);

  std::map<char32_t, int> char_to_id_;
  // Entries 0 and 1 hold placeholders for the reserved ids.
  std::vector<char32_t> id_to_char_;
};

struct LabeledSequence {
  std::vector<int> char_ids;
  LabelSequence labels;
  std::u32string raw_chars;

  size_t size() const { return labels.size(); }
};

// B x T_max padded minibatch, stored row-major (row b = sequence b).
struct Batch {
  size_t batch_size = 0;
  size_t max_length = 0;
  std::vector<int> ids;
  std::vector<Label> labels;
  std::vector<uint8_t> mask;
  std::vector<size_t> lengths;
  // Position of each row's example in the list handed to MakeBatches.
  std::vector<size_t> example_indices;

  int id(size_t b, size_t t) const { return ids[b * max_length + t]; }
  Label label(size_t b, size_t t) const { return labels[b * max_length + t]; }
  bool real(size_t b, size_t t) const { return mask[b * max_length + t] != 0; }
};

// Strips a trailing "\n" or "\r\n".
std::string_view StripNewline(std::string_view line);

// Lowercases a line and records which characters were cased-uppercase.
// Returns nullopt for lines that are empty after the newline strip. Char ids
// are left empty; see Encode.
std::optional<LabeledSequence> DeriveLabels(std::string_view line);

// Inverse of DeriveLabels: applies U labels to lowercased characters.
std::u32string ApplyLabels(std::u32string_view lowered,
                           const LabelSequence& labels);

Vocabulary BuildVocab(const std::vector<std::u32string>& lowered_lines,
                      int min_count = 1);
// Reads a corpus file. Throws IoError if unreadable, DataError("empty
// corpus") if it has no characters.
Vocabulary BuildVocabFromFile(const std::string& path, int min_count = 1);

LabeledSequence Encode(LabeledSequence seq, const Vocabulary& vocab);

// Splits sequences longer than max_length into consecutive chunks.
std::vector<LabeledSequence> SplitLong(LabeledSequence seq,
                                       size_t max_length = kMaxSequenceLength);

// Reads every line of a corpus file as labeled sequences (empty lines
// dropped, long lines split, ids left empty).
std::vector<LabeledSequence> ReadCorpus(const std::string& path);
std::vector<LabeledSequence> ReadCorpus(std::istream& in);
std::vector<std::string> ReadLines(const std::string& path);

// Groups examples into padded batches. With no seed corpus order is kept;
// otherwise a seeded Fisher-Yates shuffle is applied first. Throws DataError
// for an empty list or batch_size < 1.
std::vector<Batch> MakeBatches(const std::vector<LabeledSequence>& examples,
                               size_t batch_size,
                               std::optional<uint64_t> shuffle_seed);

}  // namespace truecase

#endif  // TRUECASE_CORPUS_H_
