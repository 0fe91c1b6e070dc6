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

#include "truecase/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "truecase/errors.h"
#include "truecase/random.h"
#include "truecase/unicode.h"

namespace truecase {

Vocabulary::Vocabulary() : id_to_char_{0, 0} {}

Vocabulary::Vocabulary(std::u32string_view chars) : Vocabulary() {
  for (char32_t c : chars) Add(c);
}

void Vocabulary::Add(char32_t c) {
  if (IsCasedUpper(c)) {
    throw DataError("vocabulary: uppercase character U+" +
                    std::to_string(static_cast<uint32_t>(c)));
  }
  if (!char_to_id_.emplace(c, static_cast<int>(id_to_char_.size())).second) {
    throw DataError("vocabulary: duplicate character");
  }
  id_to_char_.push_back(c);
}

int Vocabulary::Id(char32_t c) const {
  auto it = char_to_id_.find(c);
  return it == char_to_id_.end() ? kUnkId : it->second;
}

char32_t Vocabulary::Char(int id) const {
  if (id <= kUnkId || static_cast<size_t>(id) >= id_to_char_.size()) {
    throw DataError("vocabulary: id " + std::to_string(id) +
                    " has no character");
  }
  return id_to_char_[id];
}

std::u32string Vocabulary::Chars() const {
  return std::u32string(id_to_char_.begin() + 2, id_to_char_.end());
}

std::string_view StripNewline(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<LabeledSequence> DeriveLabels(std::string_view line) {
  line = StripNewline(line);
  if (line.empty()) return std::nullopt;
  std::u32string chars = DecodeUtf8(line);
  LabeledSequence seq;
  seq.labels.reserve(chars.size());
  for (char32_t& c : chars) {
    const bool upper = IsCasedUpper(c);
    seq.labels.push_back(upper ? Label::kUpper : Label::kLower);
    if (upper) c = ToLower(c);
  }
  seq.raw_chars = std::move(chars);
  return seq;
}

std::u32string ApplyLabels(std::u32string_view lowered,
                           const LabelSequence& labels) {
  if (lowered.size() != labels.size()) {
    throw DataError("apply_labels: " + std::to_string(lowered.size()) +
                    " characters but " + std::to_string(labels.size()) +
                    " labels");
  }
  std::u32string out(lowered);
  for (size_t i = 0; i < out.size(); ++i) {
    if (labels[i] == Label::kUpper) out[i] = ToUpper(out[i]);
  }
  return out;
}

Vocabulary BuildVocab(const std::vector<std::u32string>& lowered_lines,
                      int min_count) {
  if (min_count < 1) throw DataError("build_vocab: min_count must be >= 1");
  std::unordered_map<char32_t, size_t> counts;
  for (const auto& line : lowered_lines) {
    for (char32_t c : line) ++counts[c];
  }
  if (counts.empty()) throw DataError("empty corpus");
  std::vector<std::pair<char32_t, size_t>> kept;
  for (const auto& [c, n] : counts) {
    if (n >= static_cast<size_t>(min_count)) kept.emplace_back(c, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::u32string chars;
  for (const auto& [c, n] : kept) chars.push_back(c);
  return Vocabulary(chars);
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (in.bad()) throw IoError("error reading " + path);
  return lines;
}

Vocabulary BuildVocabFromFile(const std::string& path, int min_count) {
  std::vector<std::u32string> lowered;
  for (const std::string& line : ReadLines(path)) {
    if (auto seq = DeriveLabels(line)) lowered.push_back(seq->raw_chars);
  }
  return BuildVocab(lowered, min_count);
}

LabeledSequence Encode(LabeledSequence seq, const Vocabulary& vocab) {
  seq.char_ids.resize(seq.raw_chars.size());
  for (size_t i = 0; i < seq.raw_chars.size(); ++i) {
    seq.char_ids[i] = vocab.Id(seq.raw_chars[i]);
  }
  return seq;
}

std::vector<LabeledSequence> SplitLong(LabeledSequence seq,
                                       size_t max_length) {
  std::vector<LabeledSequence> out;
  if (seq.size() <= max_length) {
    out.push_back(std::move(seq));
    return out;
  }
  for (size_t start = 0; start < seq.size(); start += max_length) {
    const size_t n = std::min(max_length, seq.size() - start);
    LabeledSequence chunk;
    chunk.raw_chars = seq.raw_chars.substr(start, n);
    chunk.labels.assign(seq.labels.begin() + start,
                        seq.labels.begin() + start + n);
    if (!seq.char_ids.empty()) {
      chunk.char_ids.assign(seq.char_ids.begin() + start,
                            seq.char_ids.begin() + start + n);
    }
    out.push_back(std::move(chunk));
  }
  return out;
}

std::vector<LabeledSequence> ReadCorpus(std::istream& in) {
  std::vector<LabeledSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto seq = DeriveLabels(line)) {
      for (auto& chunk : SplitLong(std::move(*seq))) {
        out.push_back(std::move(chunk));
      }
    }
  }
  return out;
}

std::vector<LabeledSequence> ReadCorpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return ReadCorpus(in);
}

std::vector<Batch> MakeBatches(const std::vector<LabeledSequence>& examples,
                               size_t batch_size,
                               std::optional<uint64_t> shuffle_seed) {
  if (examples.empty()) throw DataError("make_batches: no examples");
  if (batch_size < 1) throw DataError("make_batches: batch_size must be >= 1");
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_seed) {
    Rng rng(MixSeed(*shuffle_seed));
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.Below(i)]);
    }
  }
  std::vector<Batch> batches;
  for (size_t start = 0; start < order.size(); start += batch_size) {
    const size_t n = std::min(batch_size, order.size() - start);
    Batch batch;
    batch.batch_size = n;
    for (size_t b = 0; b < n; ++b) {
      const LabeledSequence& ex = examples[order[start + b]];
      if (ex.size() == 0) throw DataError("make_batches: empty example");
      if (ex.char_ids.size() != ex.size()) {
        throw DataError("make_batches: example is not encoded");
      }
      batch.lengths.push_back(ex.size());
      batch.example_indices.push_back(order[start + b]);
      batch.max_length = std::max(batch.max_length, ex.size());
    }
    const size_t t_max = batch.max_length;
    batch.ids.assign(n * t_max, kPadId);
    batch.labels.assign(n * t_max, Label::kLower);
    batch.mask.assign(n * t_max, 0);
    for (size_t b = 0; b < n; ++b) {
      const LabeledSequence& ex = examples[order[start + b]];
      for (size_t t = 0; t < ex.size(); ++t) {
        batch.ids[b * t_max + t] = ex.char_ids[t];
        batch.labels[b * t_max + t] = ex.labels[t];
        batch.mask[b * t_max + t] = 1;
      }
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace truecase
