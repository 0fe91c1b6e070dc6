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

#ifndef TRUECASE_EVAL_H_
#define TRUECASE_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "truecase/corpus.h"
#include "truecase/label.h"
#include "truecase/model.h"

namespace truecase {

// Character-level confusion counts with U as the positive class.
struct EvalReport {
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
  uint64_t tn = 0;

  static EvalReport FromCounts(uint64_t tp, uint64_t fp, uint64_t fn,
                               uint64_t tn) {
    return EvalReport{tp, fp, fn, tn};
  }

  uint64_t total() const { return tp + fp + fn + tn; }
  double accuracy() const;
  double precision() const;
  double recall() const;
  double f1() const;

  EvalReport& operator+=(const EvalReport& other);

  // Human-readable table with percentages.
  std::string Table(std::string_view title = "character-level") const;
  // Single line: acc=.. p=.. r=.. f1=.. tp=.. fp=.. fn=.. tn=..
  std::string KeyValue() const;
};

// Throws DataError when the sequence counts or any pair of lengths differ.
EvalReport Score(const std::vector<LabelSequence>& predictions,
                 const std::vector<LabelSequence>& golds);
EvalReport ScorePair(const LabelSequence& prediction,
                     const LabelSequence& gold);

// Labels recovered from cased text: U where a character is cased-uppercase.
LabelSequence LabelsOf(std::u32string_view text);

// Applies a trained model to text.
class Truecaser {
 public:
  Truecaser(ModelParams params, Vocabulary vocab, size_t threads = 1);

  // Restores case in one line. The line is lowercased first; characters
  // outside the vocabulary are emitted unchanged.
  std::string Apply(std::string_view line) const;
  std::vector<std::string> ApplyAll(const std::vector<std::string>& lines) const;

  // Decodes already-derived sequences (ids are (re)encoded here).
  std::vector<LabelSequence> PredictLabels(
      const std::vector<LabeledSequence>& sequences) const;

  // Scores predictions against the gold labels carried by the sequences.
  EvalReport Evaluate(const std::vector<LabeledSequence>& sequences) const;

  const ModelParams& params() const { return params_; }
  const Vocabulary& vocab() const { return vocab_; }

 private:
  ModelParams params_;
  Vocabulary vocab_;
  size_t threads_;
};

// Decodes sequences with the given parameters in fixed-size batches.
std::vector<LabelSequence> PredictSequences(
    const ModelParams& params, const std::vector<LabeledSequence>& encoded,
    size_t threads = 1, size_t batch_size = 32);

// Most-frequent-casing word baseline. Words are maximal runs of alphabetic
// code points.
class UnigramTable {
 public:
  void Add(std::string_view cased_line);
  static UnigramTable Train(const std::vector<std::string>& lines);

  // Lowercases the line, then replaces every word seen in training with its
  // most frequent casing. Ties go to the all-lowercase form, then the
  // lexicographically smallest surface form.
  std::u32string Apply(std::u32string_view line) const;
  std::string Apply(std::string_view line) const;

  // Best surface form for a lowercased word, or the word itself if unseen.
  std::u32string Lookup(const std::u32string& lowered) const;
  size_t size() const { return counts_.size(); }

 private:
  std::map<std::u32string, std::map<std::u32string, uint64_t>> counts_;
};

// Scores a cased test corpus by lowercasing each line and comparing the
// baseline's casing with the original.
EvalReport EvaluateBaseline(const UnigramTable& table,
                            const std::vector<std::string>& test_lines);

}  // namespace truecase

#endif  // TRUECASE_EVAL_H_
