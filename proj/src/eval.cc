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

#include "truecase/eval.h"

#include <cstdio>
#include <sstream>

#include "truecase/errors.h"
#include "truecase/parallel.h"
#include "truecase/unicode.h"

namespace truecase {
namespace {

double Ratio(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.2f", 100.0 * v);
  return buf;
}

}  // namespace

double EvalReport::accuracy() const { return Ratio(tp + tn, total()); }
double EvalReport::precision() const { return Ratio(tp, tp + fp); }
double EvalReport::recall() const { return Ratio(tp, tp + fn); }

double EvalReport::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvalReport& EvalReport::operator+=(const EvalReport& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

std::string EvalReport::Table(std::string_view title) const {
  std::ostringstream out;
  out << title << " (positive class U, " << total() << " characters)\n"
      << "  Accuracy  Precision  Recall     F1\n"
      << "  " << Percent(accuracy()) << "    " << Percent(precision())
      << "     " << Percent(recall()) << "  " << Percent(f1()) << "\n"
      << "  tp=" << tp << " fp=" << fp << " fn=" << fn << " tn=" << tn
      << "\n";
  return out.str();
}

std::string EvalReport::KeyValue() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "acc=%.4f p=%.4f r=%.4f f1=%.4f tp=%llu fp=%llu fn=%llu "
                "tn=%llu",
                100.0 * accuracy(), 100.0 * precision(), 100.0 * recall(),
                100.0 * f1(), static_cast<unsigned long long>(tp),
                static_cast<unsigned long long>(fp),
                static_cast<unsigned long long>(fn),
                static_cast<unsigned long long>(tn));
  return buf;
}

EvalReport ScorePair(const LabelSequence& prediction,
                     const LabelSequence& gold) {
  if (prediction.size() != gold.size()) {
    throw DataError("score: prediction has " +
                    std::to_string(prediction.size()) + " labels, gold has " +
                    std::to_string(gold.size()));
  }
  EvalReport r;
  for (size_t i = 0; i < gold.size(); ++i) {
    const bool p = prediction[i] == Label::kUpper;
    const bool g = gold[i] == Label::kUpper;
    if (p && g) ++r.tp;
    else if (p) ++r.fp;
    else if (g) ++r.fn;
    else ++r.tn;
  }
  return r;
}

EvalReport Score(const std::vector<LabelSequence>& predictions,
                 const std::vector<LabelSequence>& golds) {
  if (predictions.size() != golds.size()) {
    throw DataError("score: " + std::to_string(predictions.size()) +
                    " predictions for " + std::to_string(golds.size()) +
                    " gold sequences");
  }
  EvalReport total;
  for (size_t i = 0; i < golds.size(); ++i) {
    total += ScorePair(predictions[i], golds[i]);
  }
  return total;
}

LabelSequence LabelsOf(std::u32string_view text) {
  LabelSequence labels(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    labels[i] = IsCasedUpper(text[i]) ? Label::kUpper : Label::kLower;
  }
  return labels;
}

std::vector<LabelSequence> PredictSequences(
    const ModelParams& params, const std::vector<LabeledSequence>& encoded,
    size_t threads, size_t batch_size) {
  std::vector<LabelSequence> out(encoded.size());
  if (encoded.empty()) return out;
  const std::vector<Batch> batches = MakeBatches(encoded, batch_size, {});
  ParallelFor(batches.size(), threads, [&](size_t i) {
    std::vector<LabelSequence> labels = Predict(params, batches[i]);
    for (size_t b = 0; b < labels.size(); ++b) {
      out[batches[i].example_indices[b]] = std::move(labels[b]);
    }
  });
  return out;
}

Truecaser::Truecaser(ModelParams params, Vocabulary vocab, size_t threads)
    : params_(std::move(params)),
      vocab_(std::move(vocab)),
      threads_(std::max<size_t>(threads, 1)) {
  if (vocab_.size() != params_.config.vocab_size) {
    throw DataError("truecaser: vocabulary has " +
                    std::to_string(vocab_.size()) + " ids, model expects " +
                    std::to_string(params_.config.vocab_size));
  }
}

std::vector<LabelSequence> Truecaser::PredictLabels(
    const std::vector<LabeledSequence>& sequences) const {
  std::vector<LabeledSequence> encoded;
  encoded.reserve(sequences.size());
  for (const auto& s : sequences) encoded.push_back(Encode(s, vocab_));
  return PredictSequences(params_, encoded, threads_);
}

EvalReport Truecaser::Evaluate(
    const std::vector<LabeledSequence>& sequences) const {
  std::vector<LabelSequence> golds;
  golds.reserve(sequences.size());
  for (const auto& s : sequences) golds.push_back(s.labels);
  return Score(PredictLabels(sequences), golds);
}

std::vector<std::string> Truecaser::ApplyAll(
    const std::vector<std::string>& lines) const {
  // Chunks of every non-empty line, decoded together.
  std::vector<std::u32string> inputs(lines.size());
  std::vector<LabeledSequence> chunks;
  std::vector<size_t> owner;
  for (size_t i = 0; i < lines.size(); ++i) {
    inputs[i] = DecodeUtf8(StripNewline(lines[i]));
    if (inputs[i].empty()) continue;
    LabeledSequence seq;
    seq.raw_chars = ToLower(inputs[i]);
    seq.labels.assign(seq.raw_chars.size(), Label::kLower);
    for (auto& chunk : SplitLong(std::move(seq))) {
      chunks.push_back(Encode(std::move(chunk), vocab_));
      owner.push_back(i);
    }
  }
  const std::vector<LabelSequence> predicted =
      PredictSequences(params_, chunks, threads_);

  std::vector<std::string> out(lines.size());
  std::vector<size_t> offset(lines.size(), 0);
  std::vector<std::u32string> cased(lines.size());
  for (size_t c = 0; c < chunks.size(); ++c) {
    const size_t i = owner[c];
    for (size_t t = 0; t < chunks[c].size(); ++t) {
      const char32_t original = inputs[i][offset[i] + t];
      const char32_t lowered = chunks[c].raw_chars[t];
      if (!vocab_.Contains(lowered)) {
        cased[i].push_back(original);
      } else {
        cased[i].push_back(predicted[c][t] == Label::kUpper ? ToUpper(lowered)
                                                            : lowered);
      }
    }
    offset[i] += chunks[c].size();
  }
  for (size_t i = 0; i < lines.size(); ++i) out[i] = EncodeUtf8(cased[i]);
  return out;
}

std::string Truecaser::Apply(std::string_view line) const {
  return ApplyAll({std::string(line)}).front();
}

void UnigramTable::Add(std::string_view cased_line) {
  const std::u32string text = DecodeUtf8(StripNewline(cased_line));
  size_t i = 0;
  while (i < text.size()) {
    if (!IsAlphabetic(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && IsAlphabetic(text[j])) ++j;
    const std::u32string surface = text.substr(i, j - i);
    ++counts_[ToLower(surface)][surface];
    i = j;
  }
}

UnigramTable UnigramTable::Train(const std::vector<std::string>& lines) {
  UnigramTable table;
  for (const auto& line : lines) table.Add(line);
  return table;
}

std::u32string UnigramTable::Lookup(const std::u32string& lowered) const {
  auto it = counts_.find(lowered);
  if (it == counts_.end()) return lowered;
  const std::u32string* best = nullptr;
  uint64_t best_count = 0;
  // std::map iterates surface forms in lexicographic order, so the first
  // maximum seen is the smallest; the lowercase form wins any tie.
  for (const auto& [surface, count] : it->second) {
    const bool better =
        best == nullptr || count > best_count ||
        (count == best_count && surface == lowered && *best != lowered);
    if (better) {
      best = &surface;
      best_count = count;
    }
  }
  return *best;
}

std::u32string UnigramTable::Apply(std::u32string_view line) const {
  std::u32string text = ToLower(line);
  size_t i = 0;
  while (i < text.size()) {
    if (!IsAlphabetic(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && IsAlphabetic(text[j])) ++j;
    const std::u32string cased = Lookup(text.substr(i, j - i));
    if (cased.size() == j - i) text.replace(i, j - i, cased);
    i = j;
  }
  return text;
}

std::string UnigramTable::Apply(std::string_view line) const {
  return EncodeUtf8(Apply(std::u32string_view(DecodeUtf8(StripNewline(line)))));
}

EvalReport EvaluateBaseline(const UnigramTable& table,
                            const std::vector<std::string>& test_lines) {
  EvalReport report;
  for (const auto& line : test_lines) {
    const std::u32string gold = DecodeUtf8(StripNewline(line));
    if (gold.empty()) continue;
    report += ScorePair(LabelsOf(table.Apply(std::u32string_view(gold))),
                        LabelsOf(gold));
  }
  return report;
}

}  // namespace truecase
