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

#include <algorithm>

#include <gtest/gtest.h>

#include "test_util.h"
#include "truecase/errors.h"
#include "truecase/gradcheck.h"
#include "truecase/train.h"
#include "truecase/unicode.h"

namespace truecase {
namespace {

constexpr Label U = Label::kUpper;
constexpr Label L = Label::kLower;

TEST(EvalReportTest, PerfectPredictions) {
  const std::vector<LabelSequence> gold = {{U, L, L}, {L, U}};
  const EvalReport r = Score(gold, gold);
  EXPECT_EQ(r.accuracy(), 1.0);
  EXPECT_EQ(r.precision(), 1.0);
  EXPECT_EQ(r.recall(), 1.0);
  EXPECT_EQ(r.f1(), 1.0);
}

TEST(EvalReportTest, HandComputed) {
  const EvalReport r = EvalReport::FromCounts(3, 1, 2, 4);
  EXPECT_EQ(r.total(), 10u);
  EXPECT_NEAR(r.precision(), 0.75, 1e-15);
  EXPECT_NEAR(r.recall(), 0.6, 1e-15);
  EXPECT_NEAR(r.f1(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.accuracy(), 0.7, 1e-15);
}

TEST(EvalReportTest, ZeroDenominators) {
  const EvalReport none = EvalReport::FromCounts(0, 0, 0, 5);
  EXPECT_EQ(none.precision(), 0.0);
  EXPECT_EQ(none.recall(), 0.0);
  EXPECT_EQ(none.f1(), 0.0);
  EXPECT_EQ(none.accuracy(), 1.0);
  EXPECT_EQ(EvalReport().accuracy(), 0.0);
}

TEST(EvalReportTest, ScoreCountsCharacters) {
  const EvalReport r = Score({{U, U, L, L}}, {{U, L, U, L}});
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.tn, 1u);
  EXPECT_THROW(Score({{U}}, {{U, L}}), DataError);
  EXPECT_THROW(Score({{U}}, {}), DataError);
}

TEST(EvalReportTest, PermutationInvariant) {
  Rng rng(1);
  std::vector<LabelSequence> pred, gold;
  for (int i = 0; i < 30; ++i) {
    const size_t n = 1 + rng.Below(10);
    LabelSequence p(n), g(n);
    for (size_t t = 0; t < n; ++t) {
      p[t] = rng.Bernoulli(0.3) ? U : L;
      g[t] = rng.Bernoulli(0.3) ? U : L;
    }
    pred.push_back(p);
    gold.push_back(g);
  }
  const EvalReport base = Score(pred, gold);
  std::vector<size_t> order(pred.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int trial = 0; trial < 10; ++trial) {
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    std::vector<LabelSequence> p2, g2;
    for (size_t i : order) {
      p2.push_back(pred[i]);
      g2.push_back(gold[i]);
    }
    const EvalReport r = Score(p2, g2);
    EXPECT_EQ(r.tp, base.tp);
    EXPECT_EQ(r.fp, base.fp);
    EXPECT_EQ(r.fn, base.fn);
    EXPECT_EQ(r.tn, base.tn);
  }
}

TEST(EvalReportTest, SwappingPredictionAndGoldIsAsymmetric) {
  const std::vector<LabelSequence> pred = {{U, U, U, L, L}};
  const std::vector<LabelSequence> gold = {{U, L, L, L, U}};
  const EvalReport a = Score(pred, gold);
  const EvalReport b = Score(gold, pred);
  ASSERT_NE(a.fp, a.fn);
  EXPECT_EQ(a.fp, b.fn);
  EXPECT_EQ(a.fn, b.fp);
  EXPECT_NE(a.precision(), b.precision());
  EXPECT_NE(a.recall(), b.recall());
  // F1 is symmetric in P and R, so it survives the swap; the asymmetry
  // shows in P and R themselves.
  EXPECT_DOUBLE_EQ(a.f1(), b.f1());
}

TEST(EvalReportTest, Formats) {
  const EvalReport r = EvalReport::FromCounts(3, 1, 2, 4);
  EXPECT_EQ(r.KeyValue(),
            "acc=70.0000 p=75.0000 r=60.0000 f1=66.6667 tp=3 fp=1 fn=2 tn=4");
  const std::string table = r.Table("demo");
  EXPECT_NE(table.find("demo"), std::string::npos);
  EXPECT_NE(table.find("66.67"), std::string::npos);
}

TEST(LabelsOfTest, MarksCasedUppercase) {
  EXPECT_EQ(LabelsOf(U"Ab1É"), (LabelSequence{U, L, L, U}));
}

// A model trained to saturation on a single sentence.
const Checkpoint& JimModel() {
  static const Checkpoint ckpt = [] {
    const auto data =
        std::vector<LabeledSequence>{*DeriveLabels("Jim invited Bill to his party")};
    TrainConfig cfg;
    cfg.model = TinyModelConfig();
    cfg.model.hidden = 24;
    cfg.lr = 0.02;
    cfg.max_epochs = 300;
    cfg.patience = 300;
    cfg.target_dev_accuracy = 1.0;
    cfg.seed = 3;
    return Train(data, data, cfg).checkpoint;
  }();
  return ckpt;
}

TEST(TruecaserTest, RestoresTheTrainingSentence) {
  const Truecaser tc(JimModel().params, JimModel().vocab);
  EXPECT_EQ(tc.Apply("jim invited bill to his party"),
            "Jim invited Bill to his party");
  // Input case is ignored.
  EXPECT_EQ(tc.Apply("JIM INVITED BILL TO HIS PARTY"),
            "Jim invited Bill to his party");
}

TEST(TruecaserTest, CaselessInputPassesThrough) {
  const Truecaser tc(JimModel().params, JimModel().vocab);
  for (const std::string s : {"123 456", "...!?", "  ", "42", ""}) {
    EXPECT_EQ(tc.Apply(s), s);
  }
}

TEST(TruecaserTest, OnlyCaseChanges) {
  const Truecaser tc(JimModel().params, JimModel().vocab);
  Rng rng(2);
  const std::u32string alphabet = U"jim invted blparyhsxqzQWÉéΩω中 .,!0";
  std::vector<std::string> lines;
  for (int i = 0; i < 50; ++i) {
    std::u32string s;
    const size_t len = rng.Below(40);
    for (size_t k = 0; k < len; ++k) s.push_back(alphabet[rng.Below(alphabet.size())]);
    lines.push_back(EncodeUtf8(s));
  }
  const auto out = tc.ApplyAll(lines);
  ASSERT_EQ(out.size(), lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::u32string in = DecodeUtf8(lines[i]);
    const std::u32string got = DecodeUtf8(out[i]);
    ASSERT_EQ(got.size(), in.size());
    for (size_t k = 0; k < in.size(); ++k) {
      // Known characters are lowercased then possibly uppercased; unknown
      // ones come back exactly as given.
      if (tc.vocab().Contains(ToLower(in[k]))) {
        EXPECT_EQ(ToLower(got[k]), ToLower(in[k]));
      } else {
        EXPECT_EQ(got[k], in[k]);
      }
    }
    // Idempotent once re-lowercased.
    EXPECT_EQ(tc.Apply(EncodeUtf8(ToLower(got))),
              tc.Apply(EncodeUtf8(ToLower(in))));
  }
}

TEST(TruecaserTest, LongLinesKeepTheirLength) {
  const Truecaser tc(JimModel().params, JimModel().vocab);
  std::string line;
  while (line.size() < 1500) line += "jim invited bill to his party ";
  const std::string out = tc.Apply(line);
  EXPECT_EQ(out.size(), line.size());
  EXPECT_EQ(out.substr(0, 29), "Jim invited Bill to his party");
}

TEST(TruecaserTest, EvaluateScoresAgainstGold) {
  const Truecaser tc(JimModel().params, JimModel().vocab);
  const auto seqs =
      std::vector<LabeledSequence>{*DeriveLabels("Jim invited Bill to his party")};
  const EvalReport r = tc.Evaluate(seqs);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.total(), 29u);
  EXPECT_EQ(r.f1(), 1.0);
}

TEST(UnigramTableTest, MostFrequentCasing) {
  const UnigramTable t = UnigramTable::Train({"Bill paid the bill. Bill left."});
  EXPECT_EQ(t.Lookup(U"bill"), U"Bill");
  EXPECT_EQ(t.Lookup(U"paid"), U"paid");
  EXPECT_EQ(t.Apply(std::string_view("zyzzy bill")), "zyzzy Bill");
}

TEST(UnigramTableTest, TieBreaks) {
  UnigramTable t;
  t.Add("Apple apple");
  t.Add("IBM Ibm");
  EXPECT_EQ(t.Lookup(U"apple"), U"apple");  // lowercase wins a tie
  EXPECT_EQ(t.Lookup(U"ibm"), U"IBM");      // then the smallest form
}

TEST(UnigramTableTest, NonAlphabeticSpansPassThrough) {
  const UnigramTable t = UnigramTable::Train({"Hello, World! 42"});
  EXPECT_EQ(t.Apply(std::string_view("HELLO,world!  42x")),
            "Hello,World!  42x");
}

TEST(UnigramTableTest, EvaluateBaseline) {
  const std::string line = "Bill paid the bill. Bill left.";
  const EvalReport r = EvaluateBaseline(UnigramTable::Train({line}), {line});
  // Predicted "Bill paid the Bill. Bill left.": one false positive.
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 0u);
  EXPECT_EQ(r.total(), 30u);
}

}  // namespace
}  // namespace truecase
