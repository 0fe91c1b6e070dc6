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

// Command-line front end: train, eval, apply, gradcheck, baseline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "truecase/checkpoint.h"
#include "truecase/corpus.h"
#include "truecase/errors.h"
#include "truecase/eval.h"
#include "truecase/gradcheck.h"
#include "truecase/parallel.h"
#include "truecase/train.h"

namespace {

using namespace truecase;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Lines handed to the worker pool per round while streaming.
constexpr size_t kApplyChunkLines = 256;

struct TrainFlags {
  std::string train_path;
  std::string dev_path;
  std::string out_path;
  size_t epochs = 30;
  size_t batch_size = 64;
  double lr = 0.002;
  uint64_t seed = 0;
  bool no_cnn = false;
  bool no_crf = false;
  double clip = 0.0;
  size_t patience = 3;
  size_t hidden = 150;
};

int RunTrain(const TrainFlags& f) {
  TrainConfig cfg;
  cfg.max_epochs = f.epochs;
  cfg.batch_size = f.batch_size;
  cfg.lr = f.lr;
  cfg.seed = f.seed;
  cfg.patience = f.patience;
  if (f.clip > 0.0) cfg.clip_norm = f.clip;
  cfg.model.use_cnn = !f.no_cnn;
  cfg.model.head = f.no_crf ? Head::kSoftmax : Head::kCrf;
  cfg.model.hidden = f.hidden;
  cfg.threads = DefaultThreads();

  const TrainResult result = TrainFromFiles(
      f.train_path, f.dev_path, cfg, [](const EpochRecord& r) {
        std::fprintf(stderr,
                     "epoch %zu  train_nll=%.4f  nll/char=%.4f  dev_acc=%.2f  "
                     "dev_f1=%.2f%s\n",
                     r.epoch, r.train_nll, r.train_nll_per_char,
                     100.0 * r.dev_accuracy, 100.0 * r.dev_f1,
                     r.improved ? "  *" : "");
      });
  SaveCheckpoint(result.checkpoint, f.out_path);
  std::fprintf(stderr, "stopped (%s); best dev F1 %.2f at epoch %zu -> %s\n",
               result.stop_reason.c_str(), 100.0 * result.checkpoint.best_dev_f1,
               result.checkpoint.epoch, f.out_path.c_str());
  return kExitOk;
}

Truecaser LoadTruecaser(const std::string& path) {
  Checkpoint ckpt = LoadCheckpoint(path);
  return Truecaser(std::move(ckpt.params), std::move(ckpt.vocab),
                   DefaultThreads());
}

int RunEval(const std::string& model_path, const std::string& test_path) {
  const Truecaser truecaser = LoadTruecaser(model_path);
  const auto test = ReadCorpus(test_path);
  if (test.empty()) throw DataError("empty corpus: " + test_path);
  const EvalReport report = truecaser.Evaluate(test);
  std::cout << report.Table("model, character-level") << report.KeyValue()
            << "\n";
  return kExitOk;
}

int RunApply(const std::string& model_path, const std::string& input_path) {
  const Truecaser truecaser = LoadTruecaser(model_path);
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!input_path.empty()) {
    file.open(input_path, std::ios::binary);
    if (!file) throw IoError("cannot read " + input_path);
    in = &file;
  }
  std::vector<std::string> chunk;
  std::string line;
  auto flush = [&] {
    for (const std::string& out : truecaser.ApplyAll(chunk)) {
      std::cout << out << '\n';
    }
    std::cout.flush();
    chunk.clear();
  };
  while (std::getline(*in, line)) {
    chunk.push_back(line);
    if (chunk.size() == kApplyChunkLines) flush();
  }
  if (in->bad()) throw IoError("error reading input");
  flush();
  return kExitOk;
}

int RunGradCheck(uint64_t seed) {
  const GradCheckResult r = RunDefaultGradCheck(seed);
  std::cout << "max_relative_error=" << r.max_relative_error
            << " coordinates=" << r.coordinates_checked
            << " kinks_skipped=" << r.kinks_skipped << "\n";
  return r.max_relative_error <= kGradCheckTolerance ? kExitOk : kExitRuntime;
}

int RunBaseline(const std::string& train_path, const std::string& test_path) {
  const UnigramTable table = UnigramTable::Train(ReadLines(train_path));
  if (table.size() == 0) throw DataError("empty corpus: " + train_path);
  const EvalReport report = EvaluateBaseline(table, ReadLines(test_path));
  std::cout << report.Table("unigram baseline, character-level")
            << report.KeyValue() << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Character-level truecaser (CNN + BiLSTM + CRF)", "truecase"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--train", tf.train_path, "Cased training corpus")
      ->required();
  train->add_option("--dev", tf.dev_path, "Cased development corpus")
      ->required();
  train->add_option("--out", tf.out_path, "Output checkpoint")->required();
  train->add_option("--epochs", tf.epochs, "Maximum epochs");
  train->add_option("--batch-size", tf.batch_size, "Sequences per batch");
  train->add_option("--lr", tf.lr, "Adam learning rate");
  train->add_option("--seed", tf.seed, "Random seed");
  train->add_flag("--no-cnn", tf.no_cnn, "Feed embeddings to the BiLSTM");
  train->add_flag("--no-crf", tf.no_crf, "Softmax head instead of CRF");
  train->add_option("--clip", tf.clip, "Gradient norm clip (0 = off)");
  train->add_option("--patience", tf.patience,
                    "Epochs without dev F1 improvement before stopping");
  train->add_option("--hidden", tf.hidden, "BiLSTM hidden units");

  std::string model_path, test_path, input_path, train_path;
  auto* eval = app.add_subcommand("eval", "Score a model on a cased corpus");
  eval->add_option("--model", model_path, "Checkpoint")->required();
  eval->add_option("--test", test_path, "Cased test corpus")->required();

  auto* apply = app.add_subcommand("apply", "Truecase text line by line");
  apply->add_option("--model", model_path, "Checkpoint")->required();
  apply->add_option("--input", input_path, "Input file (default: stdin)");

  uint64_t gc_seed = 0;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_option("--seed", gc_seed, "Random seed");

  auto* baseline = app.add_subcommand(
      "baseline", "Score the most-frequent-casing word baseline");
  baseline->add_option("--train", train_path, "Cased training corpus")
      ->required();
  baseline->add_option("--test", test_path, "Cased test corpus")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return RunTrain(tf);
    if (*eval) return RunEval(model_path, test_path);
    if (*apply) return RunApply(model_path, input_path);
    if (*gradcheck) return RunGradCheck(gc_seed);
    if (*baseline) return RunBaseline(train_path, test_path);
  } catch (const std::exception& e) {
    std::cerr << "truecase: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return Main(argc, argv); }
