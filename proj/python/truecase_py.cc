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

// Python bindings: training, truecasing, scoring and checkpoint I/O.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "truecase/checkpoint.h"
#include "truecase/corpus.h"
#include "truecase/errors.h"
#include "truecase/eval.h"
#include "truecase/gradcheck.h"
#include "truecase/parallel.h"
#include "truecase/train.h"
#include "truecase/unicode.h"

namespace py = pybind11;

namespace truecase {
namespace {

std::vector<LabeledSequence> ToSequences(const std::vector<std::string>& lines) {
  std::ostringstream joined;
  for (const auto& l : lines) joined << l << '\n';
  std::istringstream in(joined.str());
  return ReadCorpus(in);
}

py::dict ReportDict(const EvalReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy();
  d["precision"] = r.precision();
  d["recall"] = r.recall();
  d["f1"] = r.f1();
  d["tp"] = r.tp;
  d["fp"] = r.fp;
  d["fn"] = r.fn;
  d["tn"] = r.tn;
  return d;
}

// A checkpoint together with a ready-to-use truecaser.
class Model {
 public:
  explicit Model(Checkpoint ckpt)
      : ckpt_(std::move(ckpt)),
        truecaser_(ckpt_.params, ckpt_.vocab, DefaultThreads()) {}

  static Model Load(const std::string& path) { return Model(LoadCheckpoint(path)); }
  void Save(const std::string& path) const { SaveCheckpoint(ckpt_, path); }

  std::string Apply(const std::string& line) const { return truecaser_.Apply(line); }
  std::vector<std::string> ApplyAll(const std::vector<std::string>& lines) const {
    py::gil_scoped_release release;
    return truecaser_.ApplyAll(lines);
  }
  py::dict Evaluate(const std::vector<std::string>& lines) const {
    EvalReport r;
    {
      py::gil_scoped_release release;
      r = truecaser_.Evaluate(ToSequences(lines));
    }
    return ReportDict(r);
  }

  py::dict Config() const {
    const ModelConfig& c = ckpt_.params.config;
    py::dict d;
    d["vocab_size"] = c.vocab_size;
    d["embed_dim"] = c.embed_dim;
    d["conv_filters"] = c.conv_filters;
    d["conv_width"] = c.conv_width;
    d["hidden"] = c.hidden;
    d["num_layers"] = c.num_layers;
    d["use_cnn"] = c.use_cnn;
    d["head"] = HeadName(c.head);
    d["epoch"] = ckpt_.epoch;
    d["best_dev_f1"] = ckpt_.best_dev_f1;
    return d;
  }

 private:
  Checkpoint ckpt_;
  Truecaser truecaser_;
};

Model TrainModel(const std::vector<std::string>& train,
                 const std::vector<std::string>& dev, size_t epochs,
                 size_t batch_size, double lr, uint64_t seed, bool use_cnn,
                 bool use_crf, size_t hidden, size_t patience,
                 std::optional<double> clip) {
  TrainConfig cfg;
  cfg.max_epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.lr = lr;
  cfg.seed = seed;
  cfg.patience = patience;
  cfg.clip_norm = clip;
  cfg.model.use_cnn = use_cnn;
  cfg.model.head = use_crf ? Head::kCrf : Head::kSoftmax;
  cfg.model.hidden = hidden;
  cfg.threads = DefaultThreads();
  const auto train_seqs = ToSequences(train);
  const auto dev_seqs = ToSequences(dev);
  py::gil_scoped_release release;
  return Model(Train(train_seqs, dev_seqs, cfg).checkpoint);
}

}  // namespace
}  // namespace truecase

PYBIND11_MODULE(_truecase, m) {
  using namespace truecase;
  m.doc() = "Character-level truecaser (CNN + BiLSTM + CRF)";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError",
                                       PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const DataError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ShapeError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::Load, py::arg("path"))
      .def("save", &Model::Save, py::arg("path"))
      .def("apply", &Model::Apply, py::arg("line"))
      .def("apply_all", &Model::ApplyAll, py::arg("lines"))
      .def("evaluate", &Model::Evaluate, py::arg("lines"))
      .def_property_readonly("config", &Model::Config);

  m.def("train", &TrainModel, py::arg("train"), py::arg("dev"),
        py::arg("epochs") = 30, py::arg("batch_size") = 64,
        py::arg("lr") = 0.002, py::arg("seed") = 0, py::arg("use_cnn") = true,
        py::arg("use_crf") = true, py::arg("hidden") = 150,
        py::arg("patience") = 3, py::arg("clip") = py::none());

  m.def(
      "derive_labels",
      [](const std::string& line) -> std::optional<std::pair<std::string, std::string>> {
        const auto seq = DeriveLabels(line);
        if (!seq) return std::nullopt;
        return std::make_pair(EncodeUtf8(seq->raw_chars), LabelString(seq->labels));
      },
      py::arg("line"), "Lowercased line and its U/L label string.");

  m.def(
      "baseline",
      [](const std::vector<std::string>& train, const std::vector<std::string>& test) {
        return ReportDict(EvaluateBaseline(UnigramTable::Train(train), test));
      },
      py::arg("train"), py::arg("test"));

  m.def(
      "gradcheck",
      [](uint64_t seed) {
        const GradCheckResult r = RunDefaultGradCheck(seed);
        py::dict d;
        d["max_relative_error"] = r.max_relative_error;
        d["coordinates"] = r.coordinates_checked;
        d["kinks_skipped"] = r.kinks_skipped;
        return d;
      },
      py::arg("seed") = 0);
}
