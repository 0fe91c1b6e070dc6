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

#include "truecase/checkpoint.h"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "truecase/errors.h"
#include "truecase/unicode.h"

namespace truecase {
namespace {

constexpr char kMagic[4] = {'T', 'C', 'S', 'E'};

void PutU32(uint32_t v, std::string* out) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutBytes(std::string_view bytes, std::string* out) {
  PutU32(static_cast<uint32_t>(bytes.size()), out);
  out->append(bytes);
}

uint32_t Crc32(std::string_view bytes) {
  return static_cast<uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  uint32_t U32(const char* what) {
    Need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::string_view Bytes(size_t n, const char* what) {
    Need(n, what);
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  float F32(const char* what) {
    const uint32_t bits = U32(what);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("length", std::string("truncated while reading ") + what);
    }
  }

  std::string_view bytes_;
  size_t pos_ = 0;
};

nlohmann::json ConfigToJson(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},   {"embed_dim", c.embed_dim},
          {"conv_width", c.conv_width},   {"conv_filters", c.conv_filters},
          {"hidden", c.hidden},           {"num_layers", c.num_layers},
          {"use_cnn", c.use_cnn},         {"head", HeadName(c.head)}};
}

ModelConfig ConfigFromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<size_t>();
  c.embed_dim = j.at("embed_dim").get<size_t>();
  c.conv_width = j.at("conv_width").get<size_t>();
  c.conv_filters = j.at("conv_filters").get<size_t>();
  c.hidden = j.at("hidden").get<size_t>();
  c.num_layers = j.at("num_layers").get<size_t>();
  c.use_cnn = j.at("use_cnn").get<bool>();
  c.head = ParseHead(j.at("head").get<std::string>());
  return c;
}

}  // namespace

Checkpoint Checkpoint::Snapshot(const ModelParams& params,
                                const Vocabulary& vocab, double best_dev_f1,
                                size_t epoch, std::string train_settings) {
  Checkpoint ckpt;
  ckpt.params = params;
  ckpt.params.RoundToFloat();
  ckpt.vocab = vocab;
  ckpt.best_dev_f1 = best_dev_f1;
  ckpt.epoch = epoch;
  ckpt.train_settings = std::move(train_settings);
  return ckpt;
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, 4);
  PutU32(ckpt.version, &out);
  const nlohmann::json meta = {
      {"model", ConfigToJson(ckpt.params.config)},
      {"vocab", EncodeUtf8(ckpt.vocab.Chars())},
      {"best_dev_f1", ckpt.best_dev_f1},
      {"epoch", ckpt.epoch},
      {"train", ckpt.train_settings},
  };
  PutBytes(meta.dump(), &out);
  const auto named = ckpt.params.Named();
  PutU32(static_cast<uint32_t>(named.size()), &out);
  for (const auto& [name, t] : named) {
    PutBytes(name, &out);
    PutU32(static_cast<uint32_t>(t->rank()), &out);
    for (size_t d : t->shape()) PutU32(static_cast<uint32_t>(d), &out);
    for (double v : t->values()) {
      const float f = static_cast<float>(v);
      uint32_t bits;
      std::memcpy(&bits, &f, sizeof(bits));
      PutU32(bits, &out);
    }
  }
  PutU32(Crc32(out), &out);
  return out;
}

Checkpoint ParseCheckpoint(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("magic", "not a truecase checkpoint");
  }
  Reader header(std::string_view(bytes).substr(4));
  const uint32_t version = header.U32("version");
  if (version != kCheckpointVersion) {
    throw FormatError("version", "unsupported checkpoint version " +
                                     std::to_string(version) + " (expected " +
                                     std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 12) throw FormatError("checksum", "file too short");
  const std::string_view body(bytes.data(), bytes.size() - 4);
  Reader crc_reader(std::string_view(bytes).substr(bytes.size() - 4));
  if (crc_reader.U32("checksum") != Crc32(body)) {
    throw FormatError("checksum", "CRC32 mismatch (file corrupt or truncated)");
  }

  Reader in(body.substr(8));
  Checkpoint ckpt;
  ckpt.version = version;
  const std::string_view meta_bytes = in.Bytes(in.U32("metadata length"), "metadata");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_bytes);
    ckpt.params.config = ConfigFromJson(meta.at("model"));
    ckpt.vocab = Vocabulary(DecodeUtf8(meta.at("vocab").get<std::string>()));
    ckpt.best_dev_f1 = meta.at("best_dev_f1").get<double>();
    ckpt.epoch = meta.at("epoch").get<size_t>();
    ckpt.train_settings = meta.value("train", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("metadata", e.what());
  } catch (const DataError& e) {
    throw FormatError("metadata", e.what());
  }
  if (ckpt.vocab.size() != ckpt.params.config.vocab_size) {
    throw FormatError("metadata", "vocabulary size disagrees with model");
  }

  ckpt.params = ModelParams::Initialize(ckpt.params.config, 0);
  std::map<std::string, Tensor*> expected;
  for (auto& [name, t] : ckpt.params.Named()) expected[name] = t;
  const uint32_t count = in.U32("tensor count");
  if (count != expected.size()) {
    throw FormatError("tensor count", "expected " +
                                          std::to_string(expected.size()) +
                                          ", got " + std::to_string(count));
  }
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name(in.Bytes(in.U32("tensor name"), "tensor name"));
    auto it = expected.find(name);
    if (it == expected.end()) {
      throw FormatError("tensor " + name, "unexpected tensor");
    }
    Tensor* t = it->second;
    const uint32_t rank = in.U32("tensor rank");
    Shape shape(rank);
    for (auto& d : shape) d = in.U32("tensor dims");
    if (shape != t->shape()) {
      throw FormatError("tensor " + name, "shape " + ShapeToString(shape) +
                                              ", expected " +
                                              ShapeToString(t->shape()));
    }
    for (double& v : t->values()) v = static_cast<double>(in.F32("tensor data"));
    expected.erase(it);
  }
  if (!in.done()) throw FormatError("length", "trailing bytes");
  return ckpt;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::string bytes = SerializeCheckpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ParseCheckpoint(buf.str());
}

}  // namespace truecase
