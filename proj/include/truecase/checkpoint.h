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

#ifndef TRUECASE_CHECKPOINT_H_
#define TRUECASE_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "truecase/corpus.h"
#include "truecase/model.h"

namespace truecase {

// On-disk layout (all integers little-endian):
//
//   "TCSE"                      magic
//   u32 version                 kCheckpointVersion
//   u32 n, n bytes              metadata, UTF-8 JSON (hyperparameters,
//                               vocabulary, best dev F1, epoch)
//   u32 count                   number of tensors, then per tensor:
//     u32 n, n bytes            name
//     u32 rank, rank x u32      dims
//     prod(dims) x f32          values
//   u32 crc32                   of every preceding byte
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  ModelParams params;
  Vocabulary vocab;
  double best_dev_f1 = 0.0;
  size_t epoch = 0;
  // Training hyperparameters recorded for reference (lr, batch size, ...).
  std::string train_settings;

  // Snapshot with values rounded to 32-bit floats, so that a saved and
  // reloaded checkpoint predicts exactly like this one.
  static Checkpoint Snapshot(const ModelParams& params, const Vocabulary& vocab,
                             double best_dev_f1, size_t epoch,
                             std::string train_settings = {});
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
// Throws FormatError naming the failed field ("magic", "version",
// "checksum", "length", "metadata", "tensor <name>").
Checkpoint ParseCheckpoint(const std::string& bytes);

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace truecase

#endif  // TRUECASE_CHECKPOINT_H_
