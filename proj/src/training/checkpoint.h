// Copyright 2026 The retmem Authors.
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

#ifndef RETMEM_TRAINING_CHECKPOINT_H_
#define RETMEM_TRAINING_CHECKPOINT_H_

#include <memory>
#include <string>

#include "corpus/vocab.h"
#include "json.hpp"
#include "mamd/model.h"
#include "training/trainer.h"

namespace retmem::training {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointInfo {
  mamd::MamdConfig model;
  TrainConfig train;
  std::string vocab_hash;
  size_t epoch = 0;
  double val_score = 0.0;
};

struct LoadedCheckpoint {
  std::unique_ptr<mamd::MamdModel> model;
  CheckpointInfo info;
};

std::string encode_checkpoint(const mamd::MamdModel& model, const CheckpointInfo& info);
void save_checkpoint(const mamd::MamdModel& model, const CheckpointInfo& info,
                     const std::string& path);
// Refuses files with another format version or vocabulary hash; truncated
// or corrupt files raise ParseError before any parameter is touched.
LoadedCheckpoint load_checkpoint(const std::string& path,
                                 const corpus::Vocabulary& vocab);
LoadedCheckpoint decode_checkpoint(const std::string& bytes,
                                   const corpus::Vocabulary& vocab);

}  // namespace retmem::training

#endif  // RETMEM_TRAINING_CHECKPOINT_H_
