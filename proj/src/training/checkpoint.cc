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

#include "training/checkpoint.h"

#include <fstream>
#include <sstream>

#include "common/error.h"
#include "neural/serialize.h"

namespace retmem::training {

namespace {

neural::ArrayFile to_file(const mamd::MamdModel& model, const CheckpointInfo& info) {
  neural::ArrayFile file;
  file.meta = {{"kind", "mamd-checkpoint"},
               {"version", kCheckpointVersion},
               {"model", info.model.to_json()},
               {"train", info.train.to_json()},
               {"vocab_hash", info.vocab_hash},
               {"vocab_size", model.vocab_size()},
               {"epoch", info.epoch},
               {"val_score", info.val_score}};
  file.arrays = neural::export_params(model.params());
  return file;
}

LoadedCheckpoint from_file(const neural::ArrayFile& file,
                           const corpus::Vocabulary& vocab) {
  const nlohmann::json& m = file.meta;
  if (m.value("kind", "") != "mamd-checkpoint") {
    RETMEM_THROW(ValidationError, "not a model checkpoint");
  }
  if (m.value("version", -1) != kCheckpointVersion) {
    RETMEM_THROW(ValidationError, "checkpoint version " << m.value("version", -1)
                                                        << " is not supported (expected "
                                                        << kCheckpointVersion << ")");
  }
  if (m.value("vocab_hash", "") != vocab.hash()) {
    RETMEM_THROW(ValidationError, "checkpoint was trained with a different vocabulary ("
                                      << m.value("vocab_hash", "") << " vs "
                                      << vocab.hash() << ")");
  }
  LoadedCheckpoint out;
  out.info.model = mamd::MamdConfig::from_json(m.at("model"));
  out.info.train = TrainConfig::from_json(m.at("train"));
  out.info.vocab_hash = m.at("vocab_hash").get<std::string>();
  out.info.epoch = m.value("epoch", size_t{0});
  out.info.val_score = m.value("val_score", 0.0);
  out.model = std::make_unique<mamd::MamdModel>(out.info.model, vocab.size());
  neural::import_params(out.model->params(), file.arrays);
  return out;
}

}  // namespace

std::string encode_checkpoint(const mamd::MamdModel& model, const CheckpointInfo& info) {
  return neural::encode_array_file(to_file(model, info));
}

void save_checkpoint(const mamd::MamdModel& model, const CheckpointInfo& info,
                     const std::string& path) {
  neural::write_array_file(to_file(model, info), path);
}

LoadedCheckpoint load_checkpoint(const std::string& path,
                                 const corpus::Vocabulary& vocab) {
  return from_file(neural::read_array_file(path), vocab);
}

LoadedCheckpoint decode_checkpoint(const std::string& bytes,
                                   const corpus::Vocabulary& vocab) {
  return from_file(neural::decode_array_file(bytes), vocab);
}

}  // namespace retmem::training
