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

#ifndef RETMEM_PIPELINE_WORKSPACE_H_
#define RETMEM_PIPELINE_WORKSPACE_H_

#include <memory>
#include <string>
#include <vector>

#include "carm/context.h"
#include "carm/index.h"
#include "corpus/db.h"
#include "corpus/ontology.h"
#include "corpus/types.h"
#include "corpus/vocab.h"
#include "json.hpp"

namespace retmem::pipeline {

// Output of the prepare command.
struct Prepared {
  corpus::Ontology ontology;
  corpus::EntityTable db;
  corpus::Vocabulary vocab;
  std::vector<corpus::Dialogue> train;
  std::vector<corpus::Dialogue> val;
  std::vector<corpus::Dialogue> test;

  const std::vector<corpus::Dialogue>& split(const std::string& name) const;
};

// Config: either {"synthetic": SyntheticSpec} or {"corpus", "ontology",
// "db"} paths, plus optional "split": {"val", "test"} fractions and
// "min_freq". Splits are assigned by a seeded shuffle of the id-sorted
// dialogues; the vocabulary comes from the training split.
Prepared prepare(const nlohmann::json& config, uint64_t seed);

void save_prepared(const Prepared& p, const std::string& dir);
// MissingArtifact names the prepare command when files are absent.
Prepared load_prepared(const std::string& dir);

// Output of pretrain-carm: encoder weights plus the index over the training
// split.
struct LoadedRetriever {
  std::unique_ptr<carm::GruContextEncoder> encoder;
  carm::RetrievalIndex index;
};

LoadedRetriever load_retriever(const std::string& dir, const corpus::Vocabulary& vocab);

inline constexpr char kTrainFile[] = "train.json";
inline constexpr char kValFile[] = "val.json";
inline constexpr char kTestFile[] = "test.json";
inline constexpr char kOntologyFile[] = "ontology.json";
inline constexpr char kDbFile[] = "db.json";
inline constexpr char kVocabFile[] = "vocab.txt";
inline constexpr char kEncoderFile[] = "encoder.ckpt";
inline constexpr char kIndexFile[] = "index.bin";
inline constexpr char kModelFile[] = "model.ckpt";

std::string candidates_file(const std::string& split);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace retmem::pipeline

#endif  // RETMEM_PIPELINE_WORKSPACE_H_
