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

#include "pipeline/workspace.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.h"
#include "common/rng.h"
#include "corpus/corpus_io.h"
#include "corpus/synthetic.h"

namespace retmem::pipeline {

namespace fs = std::filesystem;

const std::vector<corpus::Dialogue>& Prepared::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  RETMEM_THROW(InvalidArgument, "unknown split '" << name << "' (train, val or test)");
}

std::string candidates_file(const std::string& split) {
  return "candidates." + split + ".jsonl";
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(MissingArtifact, "cannot open " << path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, path << ": " << e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out << text;
}

Prepared prepare(const nlohmann::json& config, uint64_t seed) {
  Prepared p;
  std::vector<corpus::Dialogue> all;
  if (config.contains("synthetic")) {
    p.ontology = corpus::synthetic_ontology();
    p.db = corpus::synthetic_db();
    all = corpus::generate_synthetic_corpus(
        corpus::SyntheticSpec::from_json(config.at("synthetic")), seed);
  } else if (config.contains("corpus")) {
    if (!config.contains("ontology") || !config.contains("db")) {
      RETMEM_THROW(InvalidArgument, "prepare config with 'corpus' also needs 'ontology' and 'db'");
    }
    p.ontology = corpus::Ontology::load(config.at("ontology").get<std::string>());
    p.db = corpus::EntityTable::load(config.at("db").get<std::string>());
    all = corpus::load_corpus(config.at("corpus").get<std::string>(), p.ontology);
  } else {
    RETMEM_THROW(InvalidArgument, "prepare config needs 'synthetic' or 'corpus'");
  }
  const nlohmann::json split = config.value("split", nlohmann::json::object());
  const double val_frac = split.value("val", 0.1);
  const double test_frac = split.value("test", 0.1);
  if (val_frac < 0 || test_frac < 0 || val_frac + test_frac >= 1.0) {
    RETMEM_THROW(InvalidArgument, "split fractions must be >= 0 and sum below 1");
  }
  std::vector<size_t> order(all.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const size_t n_val = static_cast<size_t>(val_frac * static_cast<double>(all.size()));
  const size_t n_test = static_cast<size_t>(test_frac * static_cast<double>(all.size()));
  for (size_t i = 0; i < order.size(); ++i) {
    corpus::Dialogue& d = all[order[i]];
    if (i < n_val) {
      p.val.push_back(std::move(d));
    } else if (i < n_val + n_test) {
      p.test.push_back(std::move(d));
    } else {
      p.train.push_back(std::move(d));
    }
  }
  auto by_id = [](const corpus::Dialogue& a, const corpus::Dialogue& b) {
    return a.dialogue_id < b.dialogue_id;
  };
  std::sort(p.train.begin(), p.train.end(), by_id);
  std::sort(p.val.begin(), p.val.end(), by_id);
  std::sort(p.test.begin(), p.test.end(), by_id);
  p.vocab = corpus::build_vocab(p.train, p.ontology, config.value("min_freq", 1));
  return p;
}

void save_prepared(const Prepared& p, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path d(dir);
  corpus::save_corpus(p.train, (d / kTrainFile).string());
  corpus::save_corpus(p.val, (d / kValFile).string());
  corpus::save_corpus(p.test, (d / kTestFile).string());
  p.ontology.save((d / kOntologyFile).string());
  p.db.save((d / kDbFile).string());
  p.vocab.save((d / kVocabFile).string());
}

Prepared load_prepared(const std::string& dir) {
  const fs::path d(dir);
  for (const char* f : {kTrainFile, kValFile, kTestFile, kOntologyFile, kDbFile, kVocabFile}) {
    if (!fs::is_regular_file(d / f)) {
      RETMEM_THROW(MissingArtifact, (d / f).string()
                                        << " not found; run the prepare command first");
    }
  }
  Prepared p;
  p.ontology = corpus::Ontology::load((d / kOntologyFile).string());
  p.db = corpus::EntityTable::load((d / kDbFile).string());
  p.vocab = corpus::Vocabulary::load((d / kVocabFile).string());
  p.train = corpus::load_corpus((d / kTrainFile).string(), p.ontology);
  p.val = corpus::load_corpus((d / kValFile).string(), p.ontology);
  p.test = corpus::load_corpus((d / kTestFile).string(), p.ontology);
  return p;
}

LoadedRetriever load_retriever(const std::string& dir, const corpus::Vocabulary& vocab) {
  const fs::path d(dir);
  for (const char* f : {kEncoderFile, kIndexFile}) {
    if (!fs::is_regular_file(d / f)) {
      RETMEM_THROW(MissingArtifact, (d / f).string()
                                        << " not found; run the pretrain-carm command first");
    }
  }
  LoadedRetriever r;
  r.encoder = carm::GruContextEncoder::load((d / kEncoderFile).string(), vocab);
  r.index = carm::RetrievalIndex::load((d / kIndexFile).string());
  if (r.index.encoder_fingerprint() != r.encoder->fingerprint()) {
    RETMEM_THROW(ValidationError, "index in " << dir
                                              << " was built by a different encoder; rerun pretrain-carm");
  }
  return r;
}

}  // namespace retmem::pipeline
