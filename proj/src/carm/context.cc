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

#include "carm/context.h"

#include <fstream>
#include <sstream>

#include "common/error.h"
#include "common/hash.h"
#include "common/rng.h"
#include "corpus/linearize.h"
#include "neural/serialize.h"
#include "neural/tape.h"

namespace retmem::carm {

using corpus::Vocabulary;

ContextInput make_context_input(const corpus::Dialogue& dialogue,
                                size_t turn_index,
                                const corpus::BeliefState* belief) {
  if (turn_index >= dialogue.turns.size()) {
    RETMEM_THROW(InvalidArgument, "turn index " << turn_index << " out of range for "
                                                << dialogue.dialogue_id);
  }
  ContextInput in;
  const corpus::Turn& turn = dialogue.turns[turn_index];
  in.key = {dialogue.dialogue_id, turn.turn_id};
  in.belief = belief ? *belief : turn.belief;
  for (size_t i = 0; i < turn_index; ++i) {
    in.history.push_back(dialogue.turns[i].user);
    in.history.push_back(dialogue.turns[i].response);
  }
  in.history.push_back(turn.user);
  return in;
}

std::vector<int> context_tokens(const ContextInput& input,
                                const Vocabulary& vocab, size_t max_seq_len) {
  std::vector<int> out = {Vocabulary::kSos};
  for (int id : vocab.encode(corpus::linearize_belief(input.belief))) {
    out.push_back(id);
  }
  out.push_back(Vocabulary::kSep);
  if (out.size() >= max_seq_len) {
    out.resize(max_seq_len);
    return out;
  }
  std::vector<int> flat;
  for (const corpus::Tokens& utt : input.history) {
    for (int id : vocab.encode(utt)) flat.push_back(id);
  }
  const size_t budget = max_seq_len - out.size();
  const size_t start = flat.size() > budget ? flat.size() - budget : 0;
  out.insert(out.end(), flat.begin() + static_cast<std::ptrdiff_t>(start),
             flat.end());
  return out;
}

void CarmConfig::validate() const {
  if (embed_dim < 1 || hidden < 1) {
    RETMEM_THROW(InvalidArgument, "retriever widths must be positive");
  }
  if (max_seq_len < 3) RETMEM_THROW(InvalidArgument, "max_seq_len must be >= 3");
  if (batch_size < 1) RETMEM_THROW(InvalidArgument, "batch_size must be >= 1");
  if (!(lr > 0.0)) RETMEM_THROW(InvalidArgument, "learning rate must be positive");
  if (epochs < 1) RETMEM_THROW(InvalidArgument, "epochs must be >= 1");
  if (warmup < 0.0 || warmup >= 1.0) {
    RETMEM_THROW(InvalidArgument, "warmup proportion must be in [0, 1)");
  }
  if (n_raw < 1) RETMEM_THROW(InvalidArgument, "n_raw must be >= 1");
}

nlohmann::json CarmConfig::to_json() const {
  return {{"embed_dim", embed_dim}, {"hidden", hidden},
          {"max_seq_len", max_seq_len}, {"batch_size", batch_size},
          {"lr", lr}, {"epochs", epochs}, {"warmup", warmup},
          {"seed", seed}, {"n_raw", n_raw}};
}

CarmConfig CarmConfig::from_json(const nlohmann::json& j) {
  CarmConfig c;
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.epochs = j.value("epochs", c.epochs);
  c.warmup = j.value("warmup", c.warmup);
  c.seed = j.value("seed", c.seed);
  c.n_raw = j.value("n_raw", c.n_raw);
  c.validate();
  return c;
}

neural::BiGruEncoder GruContextEncoder::create_params(neural::ParamStore& store,
                                                      const CarmConfig& config,
                                                      size_t vocab_size,
                                                      Rng& rng) {
  neural::ParamId emb =
      store.add_matrix("context.embedding", vocab_size, config.embed_dim, rng);
  return neural::BiGruEncoder::create(store, "context.encoder", emb,
                                      config.embed_dim, config.hidden, rng);
}

GruContextEncoder::GruContextEncoder(const CarmConfig& config, Vocabulary vocab)
    : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  Rng rng(config_.seed);
  encoder_ = create_params(params_, config_, vocab_.size(), rng);
}

ContextVector GruContextEncoder::encode(const ContextInput& input) const {
  neural::Tape tape(params_);
  std::vector<int> tokens = context_tokens(input, vocab_, config_.max_seq_len);
  neural::EncodedSeq enc = neural::bigru_encode(tape, encoder_, tokens);
  auto v = tape.value(enc.seq.states[0]);
  return ContextVector(v.begin(), v.end());
}

std::string GruContextEncoder::fingerprint() const {
  Fnv1a h;
  h.update("gru-context");
  h.update(config_.to_json().dump());
  h.update(vocab_.hash());
  h.update(params_.fingerprint());
  return h.hex();
}

void GruContextEncoder::save(const std::string& path) const {
  neural::ArrayFile file;
  file.meta = {{"kind", "context-encoder"},
               {"config", config_.to_json()},
               {"vocab_hash", vocab_.hash()}};
  file.arrays = neural::export_params(params_);
  neural::write_array_file(file, path);
}

std::unique_ptr<GruContextEncoder> GruContextEncoder::load(
    const std::string& path, const Vocabulary& vocab) {
  neural::ArrayFile file = neural::read_array_file(path);
  if (file.meta.value("kind", "") != "context-encoder") {
    RETMEM_THROW(ValidationError, path << " is not a context encoder file");
  }
  if (file.meta.value("vocab_hash", "") != vocab.hash()) {
    RETMEM_THROW(ValidationError, path << " was written for a different vocabulary");
  }
  auto enc = std::make_unique<GruContextEncoder>(
      CarmConfig::from_json(file.meta.at("config")), vocab);
  neural::import_params(enc->params_, file.arrays);
  return enc;
}

std::unique_ptr<PrecomputedEncoder> PrecomputedEncoder::load(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(MissingArtifact, "cannot open " << path);
  auto enc = std::make_unique<PrecomputedEncoder>();
  Fnv1a h;
  h.update("precomputed");
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    h.update(line);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      RETMEM_THROW(ParseError, path << ":" << lineno << ": " << e.what());
    }
    corpus::SampleKey key{j.at("dialogue_id").get<std::string>(),
                          j.at("turn_id").get<int>()};
    ContextVector v = j.at("vector").get<ContextVector>();
    if (v.empty()) RETMEM_THROW(ParseError, path << ":" << lineno << ": empty vector");
    if (enc->width_ == 0) enc->width_ = v.size();
    if (v.size() != enc->width_) {
      RETMEM_THROW(ParseError, path << ":" << lineno << ": width " << v.size()
                                    << ", expected " << enc->width_);
    }
    if (!enc->vectors_.emplace(key, std::move(v)).second) {
      RETMEM_THROW(ParseError, path << ":" << lineno << ": duplicate key "
                                    << key.dialogue_id << "/" << key.turn_id);
    }
  }
  enc->fingerprint_ = h.hex();
  return enc;
}

ContextVector PrecomputedEncoder::encode(const ContextInput& input) const {
  auto it = vectors_.find(input.key);
  if (it == vectors_.end()) {
    RETMEM_THROW(MissingArtifact, "no precomputed vector for "
                                      << input.key.dialogue_id << "/"
                                      << input.key.turn_id);
  }
  return it->second;
}

}  // namespace retmem::carm
