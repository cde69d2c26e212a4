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

#ifndef RETMEM_CARM_CONTEXT_H_
#define RETMEM_CARM_CONTEXT_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "corpus/types.h"
#include "corpus/vocab.h"
#include "json.hpp"
#include "neural/layers.h"
#include "neural/param_store.h"

namespace retmem::carm {

using ContextVector = std::vector<double>;

// What the retriever sees for one turn: the belief and the dialogue history
// U_1, R_1, ..., R_{t-1}, U_t.
struct ContextInput {
  corpus::SampleKey key;
  corpus::BeliefState belief;
  std::vector<corpus::Tokens> history;
};

// Uses the turn's gold belief unless `belief` is given.
ContextInput make_context_input(const corpus::Dialogue& dialogue,
                                size_t turn_index,
                                const corpus::BeliefState* belief = nullptr);

// <sos> belief <sep> history, history truncated from the front so the whole
// sequence fits in max_seq_len. The belief block is only cut when it alone
// does not fit.
std::vector<int> context_tokens(const ContextInput& input,
                                const corpus::Vocabulary& vocab,
                                size_t max_seq_len);

class ContextEncoder {
 public:
  virtual ~ContextEncoder() = default;
  virtual size_t width() const = 0;
  virtual ContextVector encode(const ContextInput& input) const = 0;
  virtual std::string fingerprint() const = 0;
};

struct CarmConfig {
  size_t embed_dim = 50;
  size_t hidden = 100;
  size_t max_seq_len = 400;
  size_t batch_size = 6;
  double lr = 5e-5;
  size_t epochs = 20;
  double warmup = 0.1;
  uint64_t seed = 42;
  size_t n_raw = 50;

  void validate() const;
  nlohmann::json to_json() const;
  static CarmConfig from_json(const nlohmann::json& j);
};

// Bidirectional GRU over the context; the vector is the encoder state at the
// <sos> position.
class GruContextEncoder : public ContextEncoder {
 public:
  GruContextEncoder(const CarmConfig& config, corpus::Vocabulary vocab);

  size_t width() const override { return config_.hidden; }
  ContextVector encode(const ContextInput& input) const override;
  std::string fingerprint() const override;

  const CarmConfig& config() const { return config_; }
  const corpus::Vocabulary& vocab() const { return vocab_; }
  neural::ParamStore& params() { return params_; }
  const neural::ParamStore& params() const { return params_; }
  const neural::BiGruEncoder& encoder() const { return encoder_; }

  void save(const std::string& path) const;
  // Refuses files written for a different vocabulary.
  static std::unique_ptr<GruContextEncoder> load(const std::string& path,
                                                 const corpus::Vocabulary& vocab);

  // Builds the encoder parameters into `store` under the names this class
  // uses, so a training graph can share them.
  static neural::BiGruEncoder create_params(neural::ParamStore& store,
                                            const CarmConfig& config,
                                            size_t vocab_size, Rng& rng);

 private:
  CarmConfig config_;
  corpus::Vocabulary vocab_;
  neural::ParamStore params_;
  neural::BiGruEncoder encoder_;
};

// Vectors computed elsewhere, one JSON object per line:
// {"dialogue_id": ..., "turn_id": ..., "vector": [...]}.
class PrecomputedEncoder : public ContextEncoder {
 public:
  static std::unique_ptr<PrecomputedEncoder> load(const std::string& path);

  size_t width() const override { return width_; }
  // Throws MissingArtifact for keys absent from the file.
  ContextVector encode(const ContextInput& input) const override;
  std::string fingerprint() const override { return fingerprint_; }
  size_t size() const { return vectors_.size(); }

 private:
  size_t width_ = 0;
  std::string fingerprint_;
  std::map<corpus::SampleKey, ContextVector> vectors_;
};

}  // namespace retmem::carm

#endif  // RETMEM_CARM_CONTEXT_H_
