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

#ifndef RETMEM_MAMD_MODEL_H_
#define RETMEM_MAMD_MODEL_H_

#include <cstdint>
#include <vector>

#include "carm/candidates.h"
#include "corpus/types.h"
#include "corpus/vocab.h"
#include "json.hpp"
#include "neural/layers.h"
#include "neural/param_store.h"
#include "neural/tape.h"

namespace retmem {
class Rng;
}

namespace retmem::mamd {

using neural::CopySource;
using neural::HiddenSeq;
using neural::NodeId;
using neural::StepOutput;
using neural::Tape;

struct MamdConfig {
  size_t embed_dim = 50;
  size_t hidden = 100;
  size_t k = 9;
  double sampling_p = 0.8;
  size_t db_dim = 6;
  size_t max_belief_len = 60;
  size_t max_action_len = 30;
  size_t max_response_len = 80;
  size_t beam_size = 5;
  uint64_t seed = 777;
  // Off: the memory summary is replaced by zeros (no-memory ablation).
  bool use_memory = true;
  neural::CopyMode copy_mode = neural::CopyMode::kJoint;

  void validate() const;
  nlohmann::json to_json() const;
  static MamdConfig from_json(const nlohmann::json& j);
};

// Vocabulary-mapped token ids for one turn. Targets exclude <sos>/<eos>.
struct TurnInputs {
  std::vector<int> user;
  std::vector<int> prev_response;
  std::vector<int> prev_belief;
  std::vector<int> belief;
  std::vector<int> action;
  std::vector<int> response;
  int db_class = corpus::DbResultClass::kNoQuery;
};

TurnInputs make_turn_inputs(const corpus::Turn& turn,
                            const corpus::Vocabulary& vocab);

struct MemoryInput {
  std::vector<std::vector<int>> candidates;
  std::vector<bool> null_slot;
};

MemoryInput make_memory_input(const carm::CandidateSet& set,
                              const corpus::Vocabulary& vocab);

struct MemoryBank {
  HiddenSeq vectors;  // tokens unused
  std::vector<bool> null_mask;
};

struct TurnEncoding {
  HiddenSeq user;
  HiddenSeq prev_response;
  HiddenSeq prev_belief;
  // Filled as the decoders run: {h_0, ..., h_p} paired with the token each
  // state emitted (h_0 is paired with <pad> so it is never copied).
  HiddenSeq belief;
  HiddenSeq action;
};

struct LossNodes {
  NodeId total = -1;
  NodeId belief = -1;
  NodeId action = -1;
  NodeId response = -1;
};

struct ActionStepOutput {
  StepOutput step;
  // cat_attn node over the memory bank; -1 when memory is off.
  NodeId memory_attention = -1;
};

class MamdModel {
 public:
  MamdModel(const MamdConfig& config, size_t vocab_size);

  const MamdConfig& config() const { return config_; }
  size_t vocab_size() const { return vocab_size_; }
  neural::ParamStore& params() { return params_; }
  const neural::ParamStore& params() const { return params_; }

  TurnEncoding encode_inputs(Tape& tape, const TurnInputs& in) const;
  MemoryBank encode_memory(Tape& tape, const MemoryInput& mem) const;

  CopySource belief_copy_source(Tape& tape, const TurnEncoding& enc) const;
  CopySource action_copy_source(Tape& tape, const TurnEncoding& enc) const;
  CopySource response_copy_source(Tape& tape, const TurnEncoding& enc) const;

  NodeId initial_state(Tape& tape) const;

  StepOutput belief_step(Tape& tape, NodeId h_prev, int prev_token,
                         const TurnEncoding& enc,
                         const CopySource& copy) const;
  // Returns the memory summary v and exposes the attention node.
  NodeId memory_query(Tape& tape, NodeId h_prev, const MemoryBank& bank) const;
  ActionStepOutput action_step(Tape& tape, NodeId h_prev, int prev_token,
                               int db_class, const TurnEncoding& enc,
                               const MemoryBank& bank,
                               const CopySource& copy) const;
  StepOutput response_step(Tape& tape, NodeId h_prev, int prev_token,
                           const TurnEncoding& enc,
                           const CopySource& copy) const;

  // Teacher-forced runs: every decoder consumes the gold previous token.
  // Each returns the per-step NLL mean and records the hidden states into
  // `enc`.
  NodeId force_belief(Tape& tape, TurnEncoding& enc,
                      const std::vector<int>& gold) const;
  NodeId force_action(Tape& tape, TurnEncoding& enc, const MemoryBank& bank,
                      int db_class, const std::vector<int>& gold) const;
  NodeId force_response(Tape& tape, const TurnEncoding& enc,
                        const std::vector<int>& gold) const;

  LossNodes joint_loss(Tape& tape, const TurnInputs& in,
                       const MemoryInput& mem) const;

 private:
  MamdConfig config_;
  size_t vocab_size_;
  neural::ParamStore params_;

  neural::ParamId embedding_;
  neural::ParamId db_embedding_;
  neural::ParamId null_memory_;
  neural::ParamId memory_attn_;
  neural::BiGruEncoder encoder_;
  neural::BiGruEncoder memory_encoder_;
  neural::Attn3 belief_attn_;
  neural::Attn3 action_attn_;
  neural::Attn3 response_attn_;
  neural::CopyDecoder belief_dec_;
  neural::CopyDecoder action_dec_;
  neural::CopyDecoder response_dec_;
};

// With probability p the whole bank becomes k actions drawn uniformly (with
// replacement) from `pool`; otherwise `retrieved` passes through unchanged.
carm::CandidateSet sample_memory(const carm::CandidateSet& retrieved,
                                 const std::vector<corpus::SystemAction>& pool,
                                 double p, size_t k, Rng& rng);

// k uniformly drawn pool actions, all tagged random.
carm::CandidateSet random_memory(const std::vector<corpus::SystemAction>& pool,
                                 size_t k, Rng& rng);

}  // namespace retmem::mamd

#endif  // RETMEM_MAMD_MODEL_H_
