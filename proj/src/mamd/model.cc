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

#include "mamd/model.h"

#include "common/error.h"
#include "common/rng.h"
#include "corpus/linearize.h"

namespace retmem::mamd {

using corpus::Vocabulary;

void MamdConfig::validate() const {
  if (sampling_p < 0.0 || sampling_p > 1.0) {
    RETMEM_THROW(InvalidArgument, "sampling probability " << sampling_p
                                                          << " outside [0, 1]");
  }
  if (k < 1) RETMEM_THROW(InvalidArgument, "candidate count k must be >= 1");
  if (embed_dim < 1 || hidden < 1 || db_dim < 1) {
    RETMEM_THROW(InvalidArgument, "model widths must be positive");
  }
  if (beam_size < 1) RETMEM_THROW(InvalidArgument, "beam size must be >= 1");
  if (max_belief_len < 1 || max_action_len < 1 || max_response_len < 1) {
    RETMEM_THROW(InvalidArgument, "decode lengths must be positive");
  }
}

nlohmann::json MamdConfig::to_json() const {
  return {{"embed_dim", embed_dim},
          {"hidden", hidden},
          {"k", k},
          {"sampling_p", sampling_p},
          {"db_dim", db_dim},
          {"max_belief_len", max_belief_len},
          {"max_action_len", max_action_len},
          {"max_response_len", max_response_len},
          {"beam_size", beam_size},
          {"seed", seed},
          {"use_memory", use_memory},
          {"copy_mode", copy_mode == neural::CopyMode::kJoint ? "joint" : "separate"}};
}

MamdConfig MamdConfig::from_json(const nlohmann::json& j) {
  MamdConfig c;
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.k = j.value("k", c.k);
  c.sampling_p = j.value("sampling_p", c.sampling_p);
  c.db_dim = j.value("db_dim", c.db_dim);
  c.max_belief_len = j.value("max_belief_len", c.max_belief_len);
  c.max_action_len = j.value("max_action_len", c.max_action_len);
  c.max_response_len = j.value("max_response_len", c.max_response_len);
  c.beam_size = j.value("beam_size", c.beam_size);
  c.seed = j.value("seed", c.seed);
  c.use_memory = j.value("use_memory", c.use_memory);
  std::string mode = j.value("copy_mode", std::string("joint"));
  if (mode == "joint") {
    c.copy_mode = neural::CopyMode::kJoint;
  } else if (mode == "separate") {
    c.copy_mode = neural::CopyMode::kSeparate;
  } else {
    RETMEM_THROW(InvalidArgument, "copy_mode must be joint or separate");
  }
  c.validate();
  return c;
}

TurnInputs make_turn_inputs(const corpus::Turn& turn, const Vocabulary& vocab) {
  TurnInputs in;
  in.user = vocab.encode(turn.user);
  in.prev_response = vocab.encode(turn.prev_response);
  in.prev_belief = vocab.encode(corpus::linearize_belief(turn.prev_belief));
  in.belief = vocab.encode(corpus::linearize_belief(turn.belief));
  in.action = vocab.encode(corpus::linearize_action(turn.action));
  in.response = vocab.encode(turn.response);
  in.db_class = turn.db_class.bucket();
  return in;
}

MemoryInput make_memory_input(const carm::CandidateSet& set,
                              const Vocabulary& vocab) {
  MemoryInput m;
  for (size_t i = 0; i < set.size(); ++i) {
    bool null = set.provenance[i] == carm::Provenance::kNullPad;
    m.null_slot.push_back(null);
    m.candidates.push_back(
        null ? std::vector<int>{}
             : vocab.encode(corpus::linearize_action(set.actions[i])));
  }
  return m;
}

MamdModel::MamdModel(const MamdConfig& config, size_t vocab_size)
    : config_(config), vocab_size_(vocab_size) {
  config_.validate();
  Rng rng(config_.seed);
  const size_t E = config_.embed_dim;
  const size_t H = config_.hidden;
  embedding_ = params_.add_matrix("embedding", vocab_size, E, rng);
  db_embedding_ = params_.add_matrix("db_embedding",
                                     corpus::DbResultClass::kNumBuckets,
                                     config_.db_dim, rng);
  encoder_ = neural::BiGruEncoder::create(params_, "encoder", embedding_, E, H, rng);
  memory_encoder_ =
      neural::BiGruEncoder::create(params_, "memory_encoder", embedding_, E, H, rng);
  null_memory_ = params_.add_matrix("memory.null", H, 1, rng);
  memory_attn_ = params_.add_matrix("memory.attn", 1, 2 * H, rng);

  belief_attn_ = neural::Attn3::create(params_, "belief_dec.attn", H, H, rng);
  action_attn_ = neural::Attn3::create(params_, "action_dec.attn", H, H, rng);
  response_attn_ = neural::Attn3::create(params_, "response_dec.attn", H, H, rng);
  belief_dec_ = neural::CopyDecoder::create(params_, "belief_dec", 3 * H + E, H,
                                            vocab_size, H, rng);
  action_dec_ = neural::CopyDecoder::create(
      params_, "action_dec", 3 * H + E + config_.db_dim + H, H, vocab_size, H, rng);
  response_dec_ = neural::CopyDecoder::create(params_, "response_dec", 3 * H + E,
                                              H, vocab_size, H, rng);
}

TurnEncoding MamdModel::encode_inputs(Tape& tape, const TurnInputs& in) const {
  TurnEncoding enc;
  enc.user = neural::bigru_encode(tape, encoder_, in.user).seq;
  enc.prev_response = neural::bigru_encode(tape, encoder_, in.prev_response).seq;
  enc.prev_belief = neural::bigru_encode(tape, encoder_, in.prev_belief).seq;
  return enc;
}

MemoryBank MamdModel::encode_memory(Tape& tape, const MemoryInput& mem) const {
  MemoryBank bank;
  for (size_t i = 0; i < mem.candidates.size(); ++i) {
    const bool null = i < mem.null_slot.size() && mem.null_slot[i];
    NodeId v = null ? tape.param(null_memory_)
                    : neural::bigru_encode(tape, memory_encoder_, mem.candidates[i])
                          .summary;
    bank.vectors.states.push_back(v);
    bank.vectors.tokens.push_back(Vocabulary::kPad);
    bank.null_mask.push_back(null);
  }
  return bank;
}

CopySource MamdModel::belief_copy_source(Tape& tape,
                                         const TurnEncoding& enc) const {
  return neural::prepare_copy_source(tape, belief_dec_, enc.prev_belief);
}

CopySource MamdModel::action_copy_source(Tape& tape,
                                         const TurnEncoding& enc) const {
  return neural::prepare_copy_source(tape, action_dec_, enc.belief);
}

CopySource MamdModel::response_copy_source(Tape& tape,
                                           const TurnEncoding& enc) const {
  return neural::prepare_copy_source(tape, response_dec_, enc.belief);
}

NodeId MamdModel::initial_state(Tape& tape) const {
  return tape.zeros(config_.hidden);
}

StepOutput MamdModel::belief_step(Tape& tape, NodeId h_prev, int prev_token,
                                  const TurnEncoding& enc,
                                  const CopySource& copy) const {
  NodeId s = neural::attn3(tape, belief_attn_, h_prev, enc.user,
                           enc.prev_response, enc.prev_belief);
  NodeId parts[] = {s, tape.param_row(embedding_, prev_token)};
  return neural::copy_decoder_step(tape, belief_dec_, tape.concat(parts), h_prev,
                                   copy, config_.copy_mode);
}

NodeId MamdModel::memory_query(Tape& tape, NodeId h_prev,
                               const MemoryBank& bank) const {
  return neural::cat_attn(tape, memory_attn_, h_prev, bank.vectors);
}

ActionStepOutput MamdModel::action_step(Tape& tape, NodeId h_prev,
                                        int prev_token, int db_class,
                                        const TurnEncoding& enc,
                                        const MemoryBank& bank,
                                        const CopySource& copy) const {
  ActionStepOutput out;
  NodeId s = neural::attn3(tape, action_attn_, h_prev, enc.user,
                           enc.prev_response, enc.belief);
  NodeId v;
  if (config_.use_memory && bank.vectors.size() > 0) {
    v = out.memory_attention = memory_query(tape, h_prev, bank);
  } else {
    v = tape.zeros(config_.hidden);
  }
  NodeId parts[] = {s, tape.param_row(embedding_, prev_token),
                    tape.param_row(db_embedding_, db_class), v};
  out.step = neural::copy_decoder_step(tape, action_dec_, tape.concat(parts),
                                       h_prev, copy, config_.copy_mode);
  return out;
}

StepOutput MamdModel::response_step(Tape& tape, NodeId h_prev, int prev_token,
                                    const TurnEncoding& enc,
                                    const CopySource& copy) const {
  NodeId s = neural::attn3(tape, response_attn_, h_prev, enc.user, enc.belief,
                           enc.action);
  NodeId parts[] = {s, tape.param_row(embedding_, prev_token)};
  return neural::copy_decoder_step(tape, response_dec_, tape.concat(parts),
                                   h_prev, copy, config_.copy_mode);
}

namespace {

// Targets are gold tokens followed by <eos>; inputs are <sos> followed by
// gold tokens. The state after <eos> is not recorded.
template <class StepFn>
NodeId force(Tape& tape, NodeId h0, const std::vector<int>& gold,
             HiddenSeq* states, StepFn&& step) {
  std::vector<NodeId> losses;
  losses.reserve(gold.size() + 1);
  NodeId h = h0;
  if (states) {
    states->states = {h0};
    states->tokens = {Vocabulary::kPad};
  }
  int prev = Vocabulary::kSos;
  for (size_t t = 0; t <= gold.size(); ++t) {
    const int target = t < gold.size() ? gold[t] : Vocabulary::kEos;
    StepOutput out = step(h, prev);
    losses.push_back(tape.nll(out.dist, target));
    h = out.hidden;
    if (states && t < gold.size()) {
      states->states.push_back(h);
      states->tokens.push_back(target);
    }
    prev = target;
  }
  return tape.mean(losses);
}

}  // namespace

NodeId MamdModel::force_belief(Tape& tape, TurnEncoding& enc,
                               const std::vector<int>& gold) const {
  CopySource copy = belief_copy_source(tape, enc);
  HiddenSeq states;
  NodeId loss = force(tape, initial_state(tape), gold, &states,
                      [&](NodeId h, int prev) {
                        return belief_step(tape, h, prev, enc, copy);
                      });
  enc.belief = std::move(states);
  return loss;
}

NodeId MamdModel::force_action(Tape& tape, TurnEncoding& enc,
                               const MemoryBank& bank, int db_class,
                               const std::vector<int>& gold) const {
  CopySource copy = action_copy_source(tape, enc);
  HiddenSeq states;
  NodeId loss = force(tape, initial_state(tape), gold, &states,
                      [&](NodeId h, int prev) {
                        return action_step(tape, h, prev, db_class, enc, bank, copy)
                            .step;
                      });
  enc.action = std::move(states);
  return loss;
}

NodeId MamdModel::force_response(Tape& tape, const TurnEncoding& enc,
                                 const std::vector<int>& gold) const {
  CopySource copy = response_copy_source(tape, enc);
  return force(tape, initial_state(tape), gold, nullptr,
               [&](NodeId h, int prev) {
                 return response_step(tape, h, prev, enc, copy);
               });
}

LossNodes MamdModel::joint_loss(Tape& tape, const TurnInputs& in,
                                const MemoryInput& mem) const {
  LossNodes out;
  TurnEncoding enc = encode_inputs(tape, in);
  MemoryBank bank = encode_memory(tape, mem);
  out.belief = force_belief(tape, enc, in.belief);
  out.action = force_action(tape, enc, bank, in.db_class, in.action);
  out.response = force_response(tape, enc, in.response);
  NodeId parts[] = {out.belief, out.action, out.response};
  out.total = tape.sum(parts);
  if (!std::isfinite(tape.scalar(out.total))) {
    RETMEM_THROW(NumericError, "joint loss is not finite");
  }
  return out;
}

carm::CandidateSet random_memory(const std::vector<corpus::SystemAction>& pool,
                                 size_t k, Rng& rng) {
  if (pool.empty()) RETMEM_THROW(InvalidArgument, "empty action pool");
  carm::CandidateSet out;
  for (size_t i = 0; i < k; ++i) {
    out.actions.push_back(pool[rng.below(pool.size())]);
    out.provenance.push_back(carm::Provenance::kRandom);
    out.distances.push_back(0.0);
  }
  return out;
}

carm::CandidateSet sample_memory(const carm::CandidateSet& retrieved,
                                 const std::vector<corpus::SystemAction>& pool,
                                 double p, size_t k, Rng& rng) {
  if (p < 0.0 || p > 1.0) {
    RETMEM_THROW(InvalidArgument, "sampling probability outside [0, 1]");
  }
  if (rng.bernoulli(p)) return random_memory(pool, k, rng);
  return retrieved;
}

}  // namespace retmem::mamd
