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

#include "decoding/generate.h"

#include "common/error.h"
#include "common/rng.h"
#include "corpus/linearize.h"
#include "decoding/search.h"

namespace retmem::decoding {

using corpus::Vocabulary;
using neural::NodeId;
using neural::Tape;

const char* belief_mode_name(BeliefMode m) {
  return m == BeliefMode::kOracle ? "oracle" : "generated";
}

BeliefMode belief_mode_from_name(const std::string& name) {
  if (name == "oracle") return BeliefMode::kOracle;
  if (name == "generated") return BeliefMode::kGenerated;
  RETMEM_THROW(InvalidArgument, "belief mode must be oracle or generated, got '"
                                    << name << "'");
}

const char* memory_source_name(MemorySource s) {
  return s == MemorySource::kRetrieved ? "retrieved" : "random";
}

MemorySource memory_source_from_name(const std::string& name) {
  if (name == "retrieved") return MemorySource::kRetrieved;
  if (name == "random") return MemorySource::kRandom;
  RETMEM_THROW(InvalidArgument, "memory source must be retrieved or random, got '"
                                    << name << "'");
}

nlohmann::json TurnOutput::to_json() const {
  nlohmann::json trace = nlohmann::json::array();
  for (const MemoryTraceStep& s : memory_attention) {
    trace.push_back({{"step", s.step}, {"token", s.token}, {"alphas", s.alphas}});
  }
  return {{"dialogue_id", key.dialogue_id},
          {"turn_id", key.turn_id},
          {"belief", corpus::join(belief_tokens)},
          {"action", corpus::join(action_tokens)},
          {"response", corpus::join(response_tokens)},
          {"db_class", db_class.bucket()},
          {"candidates", candidates.to_json()},
          {"memory_attention", trace}};
}

std::string query_domain(const corpus::Turn& turn) {
  for (const std::string& d : turn.active_domains) {
    if (d != "general") return d;
  }
  return "";
}

namespace {

corpus::Tokens ids_to_tokens(const Vocabulary& vocab, const std::vector<int>& ids) {
  return vocab.decode(ids);
}

}  // namespace

TurnOutput generate_turn(const GenerationContext& ctx,
                         const corpus::Dialogue& dialogue, size_t turn_index,
                         const corpus::BeliefState& prev_belief,
                         const GenerateOptions& options) {
  if (!ctx.model || !ctx.vocab || !ctx.ontology || !ctx.db) {
    RETMEM_THROW(InvalidArgument, "generation context is incomplete");
  }
  const mamd::MamdModel& model = *ctx.model;
  const mamd::MamdConfig& cfg = model.config();
  const Vocabulary& vocab = *ctx.vocab;
  const corpus::Turn& turn = dialogue.turns.at(turn_index);

  TurnOutput out;
  out.key = {dialogue.dialogue_id, turn.turn_id};

  corpus::Turn view = turn;
  view.prev_belief = prev_belief;
  mamd::TurnInputs in = mamd::make_turn_inputs(view, vocab);

  Tape tape(static_cast<const neural::ParamStore&>(model.params()));
  mamd::TurnEncoding enc = model.encode_inputs(tape, in);
  const NodeId h0 = model.initial_state(tape);

  // Belief.
  if (options.belief_mode == BeliefMode::kOracle) {
    model.force_belief(tape, enc, in.belief);
    out.belief = turn.belief;
    out.belief_tokens = corpus::linearize_belief(turn.belief);
  } else {
    neural::CopySource copy = model.belief_copy_source(tape, enc);
    enc.belief.states = {h0};
    enc.belief.tokens = {Vocabulary::kPad};
    StepFn<NodeId> step = [&](const NodeId& h, int prev) {
      neural::StepOutput s = model.belief_step(tape, h, prev, enc, copy);
      auto p = tape.value(s.dist);
      return Step<NodeId>{{p.begin(), p.end()}, s.hidden};
    };
    Hypothesis hyp = greedy_decode<NodeId>(
        step, h0, cfg.max_belief_len, [&](int token, const NodeId& h) {
          enc.belief.states.push_back(h);
          enc.belief.tokens.push_back(token);
        });
    out.belief_tokens = ids_to_tokens(vocab, hyp.tokens);
    out.belief = corpus::delinearize_belief(out.belief_tokens, *ctx.ontology).belief;
  }

  // Database and memory.
  const std::string domain = query_domain(turn);
  out.db_class = domain.empty() ? corpus::DbResultClass::no_query()
                                : corpus::db_lookup(out.belief, domain, *ctx.db);
  if (options.memory_source == MemorySource::kRandom) {
    if (!options.action_pool || !options.rng) {
      RETMEM_THROW(InvalidArgument, "random memory needs an action pool and rng");
    }
    out.candidates = mamd::random_memory(*options.action_pool, cfg.k, *options.rng);
  } else {
    const Retriever* r = options.retriever;
    if (!r || !r->encoder || !r->index) {
      RETMEM_THROW(InvalidArgument, "retrieved memory needs a retriever");
    }
    carm::ContextInput query = carm::make_context_input(dialogue, turn_index, &out.belief);
    std::optional<corpus::SampleKey> exclude;
    if (r->exclude_self) exclude = query.key;
    out.candidates =
        carm::postprocess(carm::retrieve(*r->index, r->encoder->encode(query),
                                         r->n_raw, exclude),
                          out.belief, out.db_class, cfg.k);
  }
  mamd::MemoryBank bank =
      model.encode_memory(tape, mamd::make_memory_input(out.candidates, vocab));

  // Action.
  {
    neural::CopySource copy = model.action_copy_source(tape, enc);
    enc.action.states = {h0};
    enc.action.tokens = {Vocabulary::kPad};
    std::vector<std::vector<double>> alphas;
    StepFn<NodeId> step = [&](const NodeId& h, int prev) {
      mamd::ActionStepOutput s =
          model.action_step(tape, h, prev, out.db_class.bucket(), enc, bank, copy);
      if (s.memory_attention >= 0) {
        auto a = tape.attention(s.memory_attention);
        alphas.emplace_back(a.begin(), a.end());
      }
      auto p = tape.value(s.step.dist);
      return Step<NodeId>{{p.begin(), p.end()}, s.step.hidden};
    };
    Hypothesis hyp = greedy_decode<NodeId>(
        step, h0, cfg.max_action_len, [&](int token, const NodeId& h) {
          enc.action.states.push_back(h);
          enc.action.tokens.push_back(token);
        });
    out.action_tokens = ids_to_tokens(vocab, hyp.tokens);
    out.action = corpus::delinearize_action(out.action_tokens).action;
    for (size_t i = 0; i < alphas.size(); ++i) {
      const bool eos = i >= hyp.tokens.size();
      out.memory_attention.push_back(
          {i, eos ? std::string("<eos>") : out.action_tokens[i], alphas[i]});
    }
  }

  // Response.
  {
    neural::CopySource copy = model.response_copy_source(tape, enc);
    StepFn<NodeId> step = [&](const NodeId& h, int prev) {
      neural::StepOutput s = model.response_step(tape, h, prev, enc, copy);
      auto p = tape.value(s.dist);
      return Step<NodeId>{{p.begin(), p.end()}, s.hidden};
    };
    Hypothesis hyp = beam_search<NodeId>(step, h0, cfg.beam_size, cfg.max_response_len);
    out.response_tokens = ids_to_tokens(vocab, hyp.tokens);
    out.response_logprob = hyp.logprob;
  }
  return out;
}

std::vector<TurnOutput> generate_dialogue(const GenerationContext& ctx,
                                          const corpus::Dialogue& dialogue,
                                          const GenerateOptions& options) {
  std::vector<TurnOutput> out;
  corpus::BeliefState prev;
  for (size_t t = 0; t < dialogue.turns.size(); ++t) {
    const corpus::BeliefState& prev_belief =
        options.belief_mode == BeliefMode::kOracle ? dialogue.turns[t].prev_belief : prev;
    out.push_back(generate_turn(ctx, dialogue, t, prev_belief, options));
    prev = out.back().belief;
  }
  return out;
}

}  // namespace retmem::decoding
