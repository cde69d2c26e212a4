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

#ifndef RETMEM_DECODING_GENERATE_H_
#define RETMEM_DECODING_GENERATE_H_

#include <vector>

#include "carm/candidates.h"
#include "carm/context.h"
#include "carm/index.h"
#include "corpus/db.h"
#include "corpus/ontology.h"
#include "corpus/types.h"
#include "corpus/vocab.h"
#include "json.hpp"
#include "mamd/model.h"

namespace retmem {
class Rng;
}

namespace retmem::decoding {

enum class BeliefMode { kGenerated, kOracle };
enum class MemorySource { kRetrieved, kRandom };

const char* belief_mode_name(BeliefMode m);
BeliefMode belief_mode_from_name(const std::string& name);
const char* memory_source_name(MemorySource s);
MemorySource memory_source_from_name(const std::string& name);

struct Retriever {
  const carm::ContextEncoder* encoder = nullptr;
  const carm::RetrievalIndex* index = nullptr;
  size_t n_raw = 50;
  // Drop the query's own key (needed when generating over the indexed
  // corpus).
  bool exclude_self = false;
};

struct GenerateOptions {
  BeliefMode belief_mode = BeliefMode::kOracle;
  MemorySource memory_source = MemorySource::kRetrieved;
  const Retriever* retriever = nullptr;
  // Random memory draws from here.
  const std::vector<corpus::SystemAction>* action_pool = nullptr;
  Rng* rng = nullptr;
};

struct MemoryTraceStep {
  size_t step = 0;
  std::string token;
  std::vector<double> alphas;
};

struct TurnOutput {
  corpus::SampleKey key;
  corpus::Tokens belief_tokens;
  corpus::Tokens action_tokens;
  corpus::Tokens response_tokens;
  corpus::BeliefState belief;
  corpus::SystemAction action;
  corpus::DbResultClass db_class;
  carm::CandidateSet candidates;
  std::vector<MemoryTraceStep> memory_attention;
  double response_logprob = 0.0;

  nlohmann::json to_json() const;
};

struct GenerationContext {
  const mamd::MamdModel* model = nullptr;
  const corpus::Vocabulary* vocab = nullptr;
  const corpus::Ontology* ontology = nullptr;
  const corpus::EntityTable* db = nullptr;
};

// Belief (greedy) -> db lookup and memory -> action (greedy) -> response
// (beam). `prev_belief` is what the model sees as B_{t-1}.
TurnOutput generate_turn(const GenerationContext& ctx,
                         const corpus::Dialogue& dialogue, size_t turn_index,
                         const corpus::BeliefState& prev_belief,
                         const GenerateOptions& options);

// Runs every turn in order. In generated-belief mode each turn's B_{t-1} is
// the previous generated belief.
std::vector<TurnOutput> generate_dialogue(const GenerationContext& ctx,
                                          const corpus::Dialogue& dialogue,
                                          const GenerateOptions& options);

// Domain queried for a turn: its first non-general active domain, if any.
std::string query_domain(const corpus::Turn& turn);

}  // namespace retmem::decoding

#endif  // RETMEM_DECODING_GENERATE_H_
