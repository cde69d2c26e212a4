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

#ifndef RETMEM_TESTS_SUPPORT_FIXTURES_H_
#define RETMEM_TESTS_SUPPORT_FIXTURES_H_

#include <string>
#include <vector>

#include "carm/candidates.h"
#include "carm/index.h"
#include "corpus/synthetic.h"
#include "corpus/vocab.h"
#include "mamd/model.h"

namespace retmem::testing {

inline std::vector<corpus::Dialogue> small_corpus(int dialogues = 4, uint64_t seed = 5) {
  corpus::SyntheticSpec spec;
  spec.num_dialogues = dialogues;
  return corpus::generate_synthetic_corpus(spec, seed);
}

inline corpus::Vocabulary vocab_for(const std::vector<corpus::Dialogue>& c) {
  return corpus::build_vocab(c, corpus::synthetic_ontology(), 1);
}

inline mamd::MamdConfig tiny_config(size_t k = 3) {
  mamd::MamdConfig cfg;
  cfg.embed_dim = 6;
  cfg.hidden = 8;
  cfg.db_dim = 3;
  cfg.k = k;
  cfg.seed = 11;
  return cfg;
}

// k candidate slots built from the corpus actions, the last one null-padded.
inline carm::CandidateSet some_candidates(const std::vector<corpus::Dialogue>& c,
                                          size_t k) {
  carm::CandidateSet set;
  size_t i = 0;
  for (const auto& d : c) {
    for (const auto& t : d.turns) {
      if (set.size() + 1 >= k) break;
      if (t.action.empty()) continue;
      set.actions.push_back(t.action);
      set.provenance.push_back(carm::Provenance::kRetrieved);
      set.distances.push_back(static_cast<double>(++i));
    }
  }
  while (set.size() < k) {
    set.actions.emplace_back();
    set.provenance.push_back(carm::Provenance::kNullPad);
    set.distances.push_back(0.0);
  }
  return set;
}

// The same candidate set for every turn of the corpus.
inline carm::CandidateMap fixed_candidates(const std::vector<corpus::Dialogue>& c, size_t k) {
  carm::CandidateMap map;
  const carm::CandidateSet set = some_candidates(c, k);
  for (const auto& d : c) {
    for (const auto& t : d.turns) map[{d.dialogue_id, t.turn_id}] = set;
  }
  return map;
}

}  // namespace retmem::testing

#endif  // RETMEM_TESTS_SUPPORT_FIXTURES_H_
