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

#ifndef RETMEM_CORPUS_SYNTHETIC_H_
#define RETMEM_CORPUS_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "corpus/db.h"
#include "corpus/ontology.h"
#include "corpus/types.h"
#include "json.hpp"

namespace retmem::corpus {

// Shipped mini-world: restaurant, hotel and attraction (5-6 slots each)
// plus the slot-less "general" domain. The entity table is fixed; dialogue
// generation is seeded separately.
const EntityTable& synthetic_db();
const Ontology& synthetic_ontology();

struct SyntheticSpec {
  int num_dialogues = 20;
  std::vector<std::string> domains = {"attraction", "hotel", "restaurant"};
  // Probability that a dialogue covers two domains (when available).
  double multi_domain_rate = 0.3;
  // Probability of an initial request that matches nothing.
  double nooffer_rate = 0.2;
  std::string id_prefix = "syn";

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

// Deterministic given (spec, seed). Throws InvalidArgument for a spec with no
// dialogues or no domains, or a domain outside the mini-world.
std::vector<Dialogue> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                uint64_t seed);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_SYNTHETIC_H_
