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

#ifndef RETMEM_CARM_CANDIDATES_H_
#define RETMEM_CARM_CANDIDATES_H_

#include <string>
#include <vector>

#include "corpus/types.h"
#include "json.hpp"

namespace retmem::carm {

enum class Provenance { kRetrieved, kRandom, kNullPad };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

// Exactly k memory slots once post-processed; null-pad slots carry an empty
// action.
struct CandidateSet {
  std::vector<corpus::SystemAction> actions;
  std::vector<Provenance> provenance;
  // Retrieval distance per slot; 0 for random and null-pad slots.
  std::vector<double> distances;

  size_t size() const { return actions.size(); }
  size_t count(Provenance p) const;

  nlohmann::json to_json() const;
  static CandidateSet from_json(const nlohmann::json& j);
};

}  // namespace retmem::carm

#endif  // RETMEM_CARM_CANDIDATES_H_
