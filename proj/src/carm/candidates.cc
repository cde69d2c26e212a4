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

#include "carm/candidates.h"

#include "common/error.h"
#include "corpus/corpus_io.h"
#include "corpus/linearize.h"

namespace retmem::carm {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kRetrieved:
      return "retrieved";
    case Provenance::kRandom:
      return "random";
    case Provenance::kNullPad:
      return "null-pad";
  }
  return "?";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "retrieved") return Provenance::kRetrieved;
  if (name == "random") return Provenance::kRandom;
  if (name == "null-pad") return Provenance::kNullPad;
  RETMEM_THROW(ParseError, "unknown provenance '" << name << "'");
}

size_t CandidateSet::count(Provenance p) const {
  size_t n = 0;
  for (auto q : provenance) n += q == p;
  return n;
}

nlohmann::json CandidateSet::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (size_t i = 0; i < actions.size(); ++i) {
    out.push_back({{"action", corpus::join(corpus::linearize_action(actions[i]))},
                   {"distance", i < distances.size() ? distances[i] : 0.0},
                   {"provenance", provenance_name(provenance[i])}});
  }
  return out;
}

CandidateSet CandidateSet::from_json(const nlohmann::json& j) {
  CandidateSet c;
  try {
    for (const auto& e : j) {
      c.actions.push_back(corpus::delinearize_action(
                              corpus::tokenize(e.at("action").get<std::string>()))
                              .action);
      c.distances.push_back(e.value("distance", 0.0));
      c.provenance.push_back(provenance_from_name(e.at("provenance").get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, "candidate set: " << e.what());
  }
  return c;
}

}  // namespace retmem::carm
