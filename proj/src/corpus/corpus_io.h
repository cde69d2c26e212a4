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

#ifndef RETMEM_CORPUS_CORPUS_IO_H_
#define RETMEM_CORPUS_CORPUS_IO_H_

#include <string>
#include <vector>

#include "corpus/ontology.h"
#include "corpus/types.h"
#include "json.hpp"

namespace retmem::corpus {

// Validates structure and ontology membership and sorts by dialogue_id.
// ParseError names the offending dialogue/turn; ValidationError is raised
// for unknown domains, slots or functions.
std::vector<Dialogue> load_corpus(const std::string& path,
                                  const Ontology& ontology);
std::vector<Dialogue> corpus_from_json(const nlohmann::json& j,
                                       const Ontology& ontology);

nlohmann::json corpus_to_json(const std::vector<Dialogue>& corpus);
// Canonical form: sorted keys, two-space indent, trailing newline.
std::string corpus_to_string(const std::vector<Dialogue>& corpus);
void save_corpus(const std::vector<Dialogue>& corpus, const std::string& path);

void validate_dialogue(const Dialogue& d, const Ontology& ontology);

nlohmann::json action_to_json(const SystemAction& a);
SystemAction action_from_json(const nlohmann::json& j);
nlohmann::json belief_to_json(const BeliefState& b);
BeliefState belief_from_json(const nlohmann::json& j);

size_t count_turns(const std::vector<Dialogue>& corpus);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_CORPUS_IO_H_
