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

#ifndef RETMEM_CORPUS_DELEX_H_
#define RETMEM_CORPUS_DELEX_H_

#include <string>

#include "corpus/ontology.h"
#include "corpus/types.h"

namespace retmem::corpus {

// Placeholders are domain-agnostic: hotel and restaurant names both become
// "[value_name]".
std::string placeholder(const std::string& slot);

// Replaces every ontology or belief value found in `response` with its
// placeholder, longest match first. Belief values win when a surface string
// belongs to several slots.
Tokens delexicalize(const Tokens& response, const Ontology& ontology,
                    const BeliefState& belief);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_DELEX_H_
