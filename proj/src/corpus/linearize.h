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

#ifndef RETMEM_CORPUS_LINEARIZE_H_
#define RETMEM_CORPUS_LINEARIZE_H_

#include <string>
#include <vector>

#include "corpus/ontology.h"
#include "corpus/types.h"

namespace retmem::corpus {

// "restaurant [food] chinese [pricerange] cheap hotel [area] north"
Tokens linearize_belief(const BeliefState& belief);

// "restaurant [inform] price phone general [reqmore]"
Tokens linearize_action(const SystemAction& action);

struct ParsedAction {
  SystemAction action;
  // One message per dropped or merged token run; empty for clean input.
  std::vector<std::string> diagnostics;
};

// Total over arbitrary token sequences. Accepts both "domain [fn]" and the
// bracketed "[domain] [fn]" form.
ParsedAction delinearize_action(const Tokens& tokens);

struct ParsedBelief {
  BeliefState belief;
  std::vector<std::string> diagnostics;
};

// Needs the ontology because value tokens and domain names share a
// namespace. Unknown domains/slots are dropped into diagnostics.
ParsedBelief delinearize_belief(const Tokens& tokens, const Ontology& ontology);

bool is_bracketed(const std::string& token);
std::string strip_brackets(const std::string& token);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_LINEARIZE_H_
