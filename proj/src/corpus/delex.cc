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

#include "corpus/delex.h"

#include <algorithm>
#include <map>

namespace retmem::corpus {

std::string placeholder(const std::string& slot) {
  return "[value_" + slot + "]";
}

Tokens delexicalize(const Tokens& response, const Ontology& ontology,
                    const BeliefState& belief) {
  // value tokens -> slot name
  std::map<Tokens, std::string> lexicon;
  for (const auto& domain : ontology.domains()) {
    for (const auto& slot : ontology.slots(domain)) {
      for (const auto& value : ontology.values(domain, slot)) {
        Tokens key = tokenize(value);
        if (!key.empty()) lexicon.emplace(std::move(key), slot);
      }
    }
  }
  for (const auto& [domain, slots] : belief.entries) {
    for (const auto& [slot, value] : slots) {
      Tokens key = tokenize(value);
      if (!key.empty()) lexicon[std::move(key)] = slot;
    }
  }
  size_t max_len = 0;
  for (const auto& [key, slot] : lexicon) max_len = std::max(max_len, key.size());

  Tokens out;
  size_t i = 0;
  while (i < response.size()) {
    bool replaced = false;
    for (size_t len = std::min(max_len, response.size() - i); len > 0; --len) {
      Tokens span(response.begin() + i, response.begin() + i + len);
      auto it = lexicon.find(span);
      if (it != lexicon.end()) {
        out.push_back(placeholder(it->second));
        i += len;
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(response[i++]);
  }
  return out;
}

}  // namespace retmem::corpus
