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

#include "corpus/linearize.h"

#include <algorithm>
#include <optional>

namespace retmem::corpus {

bool is_bracketed(const std::string& token) {
  return token.size() >= 3 && token.front() == '[' && token.back() == ']';
}

std::string strip_brackets(const std::string& token) {
  return is_bracketed(token) ? token.substr(1, token.size() - 2) : token;
}

Tokens linearize_belief(const BeliefState& belief) {
  Tokens out;
  for (const auto& [domain, slots] : belief.entries) {
    if (slots.empty()) continue;
    out.push_back(domain);
    for (const auto& [slot, value] : slots) {
      out.push_back("[" + slot + "]");
      for (auto& t : tokenize(value)) out.push_back(std::move(t));
    }
  }
  return out;
}

Tokens linearize_action(const SystemAction& action) {
  Tokens out;
  for (const auto& e : action.entries) {
    out.push_back(e.domain);
    out.push_back("[" + e.function + "]");
    out.insert(out.end(), e.slots.begin(), e.slots.end());
  }
  return out;
}

ParsedAction delinearize_action(const Tokens& tokens) {
  ParsedAction result;
  auto& entries = result.action.entries;
  std::optional<std::string> pending_domain;
  ActionEntry* current = nullptr;

  auto open_entry = [&](const std::string& domain, const std::string& fn) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) {
      return e.domain == domain && e.function == fn;
    });
    if (it != entries.end()) {
      result.diagnostics.push_back("merged repeated act " + domain + " [" +
                                   fn + "]");
      current = &*it;
    } else {
      entries.push_back({domain, fn, {}});
      current = &entries.back();
    }
  };

  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    const bool next_bracketed =
        i + 1 < tokens.size() && is_bracketed(tokens[i + 1]);
    if (is_bracketed(tok)) {
      if (pending_domain) {
        open_entry(*pending_domain, strip_brackets(tok));
        pending_domain.reset();
      } else if (next_bracketed) {
        pending_domain = strip_brackets(tok);
        current = nullptr;
      } else {
        result.diagnostics.push_back("act " + tok + " has no domain");
        current = nullptr;
      }
      continue;
    }
    if (next_bracketed) {
      if (pending_domain) {
        result.diagnostics.push_back("domain '" + *pending_domain +
                                     "' without act");
      }
      pending_domain = tok;
      current = nullptr;
      continue;
    }
    if (pending_domain) {
      result.diagnostics.push_back("domain '" + *pending_domain +
                                   "' without act");
      pending_domain.reset();
    }
    if (current == nullptr) {
      result.diagnostics.push_back("dropped token '" + tok + "'");
      continue;
    }
    if (std::find(current->slots.begin(), current->slots.end(), tok) !=
        current->slots.end()) {
      result.diagnostics.push_back("dropped duplicate slot '" + tok + "'");
      continue;
    }
    current->slots.push_back(tok);
  }
  if (pending_domain) {
    result.diagnostics.push_back("domain '" + *pending_domain +
                                 "' without act");
  }
  return result;
}

ParsedBelief delinearize_belief(const Tokens& tokens,
                                const Ontology& ontology) {
  ParsedBelief result;
  std::string domain;
  std::string slot;
  std::string value;

  auto flush = [&]() {
    if (!domain.empty() && !slot.empty()) {
      if (value.empty()) {
        result.diagnostics.push_back("slot [" + slot + "] has no value");
      } else {
        result.belief.entries[domain][slot] = value;
      }
    }
    slot.clear();
    value.clear();
  };

  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    const bool starts_domain =
        ontology.has_domain(tok) && i + 1 < tokens.size() &&
        is_bracketed(tokens[i + 1]) &&
        ontology.has_slot(tok, strip_brackets(tokens[i + 1]));
    if (starts_domain) {
      flush();
      domain = tok;
      continue;
    }
    if (is_bracketed(tok)) {
      std::string name = strip_brackets(tok);
      if (!domain.empty() && ontology.has_slot(domain, name)) {
        flush();
        slot = name;
        continue;
      }
      result.diagnostics.push_back("dropped token '" + tok + "'");
      flush();
      continue;
    }
    if (slot.empty()) {
      result.diagnostics.push_back("dropped token '" + tok + "'");
      continue;
    }
    if (!value.empty()) value += ' ';
    value += tok;
  }
  flush();
  return result;
}

}  // namespace retmem::corpus
