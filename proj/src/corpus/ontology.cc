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

#include "corpus/ontology.h"

#include <cctype>
#include <fstream>

#include "common/error.h"

namespace retmem::corpus {

bool is_lowercase_token(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (std::isspace(c) || std::isupper(c)) return false;
  }
  return true;
}

void Ontology::add_domain(const std::string& domain) {
  if (!is_lowercase_token(domain)) {
    RETMEM_THROW(ValidationError,
                 "domain name '" << domain << "' is not a lowercase token");
  }
  domains_.insert(domain);
  slots_[domain];
}

void Ontology::add_slot(const std::string& domain, const std::string& slot,
                        std::set<std::string> values) {
  if (!has_domain(domain)) add_domain(domain);
  if (!is_lowercase_token(slot)) {
    RETMEM_THROW(ValidationError,
                 "slot name '" << slot << "' is not a lowercase token");
  }
  if (values.empty()) {
    RETMEM_THROW(ValidationError,
                 "slot " << domain << "." << slot << " has no values");
  }
  slots_[domain].insert(slot);
  values_[{domain, slot}].merge(values);
}

void Ontology::add_values(const std::string& domain, const std::string& slot,
                          const std::set<std::string>& values) {
  if (!has_slot(domain, slot)) {
    RETMEM_THROW(ValidationError,
                 "unknown slot " << domain << "." << slot);
  }
  values_[{domain, slot}].insert(values.begin(), values.end());
}

void Ontology::add_function(const std::string& function) {
  if (!is_lowercase_token(function)) {
    RETMEM_THROW(ValidationError, "act function '"
                                      << function
                                      << "' is not a lowercase token");
  }
  functions_.insert(function);
}

bool Ontology::has_domain(const std::string& domain) const {
  return domains_.count(domain) > 0;
}

bool Ontology::has_slot(const std::string& domain,
                        const std::string& slot) const {
  auto it = slots_.find(domain);
  return it != slots_.end() && it->second.count(slot) > 0;
}

bool Ontology::has_function(const std::string& function) const {
  return functions_.count(function) > 0;
}

const std::set<std::string>& Ontology::slots(const std::string& domain) const {
  static const std::set<std::string> kEmpty;
  auto it = slots_.find(domain);
  return it == slots_.end() ? kEmpty : it->second;
}

const std::set<std::string>& Ontology::values(const std::string& domain,
                                              const std::string& slot) const {
  static const std::set<std::string> kEmpty;
  auto it = values_.find({domain, slot});
  return it == values_.end() ? kEmpty : it->second;
}

std::set<std::string> Ontology::all_slots() const {
  std::set<std::string> out;
  for (const auto& [domain, slots] : slots_) out.insert(slots.begin(), slots.end());
  return out;
}

void Ontology::validate() const {
  for (const auto& d : domains_) {
    if (!is_lowercase_token(d)) {
      RETMEM_THROW(ValidationError, "bad domain name '" << d << "'");
    }
    for (const auto& s : slots(d)) {
      if (!is_lowercase_token(s)) {
        RETMEM_THROW(ValidationError, "bad slot name '" << s << "'");
      }
      if (values(d, s).empty()) {
        RETMEM_THROW(ValidationError, "slot " << d << "." << s
                                              << " has no values");
      }
    }
  }
  for (const auto& f : functions_) {
    if (!is_lowercase_token(f)) {
      RETMEM_THROW(ValidationError, "bad act function '" << f << "'");
    }
  }
}

nlohmann::json Ontology::to_json() const {
  nlohmann::json j;
  j["act_functions"] = functions_;
  nlohmann::json domains = nlohmann::json::object();
  for (const auto& d : domains_) {
    nlohmann::json slots = nlohmann::json::object();
    for (const auto& s : this->slots(d)) slots[s] = values(d, s);
    domains[d] = slots;
  }
  j["domains"] = domains;
  return j;
}

Ontology Ontology::from_json(const nlohmann::json& j) {
  Ontology o;
  try {
    for (const auto& f : j.at("act_functions")) o.add_function(f.get<std::string>());
    for (const auto& [domain, slots] : j.at("domains").items()) {
      o.add_domain(domain);
      for (const auto& [slot, values] : slots.items()) {
        o.add_slot(domain, slot, values.get<std::set<std::string>>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, "ontology: " << e.what());
  }
  return o;
}

Ontology Ontology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(IoError, "cannot open ontology file " << path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, path << ": " << e.what());
  }
  return from_json(j);
}

void Ontology::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out << to_json().dump(2) << "\n";
}

}  // namespace retmem::corpus
