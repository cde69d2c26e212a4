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

#ifndef RETMEM_CORPUS_ONTOLOGY_H_
#define RETMEM_CORPUS_ONTOLOGY_H_

#include <map>
#include <set>
#include <string>

#include "json.hpp"

namespace retmem::corpus {

class Ontology {
 public:
  Ontology() = default;

  // Throws ValidationError when a name is not a lowercase single token or a
  // (domain, slot) key has no values.
  void add_domain(const std::string& domain);
  void add_slot(const std::string& domain, const std::string& slot,
                std::set<std::string> values);
  void add_values(const std::string& domain, const std::string& slot,
                  const std::set<std::string>& values);
  void add_function(const std::string& function);

  bool has_domain(const std::string& domain) const;
  bool has_slot(const std::string& domain, const std::string& slot) const;
  bool has_function(const std::string& function) const;

  const std::set<std::string>& domains() const { return domains_; }
  const std::set<std::string>& slots(const std::string& domain) const;
  const std::set<std::string>& values(const std::string& domain,
                                      const std::string& slot) const;
  const std::set<std::string>& functions() const { return functions_; }
  // Union of slot names over every domain.
  std::set<std::string> all_slots() const;

  void validate() const;

  nlohmann::json to_json() const;
  static Ontology from_json(const nlohmann::json& j);
  static Ontology load(const std::string& path);
  void save(const std::string& path) const;

  friend bool operator==(const Ontology&, const Ontology&) = default;

 private:
  std::set<std::string> domains_;
  std::map<std::string, std::set<std::string>> slots_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>>
      values_;
  std::set<std::string> functions_;
};

bool is_lowercase_token(const std::string& s);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_ONTOLOGY_H_
