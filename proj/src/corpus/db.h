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

#ifndef RETMEM_CORPUS_DB_H_
#define RETMEM_CORPUS_DB_H_

#include <map>
#include <string>
#include <vector>

#include "corpus/types.h"
#include "json.hpp"

namespace retmem::corpus {

using Entity = std::map<std::string, std::string>;

// Per-domain entity rows, kept in insertion order; "first match" means first
// in that order.
class EntityTable {
 public:
  void add(const std::string& domain, Entity entity);
  const std::vector<Entity>& entities(const std::string& domain) const;
  std::vector<std::string> domains() const;

  // Indices of entities satisfying every constraint. "dontcare" and "any"
  // values match everything.
  std::vector<size_t> query(
      const std::string& domain,
      const std::map<std::string, std::string>& constraints) const;

  nlohmann::json to_json() const;
  static EntityTable from_json(const nlohmann::json& j);
  static EntityTable load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::map<std::string, std::vector<Entity>> rows_;
};

DbResultClass db_lookup(const BeliefState& belief, const std::string& domain,
                        const EntityTable& db);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_DB_H_
