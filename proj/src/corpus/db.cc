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

#include "corpus/db.h"

#include <fstream>

#include "common/error.h"

namespace retmem::corpus {
namespace {

bool is_wildcard(const std::string& v) { return v == "dontcare" || v == "any"; }

}  // namespace

void EntityTable::add(const std::string& domain, Entity entity) {
  rows_[domain].push_back(std::move(entity));
}

const std::vector<Entity>& EntityTable::entities(
    const std::string& domain) const {
  static const std::vector<Entity> kEmpty;
  auto it = rows_.find(domain);
  return it == rows_.end() ? kEmpty : it->second;
}

std::vector<std::string> EntityTable::domains() const {
  std::vector<std::string> out;
  for (const auto& [d, rows] : rows_) out.push_back(d);
  return out;
}

std::vector<size_t> EntityTable::query(
    const std::string& domain,
    const std::map<std::string, std::string>& constraints) const {
  std::vector<size_t> out;
  const auto& rows = entities(domain);
  for (size_t i = 0; i < rows.size(); ++i) {
    bool ok = true;
    for (const auto& [slot, value] : constraints) {
      if (is_wildcard(value)) continue;
      auto it = rows[i].find(slot);
      if (it == rows[i].end() || it->second != value) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

nlohmann::json EntityTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [domain, rows] : rows_) j[domain] = rows;
  return j;
}

EntityTable EntityTable::from_json(const nlohmann::json& j) {
  EntityTable t;
  try {
    for (const auto& [domain, rows] : j.items()) {
      for (const auto& row : rows) t.add(domain, row.get<Entity>());
    }
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, "entity table: " << e.what());
  }
  return t;
}

EntityTable EntityTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(IoError, "cannot open db file " << path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, path << ": " << e.what());
  }
  return from_json(j);
}

void EntityTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out << to_json().dump(2) << "\n";
}

DbResultClass db_lookup(const BeliefState& belief, const std::string& domain,
                        const EntityTable& db) {
  const auto& constraints = belief.constraints(domain);
  if (constraints.empty()) return DbResultClass::no_query();
  return DbResultClass::from_count(db.query(domain, constraints).size());
}

}  // namespace retmem::corpus
