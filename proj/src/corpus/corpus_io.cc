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

#include "corpus/corpus_io.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.h"

namespace retmem::corpus {

nlohmann::json action_to_json(const SystemAction& a) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : a.entries) {
    out.push_back(nlohmann::json::array({e.domain, e.function, e.slots}));
  }
  return out;
}

SystemAction action_from_json(const nlohmann::json& j) {
  SystemAction a;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) {
      throw nlohmann::json::type_error::create(
          302, "action entry must be [domain, function, [slots]]", &e);
    }
    a.entries.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                         e.at(2).get<std::vector<std::string>>()});
  }
  return a;
}

nlohmann::json belief_to_json(const BeliefState& b) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [domain, slots] : b.entries) {
    if (!slots.empty()) out[domain] = slots;
  }
  return out;
}

BeliefState belief_from_json(const nlohmann::json& j) {
  BeliefState b;
  for (const auto& [domain, slots] : j.items()) {
    auto m = slots.get<std::map<std::string, std::string>>();
    if (!m.empty()) b.entries[domain] = std::move(m);
  }
  return b;
}

void validate_dialogue(const Dialogue& d, const Ontology& ontology) {
  auto where = [&](int turn_id) {
    std::ostringstream os;
    os << "dialogue " << d.dialogue_id;
    if (turn_id > 0) os << " turn " << turn_id;
    return os.str();
  };
  for (const auto& [domain, g] : d.goal) {
    if (!ontology.has_domain(domain)) {
      RETMEM_THROW(ValidationError,
                   where(0) << ": unknown goal domain '" << domain << "'");
    }
    for (const auto& [slot, v] : g.informable) {
      if (!ontology.has_slot(domain, slot)) {
        RETMEM_THROW(ValidationError, where(0) << ": unknown goal slot '"
                                               << domain << "." << slot << "'");
      }
    }
    for (const auto& slot : g.requestable) {
      if (!ontology.has_slot(domain, slot)) {
        RETMEM_THROW(ValidationError, where(0) << ": unknown goal slot '"
                                               << domain << "." << slot << "'");
      }
    }
  }
  int expected = 1;
  for (const auto& t : d.turns) {
    if (t.turn_id != expected) {
      RETMEM_THROW(ValidationError, where(t.turn_id)
                                        << ": turn ids must increase from 1");
    }
    ++expected;
    if (t.turn_id == 1 && (!t.prev_response.empty() || !t.prev_belief.empty())) {
      RETMEM_THROW(ValidationError,
                   where(t.turn_id) << ": first turn must have empty history");
    }
    for (const auto& [domain, slots] : t.belief.entries) {
      if (!ontology.has_domain(domain)) {
        RETMEM_THROW(ValidationError, where(t.turn_id) << ": unknown domain '"
                                                       << domain << "'");
      }
      for (const auto& [slot, value] : slots) {
        if (!ontology.has_slot(domain, slot)) {
          RETMEM_THROW(ValidationError, where(t.turn_id)
                                            << ": unknown slot '" << domain
                                            << "." << slot << "'");
        }
        if (value.empty()) {
          RETMEM_THROW(ValidationError, where(t.turn_id)
                                            << ": empty value for " << domain
                                            << "." << slot);
        }
      }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : t.action.entries) {
      if (!ontology.has_domain(e.domain)) {
        RETMEM_THROW(ValidationError, where(t.turn_id)
                                          << ": unknown action domain '"
                                          << e.domain << "'");
      }
      if (!ontology.has_function(e.function)) {
        RETMEM_THROW(ValidationError, where(t.turn_id)
                                          << ": unknown act function '"
                                          << e.function << "'");
      }
      if (!seen.insert({e.domain, e.function}).second) {
        RETMEM_THROW(ValidationError, where(t.turn_id)
                                          << ": duplicate act " << e.domain
                                          << " [" << e.function << "]");
      }
      std::set<std::string> slots;
      for (const auto& s : e.slots) {
        if (!ontology.has_slot(e.domain, s)) {
          RETMEM_THROW(ValidationError, where(t.turn_id)
                                            << ": unknown action slot '"
                                            << e.domain << "." << s << "'");
        }
        if (!slots.insert(s).second) {
          RETMEM_THROW(ValidationError,
                       where(t.turn_id) << ": duplicate action slot '" << s
                                        << "'");
        }
      }
    }
    for (const auto& d2 : t.active_domains) {
      if (!ontology.has_domain(d2)) {
        RETMEM_THROW(ValidationError, where(t.turn_id)
                                          << ": unknown active domain '" << d2
                                          << "'");
      }
    }
  }
}

std::vector<Dialogue> corpus_from_json(const nlohmann::json& j,
                                       const Ontology& ontology) {
  if (!j.is_array()) {
    RETMEM_THROW(ParseError, "corpus must be a JSON list of dialogues");
  }
  std::vector<Dialogue> out;
  std::set<std::string> ids;
  for (size_t di = 0; di < j.size(); ++di) {
    const auto& dj = j[di];
    Dialogue d;
    std::string ctx = "dialogue #" + std::to_string(di);
    int turn_ctx = 0;
    try {
      d.dialogue_id = dj.at("dialogue_id").get<std::string>();
      ctx = "dialogue " + d.dialogue_id;
      for (const auto& [domain, g] : dj.at("goal").items()) {
        DomainGoal goal;
        if (g.contains("informable")) {
          goal.informable = g.at("informable").get<std::map<std::string, std::string>>();
        }
        if (g.contains("requestable")) {
          goal.requestable = g.at("requestable").get<std::vector<std::string>>();
        }
        d.goal[domain] = std::move(goal);
      }
      for (const auto& tj : dj.at("turns")) {
        Turn t;
        turn_ctx = tj.at("turn_id").get<int>();
        t.turn_id = turn_ctx;
        t.user = tokenize(tj.at("user").get<std::string>());
        t.response = tokenize(tj.at("response").get<std::string>());
        t.prev_response = tokenize(tj.at("prev_response").get<std::string>());
        t.belief = belief_from_json(tj.at("belief"));
        t.action = action_from_json(tj.at("action"));
        t.db_class = DbResultClass(tj.at("db_class").get<int>());
        for (const auto& a : tj.at("active_domains")) {
          t.active_domains.insert(a.get<std::string>());
        }
        if (!d.turns.empty()) t.prev_belief = d.turns.back().belief;
        d.turns.push_back(std::move(t));
      }
    } catch (const nlohmann::json::exception& e) {
      RETMEM_THROW(ParseError, ctx << (turn_ctx ? " turn " + std::to_string(turn_ctx) : "")
                                   << ": " << e.what());
    } catch (const InvalidArgument& e) {
      RETMEM_THROW(ParseError, ctx << (turn_ctx ? " turn " + std::to_string(turn_ctx) : "")
                                   << ": " << e.what());
    }
    if (!ids.insert(d.dialogue_id).second) {
      RETMEM_THROW(ParseError, "duplicate dialogue_id " << d.dialogue_id);
    }
    validate_dialogue(d, ontology);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const Dialogue& a, const Dialogue& b) {
    return a.dialogue_id < b.dialogue_id;
  });
  return out;
}

std::vector<Dialogue> load_corpus(const std::string& path,
                                  const Ontology& ontology) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(IoError, "cannot open corpus " << path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, path << ": " << e.what());
  }
  return corpus_from_json(j, ontology);
}

nlohmann::json corpus_to_json(const std::vector<Dialogue>& corpus) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : corpus) {
    nlohmann::json dj;
    dj["dialogue_id"] = d.dialogue_id;
    nlohmann::json goal = nlohmann::json::object();
    for (const auto& [domain, g] : d.goal) {
      goal[domain] = {{"informable", g.informable},
                      {"requestable", g.requestable}};
    }
    dj["goal"] = goal;
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : d.turns) {
      nlohmann::json tj;
      tj["turn_id"] = t.turn_id;
      tj["user"] = join(t.user);
      tj["response"] = join(t.response);
      tj["prev_response"] = join(t.prev_response);
      tj["belief"] = belief_to_json(t.belief);
      tj["action"] = action_to_json(t.action);
      tj["db_class"] = t.db_class.bucket();
      tj["active_domains"] = t.active_domains;
      turns.push_back(std::move(tj));
    }
    dj["turns"] = std::move(turns);
    out.push_back(std::move(dj));
  }
  return out;
}

std::string corpus_to_string(const std::vector<Dialogue>& corpus) {
  return corpus_to_json(corpus).dump(2) + "\n";
}

void save_corpus(const std::vector<Dialogue>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out << corpus_to_string(corpus);
}

size_t count_turns(const std::vector<Dialogue>& corpus) {
  size_t n = 0;
  for (const auto& d : corpus) n += d.turns.size();
  return n;
}

}  // namespace retmem::corpus
