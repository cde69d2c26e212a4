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

#include "corpus/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include "common/error.h"
#include "common/rng.h"
#include "corpus/delex.h"

namespace retmem::corpus {
namespace {

using StrVec = std::vector<std::string>;

const std::map<std::string, StrVec>& informable_slots() {
  static const std::map<std::string, StrVec> kSlots = {
      {"restaurant", {"area", "food", "pricerange"}},
      {"hotel", {"area", "parking", "pricerange", "stars"}},
      {"attraction", {"area", "type"}},
  };
  return kSlots;
}

const std::map<std::string, StrVec>& requestable_slots() {
  static const std::map<std::string, StrVec> kSlots = {
      {"restaurant", {"address", "phone"}},
      {"hotel", {"phone"}},
      {"attraction", {"phone", "postcode"}},
  };
  return kSlots;
}

const StrVec kAreas = {"centre", "north", "south", "east", "west"};

std::string phone(Rng& rng) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", static_cast<int>(rng.below(1000000)));
  return std::string("01223 ") + buf;
}

EntityTable make_db() {
  Rng rng(20210311);
  EntityTable db;
  const StrVec adjectives = {"golden", "royal", "little", "old", "green",
                             "silver", "grand", "lucky"};
  const StrVec rest_nouns = {"wok", "kitchen", "bistro", "garden", "house"};
  const StrVec hotel_nouns = {"lodge", "inn", "manor", "suites"};
  const StrVec attr_nouns = {"hall", "gallery", "museum", "park", "theatre"};
  const StrVec streets = {"mill", "regent", "bridge", "king", "hills"};
  int n = 0;
  for (const auto& adj : adjectives) {
    for (const auto& noun : rest_nouns) {
      if ((n++ % 2) == 1) continue;
      db.add("restaurant",
             {{"name", adj + " " + noun},
              {"area", rng.pick(kAreas)},
              {"food", rng.pick(StrVec{"chinese", "italian", "indian",
                                       "british", "thai"})},
              {"pricerange", rng.pick(StrVec{"cheap", "moderate", "expensive"})},
              {"phone", phone(rng)},
              {"address", std::to_string(10 + rng.below(90)) + " " +
                              rng.pick(streets) + " street"}});
    }
  }
  for (const auto& adj : adjectives) {
    for (const auto& noun : hotel_nouns) {
      if ((n++ % 3) == 0) continue;
      db.add("hotel",
             {{"name", adj + " " + noun},
              {"area", rng.pick(kAreas)},
              {"pricerange", rng.pick(StrVec{"cheap", "moderate", "expensive"})},
              {"stars", rng.pick(StrVec{"2", "3", "4", "5"})},
              {"parking", rng.pick(StrVec{"free", "paid"})},
              {"phone", phone(rng)}});
    }
  }
  const StrVec types = {"museum", "park", "theatre", "college", "gallery"};
  for (const auto& adj : adjectives) {
    for (const auto& noun : attr_nouns) {
      if ((n++ % 2) == 0) continue;
      char pc[16];
      std::snprintf(pc, sizeof(pc), "cb%d %d%c%c", 1 + static_cast<int>(rng.below(5)),
                    1 + static_cast<int>(rng.below(9)),
                    static_cast<char>('a' + rng.below(26)),
                    static_cast<char>('a' + rng.below(26)));
      db.add("attraction", {{"name", adj + " " + noun},
                            {"area", rng.pick(kAreas)},
                            {"type", rng.pick(types)},
                            {"phone", phone(rng)},
                            {"postcode", pc}});
    }
  }
  return db;
}

Ontology make_ontology(const EntityTable& db) {
  Ontology o;
  for (const auto& f : {"inform", "request", "nooffer", "recommend", "select",
                        "reqmore", "bye", "greet", "welcome"}) {
    o.add_function(f);
  }
  o.add_domain("general");
  for (const auto& domain : db.domains()) {
    std::map<std::string, std::set<std::string>> values;
    for (const auto& e : db.entities(domain)) {
      for (const auto& [slot, v] : e) values[slot].insert(v);
    }
    for (auto& [slot, vs] : values) o.add_slot(domain, slot, std::move(vs));
  }
  return o;
}

const std::map<std::string, StrVec>& slot_phrases() {
  static const std::map<std::string, StrVec> kPhrases = {
      {"area", {"in the {}", "located in the {}", "in the {} area"}},
      {"food", {"serving {} food", "that serves {} food"}},
      {"pricerange", {"in the {} price range", "that is {}"}},
      {"stars", {"with {} stars", "rated {} stars"}},
      {"parking", {"with {} parking", "that has {} parking"}},
      {"type", {"that is a {}", "of type {}"}},
  };
  return kPhrases;
}

std::string slot_word(const std::string& slot) {
  static const std::map<std::string, std::string> kWords = {
      {"pricerange", "price range"}, {"phone", "phone number"}};
  auto it = kWords.find(slot);
  return it == kWords.end() ? slot : it->second;
}

std::string fill(const std::string& tmpl, const std::string& value) {
  auto pos = tmpl.find("{}");
  return tmpl.substr(0, pos) + value + tmpl.substr(pos + 2);
}

class DialogueBuilder {
 public:
  DialogueBuilder(Rng& rng, std::string id) : rng_(rng) {
    dialogue_.dialogue_id = std::move(id);
  }

  void add_turn(const std::string& user, const std::string& lexical_response,
                SystemAction action, const std::string& domain) {
    const auto& db = synthetic_db();
    Turn t;
    t.turn_id = static_cast<int>(dialogue_.turns.size()) + 1;
    t.user = tokenize(user);
    t.belief = belief_;
    if (!dialogue_.turns.empty()) {
      t.prev_belief = dialogue_.turns.back().belief;
      t.prev_response = dialogue_.turns.back().response;
    }
    t.response =
        delexicalize(tokenize(lexical_response), synthetic_ontology(), belief_);
    t.action = std::move(action);
    t.active_domains = {domain};
    t.db_class = domain == "general" ? DbResultClass::no_query()
                                     : db_lookup(belief_, domain, db);
    dialogue_.turns.push_back(std::move(t));
  }

  BeliefState& belief() { return belief_; }
  Dialogue& dialogue() { return dialogue_; }
  Rng& rng() { return rng_; }

 private:
  Rng& rng_;
  Dialogue dialogue_;
  BeliefState belief_;
};

std::string phrase_for(Rng& rng, const std::string& slot,
                       const std::string& value) {
  return fill(rng.pick(slot_phrases().at(slot)), value);
}

std::string join_phrases(const StrVec& phrases) {
  std::string out;
  for (size_t i = 0; i < phrases.size(); ++i) {
    if (i) out += " and ";
    out += phrases[i];
  }
  return out;
}

// Runs one domain of the dialogue; `opener` selects the first-domain phrasing.
void run_domain(DialogueBuilder& b, const std::string& domain, bool first,
                const SyntheticSpec& spec) {
  Rng& rng = b.rng();
  const auto& db = synthetic_db();
  const auto& rows = db.entities(domain);
  const Entity& target = rows[rng.below(rows.size())];

  StrVec informable = informable_slots().at(domain);
  rng.shuffle(informable);
  size_t n_constraints = 1 + rng.below(informable.size());
  StrVec constrained(informable.begin(), informable.begin() + n_constraints);

  DomainGoal goal;
  for (const auto& s : constrained) goal.informable[s] = target.at(s);
  StrVec req_pool = requestable_slots().at(domain);
  for (const auto& s : informable_slots().at(domain)) {
    if (!goal.informable.count(s)) req_pool.push_back(s);
  }
  rng.shuffle(req_pool);
  size_t n_req = std::min<size_t>(req_pool.size(), 1 + rng.below(2));
  goal.requestable.assign(req_pool.begin(), req_pool.begin() + n_req);
  b.dialogue().goal[domain] = goal;

  size_t first_batch =
      constrained.size() == 1 ? 1 : 1 + rng.below(constrained.size() - 1);
  StrVec pending(constrained.begin() + first_batch, constrained.end());
  StrVec batch(constrained.begin(), constrained.begin() + first_batch);

  auto opener = [&]() {
    if (!first) return std::string("i also need a ") + domain;
    return fill(rng.pick(StrVec{"i am looking for a {}", "i need a {}",
                                "can you find me a {}"}),
                domain);
  };

  // Optional dead end: one value swapped so nothing matches.
  if (rng.bernoulli(spec.nooffer_rate)) {
    const std::string& slot = batch[rng.below(batch.size())];
    std::map<std::string, std::string> trial;
    for (const auto& s : batch) trial[s] = target.at(s);
    for (const auto& alt : synthetic_ontology().values(domain, slot)) {
      if (alt == target.at(slot)) continue;
      trial[slot] = alt;
      if (!db.query(domain, trial).empty()) continue;
      StrVec phrases;
      for (const auto& s : batch) phrases.push_back(phrase_for(rng, s, trial[s]));
      for (const auto& [s, v] : trial) b.belief().entries[domain][s] = v;
      SystemAction act;
      act.entries.push_back({domain, "nooffer", {}});
      for (const auto& [s, v] : trial) act.entries[0].slots.push_back(s);
      b.add_turn(opener() + " " + join_phrases(phrases) + " .",
                 "i am sorry , there is no " + domain + " matching your request .",
                 act, domain);
      b.belief().entries[domain][slot] = target.at(slot);
      batch = {slot};
      first = false;
      break;
    }
  }

  bool opened = !b.dialogue().turns.empty() &&
                b.dialogue().turns.back().active_domains.count(domain);
  while (true) {
    StrVec phrases;
    for (const auto& s : batch) {
      b.belief().entries[domain][s] = target.at(s);
      phrases.push_back(phrase_for(rng, s, target.at(s)));
    }
    std::string user;
    if (!opened) {
      user = opener() + " " + join_phrases(phrases) + " .";
      opened = true;
    } else if (b.dialogue().turns.back().action.entries[0].function == "nooffer") {
      user = "how about one " + join_phrases(phrases) + " instead ?";
    } else {
      user = rng.pick(StrVec{"i would like one ", "i want it "}) +
             join_phrases(phrases) + " .";
    }
    // The system only asks for more when the user says there is more.
    if (!pending.empty()) {
      user += rng.pick(StrVec{" i have a few more requirements .",
                              " i also have other preferences ."});
    }
    auto matches = db.query(domain, b.belief().constraints(domain));
    if (!pending.empty() && matches.size() > 1) {
      const std::string next = pending.front();
      SystemAction act;
      act.entries.push_back({domain, "request", {next}});
      b.add_turn(user, "what " + slot_word(next) + " would you like ?", act,
                 domain);
      batch = {next};
      pending.erase(pending.begin());
      continue;
    }
    const Entity& offered = rows[matches.front()];
    SystemAction act;
    std::string response;
    if (matches.size() == 1) {
      act.entries.push_back({domain, "inform", {"name", "area"}});
      response = offered.at("name") + " is a nice " + domain + " in the " +
                 offered.at("area") + " .";
    } else {
      act.entries.push_back({domain, "recommend", {"name", "area"}});
      response = "i recommend " + offered.at("name") + " , it is in the " +
                 offered.at("area") + " .";
    }
    b.add_turn(user, response, act, domain);
    // Any unstated goal constraints are already satisfied by the offer.
    for (const auto& s : pending) b.dialogue().goal[domain].informable.erase(s);
    break;
  }

  const auto& req = b.dialogue().goal[domain].requestable;
  const Entity& offered =
      rows[db.query(domain, b.belief().constraints(domain)).front()];
  StrVec asks;
  std::string answer;
  for (size_t i = 0; i < req.size(); ++i) {
    asks.push_back("the " + slot_word(req[i]));
    if (i) answer += " and ";
    answer += "the " + slot_word(req[i]) + " is " + offered.at(req[i]);
  }
  SystemAction act;
  act.entries.push_back({domain, "inform", req});
  act.entries.push_back({"general", "reqmore", {}});
  b.add_turn(rng.pick(StrVec{"can you tell me ", "what is "}) +
                 join_phrases(asks) + " ?",
             answer + " . is there anything else i can help with ?", act,
             domain);
}

}  // namespace

const EntityTable& synthetic_db() {
  static const EntityTable kDb = make_db();
  return kDb;
}

const Ontology& synthetic_ontology() {
  static const Ontology kOntology = make_ontology(synthetic_db());
  return kOntology;
}

nlohmann::json SyntheticSpec::to_json() const {
  return {{"num_dialogues", num_dialogues},
          {"domains", domains},
          {"multi_domain_rate", multi_domain_rate},
          {"nooffer_rate", nooffer_rate},
          {"id_prefix", id_prefix}};
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.num_dialogues = j.value("num_dialogues", s.num_dialogues);
  s.domains = j.value("domains", s.domains);
  s.multi_domain_rate = j.value("multi_domain_rate", s.multi_domain_rate);
  s.nooffer_rate = j.value("nooffer_rate", s.nooffer_rate);
  s.id_prefix = j.value("id_prefix", s.id_prefix);
  return s;
}

std::vector<Dialogue> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                uint64_t seed) {
  if (spec.num_dialogues < 1) {
    RETMEM_THROW(InvalidArgument, "synthetic spec needs at least one dialogue");
  }
  if (spec.domains.empty()) {
    RETMEM_THROW(InvalidArgument, "synthetic spec needs at least one domain");
  }
  for (const auto& d : spec.domains) {
    if (!informable_slots().count(d)) {
      RETMEM_THROW(InvalidArgument, "domain '" << d
                                               << "' is not in the mini-world");
    }
  }
  Rng rng(seed);
  std::vector<Dialogue> out;
  for (int i = 0; i < spec.num_dialogues; ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%04d", spec.id_prefix.c_str(), i);
    DialogueBuilder b(rng, id);
    StrVec domains = spec.domains;
    rng.shuffle(domains);
    size_t n = domains.size() > 1 && rng.bernoulli(spec.multi_domain_rate) ? 2 : 1;
    for (size_t k = 0; k < n; ++k) run_domain(b, domains[k], k == 0, spec);
    b.add_turn(rng.pick(StrVec{"thank you , goodbye .", "that is all , thanks ."}),
               "thank you for using our service . goodbye .",
               SystemAction{{{"general", "bye", {}}}}, "general");
    out.push_back(std::move(b.dialogue()));
  }
  std::sort(out.begin(), out.end(), [](const Dialogue& a, const Dialogue& b) {
    return a.dialogue_id < b.dialogue_id;
  });
  return out;
}

}  // namespace retmem::corpus
