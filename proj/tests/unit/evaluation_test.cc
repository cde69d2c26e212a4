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

#include <cmath>
#include <set>

#include "common/error.h"
#include "common/rng.h"
#include "corpus/synthetic.h"
#include "decoding/generate.h"
#include "doctest.h"
#include "evaluation/metrics.h"
#include "support/fixtures.h"

namespace retmem::evaluation {
namespace {

using corpus::Tokens;

GeneratedDialogue from_gold(const corpus::Dialogue& d) {
  GeneratedDialogue g;
  g.dialogue_id = d.dialogue_id;
  g.goal = d.goal;
  for (const auto& t : d.turns) {
    g.turns.push_back({t.belief, t.action, t.response, decoding::query_domain(t)});
    g.references.push_back(t.response);
  }
  return g;
}

bool has(const Tokens& toks, const std::string& w) {
  for (const auto& t : toks) {
    if (t == w) return true;
  }
  return false;
}

// Written from the matching rules, sharing nothing with the scorer.
std::pair<bool, bool> oracle(const GeneratedDialogue& d, const corpus::EntityTable& db) {
  bool informed = true;
  for (const auto& [domain, goal] : d.goal) {
    if (goal.informable.empty()) continue;
    int last = -1;
    for (size_t i = 0; i < d.turns.size(); ++i) {
      if (d.turns[i].domain == domain && has(d.turns[i].response, "[value_name]")) {
        last = static_cast<int>(i);
      }
    }
    bool ok = false;
    if (last >= 0) {
      const auto& cons = d.turns[last].belief.constraints(domain);
      const corpus::Entity* first = nullptr;
      for (const auto& e : db.entities(domain)) {
        bool match = !cons.empty();
        for (const auto& [s, v] : cons) match = match && e.count(s) && e.at(s) == v;
        if (match) {
          first = &e;
          break;
        }
      }
      if (first) {
        ok = true;
        for (const auto& [s, v] : goal.informable) ok = ok && first->count(s) && first->at(s) == v;
      }
    }
    informed = informed && ok;
  }
  bool answered = true;
  for (const auto& [domain, goal] : d.goal) {
    for (const auto& slot : goal.requestable) {
      bool found = false;
      for (const auto& t : d.turns) found = found || has(t.response, "[value_" + slot + "]");
      answered = answered && found;
    }
  }
  return {informed, informed && answered};
}

// Drops placeholders and nudges beliefs so that some dialogues fail.
GeneratedDialogue perturb(GeneratedDialogue d, Rng& rng) {
  for (auto& t : d.turns) {
    if (rng.bernoulli(0.15)) {
      Tokens kept;
      for (const auto& w : t.response) {
        if (w.rfind("[value_", 0) != 0) kept.push_back(w);
      }
      t.response = kept;
    }
    if (rng.bernoulli(0.15) && !t.domain.empty()) {
      auto& slots = t.belief.entries[t.domain];
      if (!slots.empty()) {
        const auto& values = corpus::synthetic_ontology().values(t.domain, slots.begin()->first);
        auto it = values.begin();
        std::advance(it, rng.below(values.size()));
        slots.begin()->second = *it;
      }
    }
  }
  return d;
}

TEST_SUITE("evaluation") {

TEST_CASE("combined score is exact") {
  CHECK(std::abs(combined_score(95.70, 88.90, 18.90) - 111.20) < 1e-9);
  CHECK(std::abs(combined_score(94.20, 86.20, 18.80) - 109.00) < 1e-9);
  CHECK(combined_score(0, 0, 0) == 0.0);
}

TEST_CASE("bleu of identical, empty and hand-computed corpora") {
  std::vector<Tokens> refs = {corpus::tokenize("the cat sat on the mat"),
                              corpus::tokenize("the dog runs")};
  CHECK(bleu(refs, refs) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(bleu({{}, {}}, refs) == 0.0);

  std::vector<Tokens> hyps = {corpus::tokenize("the cat is on the mat"),
                              corpus::tokenize("the dog runs fast")};
  // Clipped matches / totals per order: 8/10, 5/8, 2/6, 0/4 (floored to 0.1).
  // Hypothesis length 10 exceeds reference length 9, so no brevity penalty.
  const double expect =
      100.0 * std::exp((std::log(0.8) + std::log(5.0 / 8) + std::log(2.0 / 6) + std::log(0.1 / 4)) / 4);
  CHECK(bleu(hyps, refs) == doctest::Approx(expect).epsilon(1e-12));

  std::vector<Tokens> short_hyps = {corpus::tokenize("the cat sat on"), corpus::tokenize("the dog runs")};
  // 7/7, 5/5, 3/3, 1/1 with brevity exp(1 - 9/7).
  CHECK(bleu(short_hyps, refs) == doctest::Approx(100.0 * std::exp(1.0 - 9.0 / 7.0)).epsilon(1e-12));

  std::vector<Tokens> swapped_h = {hyps[1], hyps[0]}, swapped_r = {refs[1], refs[0]};
  CHECK(bleu(swapped_h, swapped_r) == bleu(hyps, refs));
  CHECK_THROWS_AS(bleu({}, {}), InvalidArgument);
  CHECK_THROWS_AS(bleu(hyps, {refs[0]}), InvalidArgument);
}

TEST_CASE("large corpora are not smoothed") {
  std::vector<Tokens> hyps(101, corpus::tokenize("a b c d")), refs(101, corpus::tokenize("a b x d"));
  CHECK(bleu(hyps, refs) == 0.0);
  hyps.pop_back();
  refs.pop_back();
  CHECK(bleu(hyps, refs) > 0.0);
}

TEST_CASE("gold dialogues inform and succeed; silence does not") {
  const auto& db = corpus::synthetic_db();
  auto corpus = testing::small_corpus(20, 11);
  std::vector<GeneratedDialogue> gold;
  for (const auto& d : corpus) gold.push_back(from_gold(d));
  double expected_inform = 0, expected_success = 0;
  for (const auto& g : gold) {
    auto [i, s] = oracle(g, db);
    expected_inform += i;
    expected_success += s;
  }
  CHECK(inform_rate(gold, db) == doctest::Approx(100.0 * expected_inform / gold.size()));
  CHECK(success_rate(gold, db) == doctest::Approx(100.0 * expected_success / gold.size()));

  std::vector<GeneratedDialogue> silent = gold;
  for (auto& g : silent) {
    for (auto& t : g.turns) t.response = corpus::tokenize("ok");
  }
  bool any_constrained = false;
  for (const auto& g : silent) {
    for (const auto& [dom, goal] : g.goal) any_constrained = any_constrained || !goal.informable.empty();
  }
  REQUIRE(any_constrained);
  CHECK(success_rate(silent, db) == 0.0);
  for (const auto& g : silent) {
    bool constrained = false;
    for (const auto& [dom, goal] : g.goal) constrained = constrained || !goal.informable.empty();
    if (constrained) CHECK(!score_dialogue(g, db).informed);
  }
}

TEST_CASE("inform and success agree with the rule oracle on perturbed dialogues") {
  const auto& db = corpus::synthetic_db();
  Rng rng(31);
  for (int round = 0; round < 10; ++round) {
    auto corpus = testing::small_corpus(20, 100 + round);
    std::vector<GeneratedDialogue> dialogues;
    double inf = 0, suc = 0;
    for (const auto& d : corpus) {
      dialogues.push_back(perturb(from_gold(d), rng));
      auto [i, s] = oracle(dialogues.back(), db);
      inf += i;
      suc += s;
    }
    CHECK(inform_rate(dialogues, db) == doctest::Approx(100.0 * inf / 20));
    CHECK(success_rate(dialogues, db) == doctest::Approx(100.0 * suc / 20));
    CHECK(success_rate(dialogues, db) <= inform_rate(dialogues, db));
  }
}

TEST_CASE("a missing requested slot blocks success only") {
  const auto& db = corpus::synthetic_db();
  for (const auto& d : testing::small_corpus(20, 12)) {
    GeneratedDialogue g = from_gold(d);
    auto o = score_dialogue(g, db);
    if (!o.success) continue;
    std::string slot;
    for (const auto& [dom, goal] : g.goal) {
      if (!goal.requestable.empty()) slot = goal.requestable.front();
    }
    if (slot.empty()) continue;
    for (auto& t : g.turns) {
      Tokens kept;
      for (const auto& w : t.response) {
        if (w != "[value_" + slot + "]") kept.push_back(w);
      }
      t.response = kept;
    }
    auto after = score_dialogue(g, db);
    CHECK(after.informed == o.informed);
    CHECK(!after.success);
  }
}

TEST_CASE("dialogues without a goal are skipped with a warning") {
  auto corpus = testing::small_corpus(3, 2);
  std::vector<GeneratedDialogue> ds;
  for (const auto& d : corpus) ds.push_back(from_gold(d));
  ds[1].goal.clear();
  std::vector<std::string> warnings;
  double with = inform_rate(ds, corpus::synthetic_db(), &warnings);
  CHECK(warnings.size() == 1);
  ds.erase(ds.begin() + 1);
  CHECK(with == inform_rate(ds, corpus::synthetic_db()));
}

TEST_CASE("per-domain reports count multi-domain dialogues in each domain") {
  const auto& db = corpus::synthetic_db();
  corpus::SyntheticSpec one;
  one.num_dialogues = 8;
  one.domains = {"hotel"};
  std::vector<GeneratedDialogue> single;
  for (const auto& d : corpus::generate_synthetic_corpus(one, 3)) single.push_back(from_gold(d));
  auto global = score_corpus(single, db);
  auto per = per_domain_report(single, db);
  REQUIRE(per.size() == 1);
  CHECK(per.at("hotel").to_json() == global.to_json());

  std::vector<GeneratedDialogue> mixed;
  for (const auto& d : testing::small_corpus(30, 5)) mixed.push_back(from_gold(d));
  auto domains = per_domain_report(mixed, db);
  size_t multi = 0, counted = 0;
  for (const auto& g : mixed) multi += g.goal.size() > 1;
  for (const auto& [dom, rep] : domains) counted += rep.dialogues;
  REQUIRE(multi > 0);
  CHECK(counted == mixed.size() + multi);
  for (const auto& g : mixed) {
    for (const auto& [dom, goal] : g.goal) CHECK(domains.count(dom) == 1);
  }
}

TEST_CASE("action distribution counts domain and function only") {
  corpus::SystemAction a;
  a.entries.push_back({"restaurant", "inform", {"pricerange"}});
  auto c = action_distribution({a});
  CHECK(c.size() == 1);
  CHECK(c.at({"restaurant", "inform"}) == 1);
  corpus::SystemAction b = a;
  b.entries[0].slots = {"phone", "area"};
  CHECK(action_distribution({b}) == c);

  std::vector<corpus::SystemAction> all;
  for (const auto& d : testing::small_corpus(10, 4)) {
    for (const auto& t : d.turns) all.push_back(t.action);
  }
  std::map<std::pair<std::string, std::string>, size_t> recount;
  for (const auto& x : all) {
    for (const auto& e : x.entries) ++recount[{e.domain, e.function}];
  }
  CHECK(action_distribution(all) == recount);
}

TEST_CASE("reports keep the combined invariant and render a table") {
  auto corpus = testing::small_corpus(6, 9);
  std::vector<GeneratedDialogue> ds;
  std::vector<corpus::SystemAction> refs;
  for (const auto& d : corpus) {
    ds.push_back(from_gold(d));
    for (const auto& t : d.turns) refs.push_back(t.action);
  }
  auto rep = evaluate(ds, refs, corpus::synthetic_db());
  CHECK(rep.combined == combined_score(rep.inform, rep.success, rep.bleu));
  for (const auto& [dom, r] : rep.per_domain) {
    CHECK(r.combined == combined_score(r.inform, r.success, r.bleu));
  }
  CHECK(rep.action_counts == rep.reference_action_counts);
  const std::string table = rep.to_table();
  CHECK(table.find("Inform") < table.find("Success"));
  CHECK(table.find("Success") < table.find("BLEU"));
  CHECK(table.find("BLEU") < table.find("Combined"));
  CHECK(rep.to_json().at("combined") == rep.combined);
}

}  // TEST_SUITE

}  // namespace
}  // namespace retmem::evaluation
