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

#include "evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "common/error.h"
#include "corpus/delex.h"

namespace retmem::evaluation {

namespace {

constexpr int kMaxOrder = 4;
constexpr double kZeroMatchFloor = 0.1;
constexpr size_t kSmoothingMaxSentences = 100;

std::map<std::vector<std::string>, size_t> ngrams(const corpus::Tokens& t, int n) {
  std::map<std::vector<std::string>, size_t> out;
  for (size_t i = 0; i + n <= t.size(); ++i) {
    ++out[std::vector<std::string>(t.begin() + i, t.begin() + i + n)];
  }
  return out;
}

bool contains(const corpus::Tokens& t, const std::string& token) {
  return std::find(t.begin(), t.end(), token) != t.end();
}

double pct(size_t num, size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double combined_score(double inform, double success, double bleu) {
  return (inform + success) * 0.5 + bleu;
}

double bleu(const std::vector<corpus::Tokens>& hypotheses,
            const std::vector<corpus::Tokens>& references) {
  if (hypotheses.empty()) RETMEM_THROW(InvalidArgument, "BLEU of an empty corpus");
  if (hypotheses.size() != references.size()) {
    RETMEM_THROW(InvalidArgument, "BLEU needs aligned corpora: "
                                      << hypotheses.size() << " hypotheses, "
                                      << references.size() << " references");
  }
  double matches[kMaxOrder] = {};
  double totals[kMaxOrder] = {};
  double hyp_len = 0, ref_len = 0;
  for (size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len += static_cast<double>(hypotheses[s].size());
    ref_len += static_cast<double>(references[s].size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      auto h = ngrams(hypotheses[s], n);
      auto r = ngrams(references[s], n);
      for (const auto& [g, c] : h) {
        totals[n - 1] += static_cast<double>(c);
        auto it = r.find(g);
        if (it != r.end()) matches[n - 1] += static_cast<double>(std::min(c, it->second));
      }
    }
  }
  if (hyp_len == 0) return 0.0;
  const bool smooth = hypotheses.size() <= kSmoothingMaxSentences;
  double log_sum = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (totals[n] == 0) return 0.0;
    double m = matches[n];
    if (m == 0) {
      if (!smooth) return 0.0;
      m = kZeroMatchFloor;
    }
    log_sum += std::log(m / totals[n]);
  }
  const double bp = hyp_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return 100.0 * bp * std::exp(log_sum / kMaxOrder);
}

DialogueOutcome score_dialogue(const GeneratedDialogue& d,
                               const corpus::EntityTable& db) {
  DialogueOutcome out;
  if (d.goal.empty()) return out;
  out.evaluated = true;
  const std::string name_token = corpus::placeholder("name");

  bool all_informed = true;
  for (const auto& [domain, goal] : d.goal) {
    if (goal.informable.empty()) continue;
    const GeneratedTurn* offer = nullptr;
    for (const GeneratedTurn& t : d.turns) {
      if (t.domain == domain && contains(t.response, name_token)) offer = &t;
    }
    bool informed = false;
    if (offer) {
      std::vector<size_t> offered = db.query(domain, offer->belief.constraints(domain));
      if (!offer->belief.constraints(domain).empty() && !offered.empty()) {
        std::vector<size_t> wanted = db.query(domain, goal.informable);
        informed = std::find(wanted.begin(), wanted.end(), offered.front()) != wanted.end();
      }
    }
    all_informed = all_informed && informed;
  }
  out.informed = all_informed;

  bool answered = true;
  for (const auto& [domain, goal] : d.goal) {
    for (const std::string& slot : goal.requestable) {
      const std::string token = corpus::placeholder(slot);
      bool found = false;
      for (const GeneratedTurn& t : d.turns) found = found || contains(t.response, token);
      answered = answered && found;
    }
  }
  out.success = out.informed && answered;
  return out;
}

namespace {

struct Rates {
  size_t evaluated = 0;
  size_t informed = 0;
  size_t success = 0;
};

Rates rates(const std::vector<GeneratedDialogue>& dialogues,
            const corpus::EntityTable& db, std::vector<std::string>* warnings) {
  Rates r;
  for (const GeneratedDialogue& d : dialogues) {
    DialogueOutcome o = score_dialogue(d, db);
    if (!o.evaluated) {
      if (warnings) warnings->push_back("dialogue " + d.dialogue_id + " has no goal; skipped");
      continue;
    }
    ++r.evaluated;
    r.informed += o.informed;
    r.success += o.success;
  }
  return r;
}

}  // namespace

double inform_rate(const std::vector<GeneratedDialogue>& dialogues,
                   const corpus::EntityTable& db, std::vector<std::string>* warnings) {
  Rates r = rates(dialogues, db, warnings);
  return pct(r.informed, r.evaluated);
}

double success_rate(const std::vector<GeneratedDialogue>& dialogues,
                    const corpus::EntityTable& db, std::vector<std::string>* warnings) {
  Rates r = rates(dialogues, db, warnings);
  return pct(r.success, r.evaluated);
}

std::map<std::pair<std::string, std::string>, size_t> action_distribution(
    const std::vector<corpus::SystemAction>& actions) {
  std::map<std::pair<std::string, std::string>, size_t> out;
  for (const corpus::SystemAction& a : actions) {
    for (const corpus::ActionEntry& e : a.entries) ++out[{e.domain, e.function}];
  }
  return out;
}

MetricsReport score_corpus(const std::vector<GeneratedDialogue>& dialogues,
                           const corpus::EntityTable& db,
                           std::vector<std::string>* warnings) {
  MetricsReport rep;
  Rates r = rates(dialogues, db, warnings);
  rep.inform = pct(r.informed, r.evaluated);
  rep.success = pct(r.success, r.evaluated);
  rep.dialogues = dialogues.size();
  std::vector<corpus::Tokens> hyps, refs;
  for (const GeneratedDialogue& d : dialogues) {
    if (d.references.size() != d.turns.size()) {
      RETMEM_THROW(InvalidArgument, "dialogue " << d.dialogue_id
                                                << " has mismatched reference count");
    }
    for (size_t t = 0; t < d.turns.size(); ++t) {
      hyps.push_back(d.turns[t].response);
      refs.push_back(d.references[t]);
    }
  }
  rep.turns = hyps.size();
  rep.bleu = hyps.empty() ? 0.0 : bleu(hyps, refs);
  rep.combined = combined_score(rep.inform, rep.success, rep.bleu);
  return rep;
}

std::map<std::string, MetricsReport> per_domain_report(
    const std::vector<GeneratedDialogue>& dialogues, const corpus::EntityTable& db) {
  std::map<std::string, std::vector<GeneratedDialogue>> by_domain;
  for (const GeneratedDialogue& d : dialogues) {
    for (const auto& [domain, goal] : d.goal) by_domain[domain].push_back(d);
  }
  std::map<std::string, MetricsReport> out;
  for (const auto& [domain, subset] : by_domain) out[domain] = score_corpus(subset, db);
  return out;
}

MetricsReport evaluate(const std::vector<GeneratedDialogue>& dialogues,
                       const std::vector<corpus::SystemAction>& reference_actions,
                       const corpus::EntityTable& db,
                       std::vector<std::string>* warnings) {
  MetricsReport rep = score_corpus(dialogues, db, warnings);
  rep.per_domain = per_domain_report(dialogues, db);
  std::vector<corpus::SystemAction> generated;
  for (const GeneratedDialogue& d : dialogues) {
    for (const GeneratedTurn& t : d.turns) generated.push_back(t.action);
  }
  rep.action_counts = action_distribution(generated);
  rep.reference_action_counts = action_distribution(reference_actions);
  return rep;
}

namespace {

nlohmann::json counts_json(const std::map<std::pair<std::string, std::string>, size_t>& c) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [k, v] : c) {
    out.push_back({{"domain", k.first}, {"function", k.second}, {"count", v}});
  }
  return out;
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = {{"inform", inform},   {"success", success},
                      {"bleu", bleu},       {"combined", combined},
                      {"dialogues", dialogues}, {"turns", turns}};
  if (!per_domain.empty()) {
    nlohmann::json pd = nlohmann::json::object();
    for (const auto& [d, r] : per_domain) pd[d] = r.to_json();
    j["per_domain"] = pd;
  }
  if (!action_counts.empty() || !reference_action_counts.empty()) {
    j["action_counts"] = counts_json(action_counts);
    j["reference_action_counts"] = counts_json(reference_action_counts);
  }
  return j;
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  auto row = [&](const std::string& name, const MetricsReport& r) {
    out << std::left << std::setw(14) << name << std::right << std::fixed
        << std::setprecision(2) << std::setw(9) << r.inform << std::setw(9)
        << r.success << std::setw(9) << r.bleu << std::setw(10) << r.combined
        << "\n";
  };
  out << std::left << std::setw(14) << "" << std::right << std::setw(9) << "Inform"
      << std::setw(9) << "Success" << std::setw(9) << "BLEU" << std::setw(10)
      << "Combined" << "\n";
  row("all", *this);
  for (const auto& [d, r] : per_domain) row(d, r);
  return out.str();
}

}  // namespace retmem::evaluation
