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

#ifndef RETMEM_EVALUATION_METRICS_H_
#define RETMEM_EVALUATION_METRICS_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corpus/db.h"
#include "corpus/types.h"
#include "json.hpp"

namespace retmem::evaluation {

// One system turn as produced by the model (or taken from the references).
struct GeneratedTurn {
  corpus::BeliefState belief;
  corpus::SystemAction action;
  corpus::Tokens response;
  // Domain the turn is about; empty for general turns.
  std::string domain;
};

struct GeneratedDialogue {
  std::string dialogue_id;
  std::map<std::string, corpus::DomainGoal> goal;
  std::vector<GeneratedTurn> turns;
  std::vector<corpus::Tokens> references;
};

double combined_score(double inform, double success, double bleu);

// Corpus BLEU-4, uniform weights, brevity penalty, 0-100. Zero n-gram match
// counts are floored to 0.1 when the corpus has at most 100 sentences.
// Throws InvalidArgument on an empty or misaligned corpus.
double bleu(const std::vector<corpus::Tokens>& hypotheses,
            const std::vector<corpus::Tokens>& references);

struct DialogueOutcome {
  bool evaluated = false;  // false when the dialogue has no goal
  bool informed = false;
  bool success = false;
};

// A goal domain is informed when, at the last turn of that domain whose
// response offers "[value_name]", the first entity matching the turn's
// belief also satisfies the goal constraints. Domains whose goal has no
// constraints count as informed. Success additionally needs every requested
// slot's "[value_<slot>]" somewhere in the dialogue's responses.
DialogueOutcome score_dialogue(const GeneratedDialogue& d,
                               const corpus::EntityTable& db);

struct MetricsReport {
  double inform = 0.0;
  double success = 0.0;
  double bleu = 0.0;
  double combined = 0.0;
  size_t dialogues = 0;
  size_t turns = 0;
  std::map<std::string, MetricsReport> per_domain;
  std::map<std::pair<std::string, std::string>, size_t> action_counts;
  std::map<std::pair<std::string, std::string>, size_t> reference_action_counts;

  nlohmann::json to_json() const;
  // Columns: Inform, Success, BLEU, Combined.
  std::string to_table() const;
};

// Percentages over dialogues that have a goal; dialogues without one are
// skipped and reported through `warnings`.
double inform_rate(const std::vector<GeneratedDialogue>& dialogues,
                   const corpus::EntityTable& db,
                   std::vector<std::string>* warnings = nullptr);
double success_rate(const std::vector<GeneratedDialogue>& dialogues,
                    const corpus::EntityTable& db,
                    std::vector<std::string>* warnings = nullptr);

// Counts the (domain, function) pairs of every action entry.
std::map<std::pair<std::string, std::string>, size_t> action_distribution(
    const std::vector<corpus::SystemAction>& actions);

// Global scores without per-domain or action breakdowns.
MetricsReport score_corpus(const std::vector<GeneratedDialogue>& dialogues,
                           const corpus::EntityTable& db,
                           std::vector<std::string>* warnings = nullptr);

// Each dialogue counts toward every domain in its goal.
std::map<std::string, MetricsReport> per_domain_report(
    const std::vector<GeneratedDialogue>& dialogues,
    const corpus::EntityTable& db);

MetricsReport evaluate(const std::vector<GeneratedDialogue>& dialogues,
                       const std::vector<corpus::SystemAction>& reference_actions,
                       const corpus::EntityTable& db,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace retmem::evaluation

#endif  // RETMEM_EVALUATION_METRICS_H_
