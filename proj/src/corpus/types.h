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

#ifndef RETMEM_CORPUS_TYPES_H_
#define RETMEM_CORPUS_TYPES_H_

#include <map>
#include <set>
#include <string>
#include <vector>

namespace retmem::corpus {

using Tokens = std::vector<std::string>;

// domain -> slot -> value. std::map gives the canonical (alphabetical)
// ordering used by linearization.
struct BeliefState {
  std::map<std::string, std::map<std::string, std::string>> entries;

  bool empty() const;
  // Number of (domain, slot) pairs.
  size_t size() const;
  bool has(const std::string& domain, const std::string& slot) const;
  // Empty map when the domain has no constraints.
  const std::map<std::string, std::string>& constraints(
      const std::string& domain) const;

  friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

struct ActionEntry {
  std::string domain;
  std::string function;
  std::vector<std::string> slots;

  friend bool operator==(const ActionEntry&, const ActionEntry&) = default;
  friend auto operator<=>(const ActionEntry&, const ActionEntry&) = default;
};

struct SystemAction {
  std::vector<ActionEntry> entries;

  bool empty() const { return entries.empty(); }
  friend bool operator==(const SystemAction&, const SystemAction&) = default;
  friend auto operator<=>(const SystemAction&, const SystemAction&) = default;
};

// Match-count bucket: 0, 1, 2, 3, >=4, or no query issued.
class DbResultClass {
 public:
  static constexpr int kNumBuckets = 6;
  static constexpr int kManyBucket = 4;
  static constexpr int kNoQuery = 5;

  DbResultClass() = default;
  explicit DbResultClass(int bucket);
  static DbResultClass from_count(size_t matches);
  static DbResultClass no_query() { return DbResultClass(kNoQuery); }

  int bucket() const { return bucket_; }
  friend bool operator==(const DbResultClass&, const DbResultClass&) = default;

 private:
  int bucket_ = kNoQuery;
};

struct Turn {
  int turn_id = 1;
  Tokens user;
  Tokens response;  // delexicalized
  BeliefState belief;
  BeliefState prev_belief;
  Tokens prev_response;
  SystemAction action;
  DbResultClass db_class;
  std::set<std::string> active_domains;
};

struct DomainGoal {
  std::map<std::string, std::string> informable;
  std::vector<std::string> requestable;

  friend bool operator==(const DomainGoal&, const DomainGoal&) = default;
};

struct Dialogue {
  std::string dialogue_id;
  std::map<std::string, DomainGoal> goal;
  std::vector<Turn> turns;
};

// (dialogue_id, turn_id); orders by dialogue id first.
struct SampleKey {
  std::string dialogue_id;
  int turn_id = 0;

  friend bool operator==(const SampleKey&, const SampleKey&) = default;
  friend auto operator<=>(const SampleKey&, const SampleKey&) = default;
};

// Whitespace tokenization; "][" junctions are split so "[a][b]" yields two
// tokens.
Tokens tokenize(const std::string& text);
std::string join(const Tokens& tokens);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_TYPES_H_
