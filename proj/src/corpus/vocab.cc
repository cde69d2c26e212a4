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

#include "corpus/vocab.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "common/error.h"
#include "common/hash.h"
#include "corpus/delex.h"
#include "corpus/linearize.h"

namespace retmem::corpus {
namespace {

const std::vector<std::string>& reserved() {
  static const std::vector<std::string> kReserved = {"<pad>", "<sos>", "<eos>",
                                                     "<unk>", "<sep>"};
  return kReserved;
}

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  tokens_ = reserved();
  for (const auto& t : tokens) {
    if (std::find(tokens_.begin(), tokens_.begin() + kNumReserved, t) !=
        tokens_.begin() + kNumReserved) {
      continue;
    }
    tokens_.push_back(t);
  }
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      RETMEM_THROW(InvalidArgument, "duplicate vocabulary token '"
                                        << tokens_[i] << "'");
    }
  }
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<size_t>(id) >= tokens_.size()) {
    RETMEM_THROW(InvalidArgument, "token id " << id << " out of range");
  }
  return tokens_[id];
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) > 0;
}

std::vector<int> Vocabulary::encode(const Tokens& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

Tokens Vocabulary::decode(std::span<const int> ids) const {
  Tokens out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

std::string Vocabulary::hash() const {
  Fnv1a h;
  for (const auto& t : tokens_) {
    h.update(t);
    h.update(std::string_view("\n"));
  }
  return h.hex();
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  for (size_t i = kNumReserved; i < tokens_.size(); ++i) out << tokens_[i] << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(IoError, "cannot open vocabulary " << path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) tokens.push_back(line);
  }
  return Vocabulary(tokens);
}

std::vector<std::string> structural_tokens(const Ontology& ontology) {
  std::set<std::string> out;
  for (const auto& d : ontology.domains()) {
    out.insert(d);
    out.insert("[" + d + "]");
  }
  for (const auto& f : ontology.functions()) out.insert("[" + f + "]");
  for (const auto& s : ontology.all_slots()) {
    out.insert(s);
    out.insert("[" + s + "]");
    out.insert(placeholder(s));
  }
  return {out.begin(), out.end()};
}

Vocabulary build_vocab(const std::vector<Dialogue>& corpus,
                       const Ontology& ontology, int min_freq) {
  if (corpus.empty()) RETMEM_THROW(InvalidArgument, "build_vocab: empty corpus");
  std::map<std::string, long> freq;
  auto count = [&](const Tokens& toks) {
    for (const auto& t : toks) ++freq[t];
  };
  for (const auto& d : corpus) {
    for (const auto& t : d.turns) {
      count(t.user);
      count(t.response);
      count(linearize_belief(t.belief));
      count(linearize_action(t.action));
    }
  }
  std::set<std::string> keep;
  for (const auto& [tok, n] : freq) {
    if (n >= min_freq) keep.insert(tok);
  }
  for (const auto& t : structural_tokens(ontology)) keep.insert(t);
  for (const auto& r : reserved()) keep.erase(r);

  std::vector<std::string> ordered(keep.begin(), keep.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [&](const std::string& a, const std::string& b) {
                     long fa = freq.count(a) ? freq.at(a) : 0;
                     long fb = freq.count(b) ? freq.at(b) : 0;
                     if (fa != fb) return fa > fb;
                     return a < b;
                   });
  return Vocabulary(ordered);
}

}  // namespace retmem::corpus
