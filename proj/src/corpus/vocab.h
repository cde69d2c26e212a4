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

#ifndef RETMEM_CORPUS_VOCAB_H_
#define RETMEM_CORPUS_VOCAB_H_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/ontology.h"
#include "corpus/types.h"

namespace retmem::corpus {

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kSos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kSep = 4;
  static constexpr int kNumReserved = 5;

  Vocabulary();
  // Ids follow the order of `tokens` after the reserved block.
  explicit Vocabulary(const std::vector<std::string>& tokens);

  int id(const std::string& token) const;
  const std::string& token(int id) const;
  size_t size() const { return tokens_.size(); }
  bool contains(const std::string& token) const;

  std::vector<int> encode(const Tokens& tokens) const;
  Tokens decode(std::span<const int> ids) const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::string hash() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Tokens the model must always be able to emit for this ontology: domains,
// "[function]", slot names, "[slot]" markers and "[value_slot]" placeholders.
std::vector<std::string> structural_tokens(const Ontology& ontology);

// Frequency-desc then lexicographic ids; tokens rarer than min_freq map to
// <unk> unless structural. Throws InvalidArgument on an empty corpus.
Vocabulary build_vocab(const std::vector<Dialogue>& corpus,
                       const Ontology& ontology, int min_freq);

}  // namespace retmem::corpus

#endif  // RETMEM_CORPUS_VOCAB_H_
