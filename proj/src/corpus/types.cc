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

#include "corpus/types.h"

#include <sstream>

#include "common/error.h"

namespace retmem::corpus {

bool BeliefState::empty() const {
  for (const auto& [domain, slots] : entries) {
    if (!slots.empty()) return false;
  }
  return true;
}

size_t BeliefState::size() const {
  size_t n = 0;
  for (const auto& [domain, slots] : entries) n += slots.size();
  return n;
}

bool BeliefState::has(const std::string& domain,
                      const std::string& slot) const {
  auto it = entries.find(domain);
  return it != entries.end() && it->second.count(slot) > 0;
}

const std::map<std::string, std::string>& BeliefState::constraints(
    const std::string& domain) const {
  static const std::map<std::string, std::string> kEmpty;
  auto it = entries.find(domain);
  return it == entries.end() ? kEmpty : it->second;
}

DbResultClass::DbResultClass(int bucket) : bucket_(bucket) {
  if (bucket < 0 || bucket >= kNumBuckets) {
    RETMEM_THROW(InvalidArgument, "db_class " << bucket << " outside 0..5");
  }
}

DbResultClass DbResultClass::from_count(size_t matches) {
  return DbResultClass(
      static_cast<int>(std::min<size_t>(matches, kManyBucket)));
}

Tokens tokenize(const std::string& text) {
  Tokens out;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    size_t start = 0;
    for (size_t pos = word.find("]["); pos != std::string::npos;
         pos = word.find("][", start)) {
      out.push_back(word.substr(start, pos + 1 - start));
      start = pos + 1;
    }
    out.push_back(word.substr(start));
  }
  return out;
}

std::string join(const Tokens& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace retmem::corpus
