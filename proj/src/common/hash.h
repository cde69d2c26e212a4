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

#ifndef RETMEM_COMMON_HASH_H_
#define RETMEM_COMMON_HASH_H_

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace retmem {

// 64-bit FNV-1a. Used for fingerprints that must be stable across runs and
// platforms (vocabulary, config, encoder weights).
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(std::span<const double> values) {
    update(std::string_view(reinterpret_cast<const char*>(values.data()),
                            values.size_bytes()));
  }
  void update_u64(uint64_t v) {
    update(std::string_view(reinterpret_cast<const char*>(&v), sizeof(v)));
  }
  uint64_t digest() const { return state_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace retmem

#endif  // RETMEM_COMMON_HASH_H_
