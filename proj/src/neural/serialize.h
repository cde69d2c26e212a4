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

#ifndef RETMEM_NEURAL_SERIALIZE_H_
#define RETMEM_NEURAL_SERIALIZE_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "neural/param_store.h"

namespace retmem::neural {

inline constexpr char kArrayFileMagic[] = "RMCKPT01";
inline constexpr uint32_t kArrayFileVersion = 1;

struct NamedArray {
  std::string name;
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;
};

// Magic, format version, JSON metadata, named f64 arrays (little endian),
// then an FNV-1a checksum over everything before it.
struct ArrayFile {
  nlohmann::json meta;
  std::vector<NamedArray> arrays;
};

std::string encode_array_file(const ArrayFile& file);
// Throws ParseError on bad magic, unknown version, truncation or checksum
// mismatch. Nothing is returned unless the whole buffer validates.
ArrayFile decode_array_file(const std::string& bytes);

void write_array_file(const ArrayFile& file, const std::string& path);
ArrayFile read_array_file(const std::string& path);

std::vector<NamedArray> export_params(const ParamStore& store);
// Every parameter in the store must be present with the same shape; values are
// staged and copied only after all checks pass.
void import_params(ParamStore& store, const std::vector<NamedArray>& arrays);

}  // namespace retmem::neural

#endif  // RETMEM_NEURAL_SERIALIZE_H_
