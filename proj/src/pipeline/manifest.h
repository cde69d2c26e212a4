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

#ifndef RETMEM_PIPELINE_MANIFEST_H_
#define RETMEM_PIPELINE_MANIFEST_H_

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

namespace retmem::pipeline {

// SHA-1 of "blob <size>\0" + content, as git computes object ids.
std::string git_blob_hash(const std::string& content);
std::string git_blob_hash_file(const std::string& path);

struct RunManifest {
  std::string command;
  std::string config_path;
  uint64_t seed = 0;
  std::map<std::string, std::string> inputs;   // role -> path
  std::map<std::string, std::string> outputs;  // role -> path
  nlohmann::json config;
  nlohmann::json extra = nlohmann::json::object();

  // Input and output hashes are computed at write time.
  nlohmann::json to_json() const;
  void write(const std::string& out_dir) const;
};

}  // namespace retmem::pipeline

#endif  // RETMEM_PIPELINE_MANIFEST_H_
