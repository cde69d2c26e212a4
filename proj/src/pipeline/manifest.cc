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

#include "pipeline/manifest.h"

#include <openssl/sha.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.h"

namespace retmem::pipeline {

namespace fs = std::filesystem;

std::string git_blob_hash(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

std::string git_blob_hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) RETMEM_THROW(MissingArtifact, "cannot open " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return git_blob_hash(ss.str());
}

namespace {

nlohmann::json hashed(const std::map<std::string, std::string>& paths) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [role, path] : paths) {
    nlohmann::json e = {{"path", path}};
    if (fs::is_regular_file(path)) e["hash"] = git_blob_hash_file(path);
    out[role] = e;
  }
  return out;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"config_path", config_path},
          {"seed", seed},
          {"config", config},
          {"inputs", hashed(inputs)},
          {"outputs", hashed(outputs)},
          {"extra", extra}};
}

void RunManifest::write(const std::string& out_dir) const {
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "manifest.json").string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out << to_json().dump(2) << "\n";
}

}  // namespace retmem::pipeline
