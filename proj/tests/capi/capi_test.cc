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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "retmem/retmem.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "retmem_capi_test" / name;
  fs::remove_all(dir);
  return dir.string();
}

json run(const char* command, const json& request) {
  char* response = nullptr;
  retmem_status st = retmem_run_command(command, request.dump().c_str(), &response);
  INFO(retmem_last_error());
  REQUIRE(st == RETMEM_OK);
  REQUIRE(response != nullptr);
  json out = json::parse(response);
  retmem_free_string(response);
  return out;
}

TEST_SUITE("capi") {

TEST_CASE("status names are stable") {
  CHECK(std::string(retmem_status_name(RETMEM_OK)) == "ok");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_INVALID_ARGUMENT)) == "invalid_argument");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_PARSE)) == "parse_error");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_VALIDATION)) == "validation_error");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_NUMERIC)) == "numeric_error");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_IO)) == "io_error");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_MISSING_ARTIFACT)) == "missing_artifact");
  CHECK(std::string(retmem_status_name(RETMEM_ERR_INTERNAL)) == "internal_error");
  CHECK(std::string(retmem_version()).size() > 0);
}

TEST_CASE("combined score through the C boundary") {
  CHECK(std::abs(retmem_combined_score(95.70, 88.90, 18.90) - 111.20) < 1e-9);
  CHECK(std::abs(retmem_combined_score(94.20, 86.20, 18.80) - 109.00) < 1e-9);
}

TEST_CASE("errors map to codes and leave outputs null") {
  char* response = reinterpret_cast<char*>(0x1);
  CHECK(retmem_run_command("nonsense", "{\"out\":\"/tmp/x\"}", &response) ==
        RETMEM_ERR_INVALID_ARGUMENT);
  CHECK(response == nullptr);
  CHECK(std::string(retmem_last_error()).find("nonsense") != std::string::npos);
  CHECK(retmem_run_command("prepare", "{not json", nullptr) == RETMEM_ERR_PARSE);
  CHECK(retmem_run_command("prepare", "[1,2]", nullptr) == RETMEM_ERR_INVALID_ARGUMENT);
  CHECK(retmem_run_command(nullptr, "{}", nullptr) == RETMEM_ERR_INVALID_ARGUMENT);
  json req = {{"out", fresh_dir("err")}, {"prepared", "/nonexistent/prep"}};
  CHECK(retmem_run_command("pretrain-carm", req.dump().c_str(), nullptr) ==
        RETMEM_ERR_MISSING_ARTIFACT);

  retmem_session* s = reinterpret_cast<retmem_session*>(0x1);
  CHECK(retmem_session_open("/nonexistent", "/nonexistent", "/nonexistent", &s) ==
        RETMEM_ERR_MISSING_ARTIFACT);
  CHECK(s == nullptr);
  CHECK(retmem_session_open(nullptr, "a", "b", &s) == RETMEM_ERR_INVALID_ARGUMENT);
  CHECK(retmem_session_vocab_size(nullptr) == 0);
  retmem_session_close(nullptr);
  retmem_free_string(nullptr);
}

TEST_CASE("a session generates the dialogues it was trained for") {
  const std::string root = fresh_dir("session");
  json prepared = run("prepare", {{"out", root + "/prep"},
                                  {"config_json", {{"synthetic", {{"num_dialogues", 12}}},
                                                   {"split", {{"val", 0.2}, {"test", 0.2}}}}}});
  run("pretrain-carm", {{"out", root + "/carm"}, {"prepared", root + "/prep"},
                        {"config_json", {{"embed_dim", 6}, {"hidden", 8}, {"epochs", 1}}}});
  run("retrieve", {{"out", root + "/cand"}, {"prepared", root + "/prep"},
                   {"retriever", root + "/carm"}, {"k", 2}});
  run("train", {{"out", root + "/model"}, {"prepared", root + "/prep"},
                {"retriever", root + "/carm"}, {"candidates", root + "/cand"},
                {"config_json", {{"model", {{"embed_dim", 6}, {"hidden", 8}, {"db_dim", 3}}},
                                 {"train", {{"epochs", 1}, {"k", 2}}},
                                 {"validate", false}}}});

  retmem_session* s = nullptr;
  REQUIRE(retmem_session_open((root + "/prep").c_str(), (root + "/carm").c_str(),
                              (root + "/model/model.ckpt").c_str(), &s) == RETMEM_OK);
  REQUIRE(s != nullptr);
  CHECK(retmem_session_vocab_size(s) == prepared.at("vocab_size").get<size_t>());

  json test = json::parse(std::ifstream(root + "/prep/test.json"));
  const std::string id = test.at(0).at("dialogue_id");
  const size_t turns = test.at(0).at("turns").size();
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(retmem_session_generate(s, "test", id.c_str(), "{\"belief_mode\":\"generated\"}", &a) ==
          RETMEM_OK);
  REQUIRE(retmem_session_generate(s, "test", id.c_str(), "{\"belief_mode\":\"generated\"}", &b) ==
          RETMEM_OK);
  const std::string text = a;
  CHECK(text == std::string(b));
  size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == turns);
  retmem_free_string(a);
  retmem_free_string(b);

  char* none = reinterpret_cast<char*>(0x1);
  CHECK(retmem_session_generate(s, "test", "no-such-dialogue", nullptr, &none) ==
        RETMEM_ERR_INVALID_ARGUMENT);
  CHECK(none == nullptr);
  CHECK(retmem_session_generate(s, "test", id.c_str(), "{\"belief_mode\":\"psychic\"}", &none) ==
        RETMEM_ERR_INVALID_ARGUMENT);
  retmem_session_close(s);
}

}  // TEST_SUITE

}  // namespace
