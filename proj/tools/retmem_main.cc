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

// Command-line front end. Everything goes through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "retmem/retmem.h"

namespace {

struct Args {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  std::string prepared;
  std::string retriever;
  std::string candidates;
  std::string model;
  // Unset values fall back to the config file, then to built-in defaults.
  std::optional<std::string> split;
  std::optional<std::string> belief_mode;
  std::optional<std::string> memory_source;
  std::optional<size_t> max_dialogues;
  std::optional<size_t> k;
  std::optional<size_t> n_raw;
};

void add_common(CLI::App* app, Args& a) {
  app->add_option("--config", a.config, "JSON config file");
  app->add_option("--seed", a.seed, "Seed overriding the config");
  app->add_option("--out", a.out, "Output directory")->required();
}

void add_eval_flags(CLI::App* app, Args& a) {
  app->add_option("--prepared", a.prepared, "Directory written by prepare")->required();
  app->add_option("--retriever", a.retriever, "Directory written by pretrain-carm")->required();
  app->add_option("--model", a.model, "Checkpoint written by train")->required();
  app->add_option("--split", a.split, "train, val or test (default test)");
  app->add_option("--belief-mode", a.belief_mode, "oracle or generated (default oracle)");
  app->add_option("--memory-source", a.memory_source, "retrieved or random (default retrieved)");
  app->add_option("--max-dialogues", a.max_dialogues, "Evaluate at most this many (0: all)");
}

nlohmann::json request(const std::string& command, const Args& a) {
  nlohmann::json r = {{"out", a.out}};
  if (!a.config.empty()) r["config"] = a.config;
  if (a.seed) r["seed"] = *a.seed;
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) r[key] = v;
  };
  set("prepared", a.prepared);
  set("retriever", a.retriever);
  set("candidates", a.candidates);
  set("model", a.model);
  if (a.k) r["k"] = *a.k;
  if (a.n_raw) r["n_raw"] = *a.n_raw;
  if (a.split) r["split"] = *a.split;
  if (a.belief_mode) r["belief_mode"] = *a.belief_mode;
  if (a.memory_source) r["memory_source"] = *a.memory_source;
  if (a.max_dialogues) r["max_dialogues"] = *a.max_dialogues;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieve-and-memorize task-oriented dialogue pipeline"};
  app.require_subcommand(1);
  Args a;

  CLI::App* prepare = app.add_subcommand("prepare", "Validate or synthesize a corpus, build vocab");
  add_common(prepare, a);

  CLI::App* pretrain = app.add_subcommand("pretrain-carm", "Pretrain the context encoder, build the index");
  add_common(pretrain, a);
  pretrain->add_option("--prepared", a.prepared, "Directory written by prepare")->required();

  CLI::App* retrieve = app.add_subcommand("retrieve", "Retrieve and clean candidate actions per turn");
  add_common(retrieve, a);
  retrieve->add_option("--prepared", a.prepared, "Directory written by prepare")->required();
  retrieve->add_option("--retriever", a.retriever, "Directory written by pretrain-carm")->required();
  retrieve->add_option("-k,--k", a.k, "Candidates kept per turn (default 9)");
  retrieve->add_option("--n-raw", a.n_raw, "Neighbours fetched before cleaning (default 50)");

  CLI::App* train = app.add_subcommand("train", "Train the memory-augmented multi-decoder model");
  add_common(train, a);
  train->add_option("--prepared", a.prepared, "Directory written by prepare")->required();
  train->add_option("--retriever", a.retriever, "Directory written by pretrain-carm")->required();
  train->add_option("--candidates", a.candidates, "Directory written by retrieve")->required();

  CLI::App* eval = app.add_subcommand("eval", "Generate a split and report Inform/Success/BLEU");
  add_common(eval, a);
  add_eval_flags(eval, a);

  CLI::App* generate = app.add_subcommand("generate", "Write per-turn generations as JSON lines");
  add_common(generate, a);
  add_eval_flags(generate, a);

  CLI::App* ablate = app.add_subcommand("ablate", "Run the memory / sampling / k grid");
  add_common(ablate, a);
  ablate->add_option("--prepared", a.prepared, "Directory written by prepare")->required();
  ablate->add_option("--retriever", a.retriever, "Directory written by pretrain-carm")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err = {{"status", "invalid_argument"}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const std::string req = request(command, a).dump();
  char* response = nullptr;
  retmem_status status = retmem_run_command(command.c_str(), req.c_str(), &response);
  if (status != RETMEM_OK) {
    nlohmann::json err = {{"status", retmem_status_name(status)},
                          {"command", command},
                          {"message", retmem_last_error()}};
    std::cerr << err.dump() << std::endl;
    return static_cast<int>(status) + 10;
  }
  std::cout << response << std::endl;
  retmem_free_string(response);
  return 0;
}
