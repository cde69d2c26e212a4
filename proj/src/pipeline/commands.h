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

#ifndef RETMEM_PIPELINE_COMMANDS_H_
#define RETMEM_PIPELINE_COMMANDS_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace retmem::pipeline {

// Request keys shared by every command: "out" (required output directory),
// "config" (path to a JSON config), "config_json" (inline config, wins over
// "config") and "seed" (overrides config seeds). Command-specific keys:
//   prepare        -
//   pretrain-carm  prepared
//   retrieve       prepared, retriever, k, n_raw
//   train          prepared, retriever, candidates
//   eval/generate  prepared, retriever, model, split, belief_mode,
//                  memory_source, max_dialogues
//   ablate         prepared, retriever
// Every command writes manifest.json into "out" and returns a summary.
nlohmann::json run_command(const std::string& command, const nlohmann::json& request);

const std::vector<std::string>& command_names();

}  // namespace retmem::pipeline

#endif  // RETMEM_PIPELINE_COMMANDS_H_
