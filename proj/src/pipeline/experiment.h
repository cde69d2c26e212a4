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

#ifndef RETMEM_PIPELINE_EXPERIMENT_H_
#define RETMEM_PIPELINE_EXPERIMENT_H_

#include <functional>
#include <memory>
#include <string>

#include "carm/index.h"
#include "decoding/generate.h"
#include "json.hpp"
#include "mamd/model.h"
#include "pipeline/evaluate_model.h"
#include "pipeline/workspace.h"
#include "training/trainer.h"

namespace retmem::pipeline {

struct EvalSpec {
  std::string split = "test";
  decoding::BeliefMode belief_mode = decoding::BeliefMode::kOracle;
  decoding::MemorySource memory_source = decoding::MemorySource::kRetrieved;
  uint64_t seed = 777;
  size_t n_raw = 50;
  // 0 evaluates the whole split.
  size_t max_dialogues = 0;
  // Exclude each query's own sample from retrieval (always on for "train").
  bool exclude_self = false;

  nlohmann::json to_json() const;
  static EvalSpec from_json(const nlohmann::json& j);
};

// Configuration file of the train command.
struct TrainSpec {
  mamd::MamdConfig model;
  training::TrainConfig train;
  bool validate = true;
  EvalSpec validation;  // split defaults to "val"

  TrainSpec();
  // The training seed and k are copied into the model config.
  void sync();
  nlohmann::json to_json() const;
  static TrainSpec from_json(const nlohmann::json& j);
};

struct TrainedModel {
  std::unique_ptr<mamd::MamdModel> model;
  training::TrainResult result;
};

TrainedModel train_model(const Prepared& data, const LoadedRetriever& retriever,
                         const carm::CandidateMap& train_candidates, const TrainSpec& spec,
                         const std::function<void(const training::EpochLog&)>& on_epoch = {});

EvaluationRun evaluate_split(const mamd::MamdModel& model, const Prepared& data,
                             const LoadedRetriever& retriever, const EvalSpec& spec);

// Retrieval over the training split with self-exclusion.
carm::CandidateMap train_candidates(const Prepared& data, const LoadedRetriever& retriever,
                                    size_t k, size_t n_raw);

}  // namespace retmem::pipeline

#endif  // RETMEM_PIPELINE_EXPERIMENT_H_
