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

#ifndef RETMEM_TRAINING_TRAINER_H_
#define RETMEM_TRAINING_TRAINER_H_

#include <functional>
#include <optional>
#include <vector>

#include "carm/index.h"
#include "corpus/types.h"
#include "corpus/vocab.h"
#include "evaluation/metrics.h"
#include "json.hpp"
#include "mamd/model.h"
#include "neural/serialize.h"

namespace retmem::training {

struct TrainConfig {
  size_t batch_size = 80;
  double lr = 7e-3;
  size_t epochs = 60;
  uint64_t seed = 777;
  double sampling_p = 0.8;
  size_t k = 9;
  // Global gradient-norm clipping; off unless enabled.
  bool clip = false;
  double clip_norm = 5.0;
  // Stop after this many optimizer steps (0: no limit).
  size_t max_steps = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochLog {
  size_t epoch = 0;
  size_t steps = 0;
  double loss = 0.0;
  double loss_belief = 0.0;
  double loss_action = 0.0;
  double loss_response = 0.0;
  std::optional<evaluation::MetricsReport> validation;

  nlohmann::json to_json() const;
};

struct TrainResult {
  size_t best_epoch = 0;
  double best_score = 0.0;
  size_t steps = 0;
  std::vector<EpochLog> log;
};

using Validator = std::function<evaluation::MetricsReport(const mamd::MamdModel&)>;

// Every action of the corpus that is not empty, in corpus order.
std::vector<corpus::SystemAction> action_pool(const std::vector<corpus::Dialogue>& corpus);

// Teacher-forced training. Each turn's memory comes from `candidates` and is
// replaced by random pool actions with probability sampling_p. After every
// epoch the validator (if any) scores the model; the parameters of the epoch
// with the highest combined score are restored at the end (the last epoch
// wins when there is no validator). Throws NumericError on a non-finite loss.
TrainResult train(mamd::MamdModel& model, const corpus::Vocabulary& vocab,
                  const std::vector<corpus::Dialogue>& corpus,
                  const carm::CandidateMap& candidates, const TrainConfig& config,
                  const Validator& validator = {},
                  const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace retmem::training

#endif  // RETMEM_TRAINING_TRAINER_H_
