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

#ifndef RETMEM_PIPELINE_EVALUATE_MODEL_H_
#define RETMEM_PIPELINE_EVALUATE_MODEL_H_

#include <vector>

#include "decoding/generate.h"
#include "evaluation/metrics.h"

namespace retmem::pipeline {

struct EvaluationRun {
  evaluation::MetricsReport report;
  std::vector<std::vector<decoding::TurnOutput>> generations;
  std::vector<std::string> warnings;
};

evaluation::GeneratedDialogue to_generated(const corpus::Dialogue& dialogue,
                                           const std::vector<decoding::TurnOutput>& outputs);

// Generates every dialogue and scores the result against the references.
EvaluationRun evaluate_model(const decoding::GenerationContext& ctx,
                             const std::vector<corpus::Dialogue>& dialogues,
                             const decoding::GenerateOptions& options);

}  // namespace retmem::pipeline

#endif  // RETMEM_PIPELINE_EVALUATE_MODEL_H_
