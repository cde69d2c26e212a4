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

#include "pipeline/evaluate_model.h"

namespace retmem::pipeline {

evaluation::GeneratedDialogue to_generated(
    const corpus::Dialogue& dialogue, const std::vector<decoding::TurnOutput>& outputs) {
  evaluation::GeneratedDialogue g;
  g.dialogue_id = dialogue.dialogue_id;
  g.goal = dialogue.goal;
  for (size_t t = 0; t < outputs.size(); ++t) {
    g.turns.push_back({outputs[t].belief, outputs[t].action, outputs[t].response_tokens,
                       decoding::query_domain(dialogue.turns[t])});
    g.references.push_back(dialogue.turns[t].response);
  }
  return g;
}

EvaluationRun evaluate_model(const decoding::GenerationContext& ctx,
                             const std::vector<corpus::Dialogue>& dialogues,
                             const decoding::GenerateOptions& options) {
  EvaluationRun run;
  std::vector<evaluation::GeneratedDialogue> generated;
  std::vector<corpus::SystemAction> references;
  for (const corpus::Dialogue& d : dialogues) {
    run.generations.push_back(decoding::generate_dialogue(ctx, d, options));
    generated.push_back(to_generated(d, run.generations.back()));
    for (const corpus::Turn& t : d.turns) references.push_back(t.action);
  }
  run.report = evaluation::evaluate(generated, references, *ctx.db, &run.warnings);
  return run;
}

}  // namespace retmem::pipeline
