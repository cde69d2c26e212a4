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

#include "pipeline/experiment.h"

#include "common/rng.h"

namespace retmem::pipeline {

nlohmann::json EvalSpec::to_json() const {
  return {{"split", split},
          {"belief_mode", decoding::belief_mode_name(belief_mode)},
          {"memory_source", decoding::memory_source_name(memory_source)},
          {"seed", seed},
          {"n_raw", n_raw},
          {"max_dialogues", max_dialogues}};
}

EvalSpec EvalSpec::from_json(const nlohmann::json& j) {
  EvalSpec s;
  s.split = j.value("split", s.split);
  s.belief_mode = decoding::belief_mode_from_name(
      j.value("belief_mode", std::string(decoding::belief_mode_name(s.belief_mode))));
  s.memory_source = decoding::memory_source_from_name(
      j.value("memory_source", std::string(decoding::memory_source_name(s.memory_source))));
  s.seed = j.value("seed", s.seed);
  s.n_raw = j.value("n_raw", s.n_raw);
  s.max_dialogues = j.value("max_dialogues", s.max_dialogues);
  return s;
}

TrainSpec::TrainSpec() { validation.split = "val"; }

void TrainSpec::sync() {
  model.k = train.k;
  model.sampling_p = train.sampling_p;
  model.seed = train.seed;
  train.validate();
  model.validate();
}

nlohmann::json TrainSpec::to_json() const {
  return {{"model", model.to_json()},
          {"train", train.to_json()},
          {"validate", validate},
          {"validation", validation.to_json()}};
}

TrainSpec TrainSpec::from_json(const nlohmann::json& j) {
  TrainSpec s;
  if (j.contains("model")) s.model = mamd::MamdConfig::from_json(j.at("model"));
  if (j.contains("train")) s.train = training::TrainConfig::from_json(j.at("train"));
  s.validate = j.value("validate", s.validate);
  if (j.contains("validation")) {
    nlohmann::json v = j.at("validation");
    if (!v.contains("split")) v["split"] = "val";
    s.validation = EvalSpec::from_json(v);
  }
  s.sync();
  return s;
}

TrainedModel train_model(const Prepared& data, const LoadedRetriever& retriever,
                         const carm::CandidateMap& candidates, const TrainSpec& spec,
                         const std::function<void(const training::EpochLog&)>& on_epoch) {
  TrainSpec s = spec;
  s.sync();
  TrainedModel out;
  out.model = std::make_unique<mamd::MamdModel>(s.model, data.vocab.size());
  training::Validator validator;
  if (s.validate && !data.split(s.validation.split).empty()) {
    validator = [&](const mamd::MamdModel& m) {
      return evaluate_split(m, data, retriever, s.validation).report;
    };
  }
  out.result = training::train(*out.model, data.vocab, data.train, candidates, s.train,
                               validator, on_epoch);
  return out;
}

EvaluationRun evaluate_split(const mamd::MamdModel& model, const Prepared& data,
                             const LoadedRetriever& retriever, const EvalSpec& spec) {
  std::vector<corpus::Dialogue> dialogues = data.split(spec.split);
  if (spec.max_dialogues > 0 && dialogues.size() > spec.max_dialogues) {
    dialogues.resize(spec.max_dialogues);
  }
  const std::vector<corpus::SystemAction> pool = training::action_pool(data.train);
  Rng rng(spec.seed);
  decoding::Retriever r{retriever.encoder.get(), &retriever.index, spec.n_raw,
                        spec.split == "train" || spec.exclude_self};
  decoding::GenerateOptions options;
  options.belief_mode = spec.belief_mode;
  options.memory_source = spec.memory_source;
  options.retriever = &r;
  options.action_pool = &pool;
  options.rng = &rng;
  decoding::GenerationContext ctx{&model, &data.vocab, &data.ontology, &data.db};
  return evaluate_model(ctx, dialogues, options);
}

carm::CandidateMap train_candidates(const Prepared& data, const LoadedRetriever& retriever,
                                    size_t k, size_t n_raw) {
  return carm::retrieve_corpus(retriever.index, *retriever.encoder, data.train, n_raw, k,
                               true);
}

}  // namespace retmem::pipeline
