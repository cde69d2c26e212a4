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

#include "training/trainer.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"
#include "common/rng.h"
#include "neural/optim.h"

namespace retmem::training {

void TrainConfig::validate() const {
  if (batch_size < 1) RETMEM_THROW(InvalidArgument, "batch_size must be >= 1");
  if (!(lr > 0.0)) RETMEM_THROW(InvalidArgument, "learning rate must be positive");
  if (epochs < 1) RETMEM_THROW(InvalidArgument, "epochs must be >= 1");
  if (sampling_p < 0.0 || sampling_p > 1.0) {
    RETMEM_THROW(InvalidArgument, "sampling probability must be in [0, 1]");
  }
  if (k < 1) RETMEM_THROW(InvalidArgument, "k must be >= 1");
  if (clip && !(clip_norm > 0.0)) RETMEM_THROW(InvalidArgument, "clip_norm must be positive");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"batch_size", batch_size}, {"lr", lr},         {"epochs", epochs},
          {"seed", seed},             {"sampling_p", sampling_p},
          {"k", k},                   {"clip", clip},     {"clip_norm", clip_norm},
          {"max_steps", max_steps}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.sampling_p = j.value("sampling_p", c.sampling_p);
  c.k = j.value("k", c.k);
  c.clip = j.value("clip", c.clip);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.validate();
  return c;
}

nlohmann::json EpochLog::to_json() const {
  nlohmann::json j = {{"epoch", epoch}, {"steps", steps}, {"loss", loss},
                      {"L_b", loss_belief}, {"L_a", loss_action},
                      {"L_r", loss_response}};
  if (validation) {
    j["val_inform"] = validation->inform;
    j["val_success"] = validation->success;
    j["val_bleu"] = validation->bleu;
    j["val_combined"] = validation->combined;
  }
  return j;
}

std::vector<corpus::SystemAction> action_pool(const std::vector<corpus::Dialogue>& corpus) {
  std::vector<corpus::SystemAction> pool;
  for (const corpus::Dialogue& d : corpus) {
    for (const corpus::Turn& t : d.turns) {
      if (!t.action.empty()) pool.push_back(t.action);
    }
  }
  return pool;
}

namespace {

struct Sample {
  corpus::SampleKey key;
  mamd::TurnInputs inputs;
  const carm::CandidateSet* retrieved = nullptr;
  size_t length = 0;
};

}  // namespace

TrainResult train(mamd::MamdModel& model, const corpus::Vocabulary& vocab,
                  const std::vector<corpus::Dialogue>& corpus,
                  const carm::CandidateMap& candidates, const TrainConfig& config,
                  const Validator& validator,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (model.config().k != config.k) {
    RETMEM_THROW(InvalidArgument, "model k " << model.config().k << " != training k "
                                             << config.k);
  }
  std::vector<Sample> samples;
  for (const corpus::Dialogue& d : corpus) {
    for (const corpus::Turn& t : d.turns) {
      Sample s;
      s.key = {d.dialogue_id, t.turn_id};
      s.inputs = mamd::make_turn_inputs(t, vocab);
      auto it = candidates.find(s.key);
      if (it == candidates.end()) {
        RETMEM_THROW(MissingArtifact, "no retrieved candidates for "
                                          << d.dialogue_id << "/" << t.turn_id
                                          << " (run the retrieve command)");
      }
      if (it->second.size() != config.k) {
        RETMEM_THROW(ValidationError, "candidate set for " << d.dialogue_id << "/"
                                                           << t.turn_id << " has "
                                                           << it->second.size()
                                                           << " slots, expected " << config.k);
      }
      s.retrieved = &it->second;
      const mamd::TurnInputs& in = s.inputs;
      s.length = in.user.size() + in.prev_response.size() + in.prev_belief.size() +
                 in.belief.size() + in.action.size() + in.response.size();
      samples.push_back(std::move(s));
    }
  }
  if (samples.empty()) RETMEM_THROW(InvalidArgument, "empty training corpus");
  const std::vector<corpus::SystemAction> pool = action_pool(corpus);
  if (pool.empty() && config.sampling_p > 0.0) {
    RETMEM_THROW(InvalidArgument, "random sampling needs at least one non-empty action");
  }

  std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.key < b.key;
  });
  std::vector<std::pair<size_t, size_t>> batches;
  for (size_t i = 0; i < samples.size(); i += config.batch_size) {
    batches.emplace_back(i, std::min(samples.size(), i + config.batch_size));
  }

  Rng rng(config.seed);
  neural::Adam adam(config.lr);
  neural::ParamStore& store = model.params();
  TrainResult result;
  std::vector<neural::NamedArray> best;
  bool have_best = false;

  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(batches);
    EpochLog log;
    log.epoch = epoch;
    size_t seen = 0;
    for (const auto& [begin, end] : batches) {
      if (config.max_steps > 0 && result.steps >= config.max_steps) break;
      store.zero_grad();
      for (size_t i = begin; i < end; ++i) {
        const Sample& s = samples[i];
        carm::CandidateSet mem =
            mamd::sample_memory(*s.retrieved, pool, config.sampling_p, config.k, rng);
        neural::Tape tape(store);
        mamd::LossNodes loss =
            model.joint_loss(tape, s.inputs, mamd::make_memory_input(mem, vocab));
        log.loss += tape.scalar(loss.total);
        log.loss_belief += tape.scalar(loss.belief);
        log.loss_action += tape.scalar(loss.action);
        log.loss_response += tape.scalar(loss.response);
        tape.backward(loss.total);
        ++seen;
      }
      neural::scale_grads(store, 1.0 / static_cast<double>(end - begin));
      if (config.clip) neural::clip_grad_norm(store, config.clip_norm);
      adam.step(store);
      ++result.steps;
    }
    if (seen > 0) {
      const double n = static_cast<double>(seen);
      log.loss /= n;
      log.loss_belief /= n;
      log.loss_action /= n;
      log.loss_response /= n;
    }
    if (!std::isfinite(log.loss)) {
      RETMEM_THROW(NumericError, "training diverged at epoch " << epoch);
    }
    log.steps = result.steps;
    double score = 0.0;
    if (validator) {
      log.validation = validator(model);
      score = log.validation->combined;
    }
    if (!have_best || (validator && score > result.best_score) || !validator) {
      have_best = true;
      result.best_epoch = epoch;
      result.best_score = score;
      best = neural::export_params(store);
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (config.max_steps > 0 && result.steps >= config.max_steps) break;
  }
  neural::import_params(store, best);
  return result;
}

}  // namespace retmem::training
