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

#include "carm/pretrain.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"
#include "common/rng.h"
#include "neural/optim.h"
#include "neural/tape.h"

namespace retmem::carm {

ActionAtoms::ActionAtoms(const corpus::Ontology& ontology) {
  for (const std::string& d : ontology.domains()) {
    for (const std::string& f : ontology.functions()) {
      index_[{d, f, ""}] = names_.size();
      names_.push_back(d + "-" + f);
      for (const std::string& s : ontology.slots(d)) {
        index_[{d, f, s}] = names_.size();
        names_.push_back(d + "-" + f + "-" + s);
      }
    }
  }
}

std::vector<double> ActionAtoms::label(const corpus::SystemAction& action) const {
  std::vector<double> y(names_.size(), 0.0);
  for (const corpus::ActionEntry& e : action.entries) {
    auto it = index_.find({e.domain, e.function, ""});
    if (it != index_.end()) y[it->second] = 1.0;
    for (const std::string& s : e.slots) {
      auto jt = index_.find({e.domain, e.function, s});
      if (jt != index_.end()) y[jt->second] = 1.0;
    }
  }
  return y;
}

nlohmann::json PretrainReport::to_json() const {
  nlohmann::json ep = nlohmann::json::array();
  for (const PretrainEpoch& e : epochs) {
    ep.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"f1", e.f1}});
  }
  return {{"initial_f1", initial_f1}, {"final_f1", final_f1},
          {"initial_loss", initial_loss}, {"epochs", ep}};
}

double micro_f1(const std::vector<std::vector<double>>& probs,
                const std::vector<std::vector<double>>& labels,
                double threshold) {
  double tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    for (size_t j = 0; j < probs[i].size(); ++j) {
      const bool pred = probs[i][j] >= threshold;
      const bool gold = labels[i][j] > 0.5;
      tp += pred && gold;
      fp += pred && !gold;
      fn += !pred && gold;
    }
  }
  if (tp == 0) return 0.0;
  return 2 * tp / (2 * tp + fp + fn);
}

namespace {

struct Sample {
  std::vector<int> tokens;
  std::vector<double> label;
};

struct Head {
  neural::ParamStore store;
  neural::BiGruEncoder encoder;
  neural::ParamId w = neural::kNoParam;
  neural::ParamId b = neural::kNoParam;
};

neural::NodeId logits(neural::Tape& tape, const Head& m,
                      const std::vector<int>& tokens) {
  neural::EncodedSeq enc = neural::bigru_encode(tape, m.encoder, tokens);
  return tape.linear(m.w, enc.seq.states[0], m.b);
}

// Mean loss and F1 over the whole set with the current parameters.
std::pair<double, double> evaluate(const Head& m,
                                   const std::vector<Sample>& samples) {
  std::vector<std::vector<double>> probs, labels;
  double loss = 0.0;
  for (const Sample& s : samples) {
    neural::Tape tape(static_cast<const neural::ParamStore&>(m.store));
    neural::NodeId z = logits(tape, m, s.tokens);
    loss += tape.scalar(tape.bce_with_logits(z, s.label));
    std::vector<double> p;
    for (double v : tape.value(z)) p.push_back(1.0 / (1.0 + std::exp(-v)));
    probs.push_back(std::move(p));
    labels.push_back(s.label);
  }
  return {loss / static_cast<double>(samples.size()), micro_f1(probs, labels)};
}

}  // namespace

PretrainReport pretrain_encoder(
    GruContextEncoder& encoder, const std::vector<corpus::Dialogue>& corpus,
    const corpus::Ontology& ontology,
    const std::function<void(const PretrainEpoch&)>& on_epoch) {
  const CarmConfig& cfg = encoder.config();
  ActionAtoms atoms(ontology);
  std::vector<Sample> samples;
  for (const corpus::Dialogue& d : corpus) {
    for (size_t t = 0; t < d.turns.size(); ++t) {
      samples.push_back(
          {context_tokens(make_context_input(d, t), encoder.vocab(), cfg.max_seq_len),
           atoms.label(d.turns[t].action)});
    }
  }
  if (samples.empty()) RETMEM_THROW(InvalidArgument, "empty pretraining corpus");

  Rng rng(cfg.seed);
  Head m;
  m.encoder = GruContextEncoder::create_params(m.store, cfg, encoder.vocab().size(), rng);
  m.w = m.store.add_matrix("head.w", atoms.size(), cfg.hidden, rng);
  m.b = m.store.add_zeros("head.b", atoms.size());
  for (const neural::Param& p : encoder.params().params()) {
    m.store[m.store.id(p.name)].value = p.value;
  }

  PretrainReport report;
  std::tie(report.initial_loss, report.initial_f1) = evaluate(m, samples);

  const size_t batches = (samples.size() + cfg.batch_size - 1) / cfg.batch_size;
  const double total = static_cast<double>(batches * cfg.epochs);
  const double warm = std::floor(cfg.warmup * total);
  neural::Adam adam(cfg.lr);
  std::vector<size_t> order(samples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      m.store.zero_grad();
      for (size_t i = start; i < end; ++i) {
        const Sample& s = samples[order[i]];
        neural::Tape tape(m.store);
        tape.backward(tape.bce_with_logits(logits(tape, m, s.tokens), s.label));
      }
      neural::scale_grads(m.store, 1.0 / static_cast<double>(end - start));
      const double step = static_cast<double>(adam.steps() + 1);
      double lr = cfg.lr;
      if (step <= warm) {
        lr = cfg.lr * step / warm;
      } else if (total > warm) {
        lr = cfg.lr * std::max(0.0, (total - step + 1) / (total - warm));
      }
      adam.set_lr(lr);
      adam.step(m.store);
    }
    PretrainEpoch e;
    e.epoch = epoch;
    std::tie(e.loss, e.f1) = evaluate(m, samples);
    report.epochs.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  report.final_f1 = report.epochs.back().f1;

  for (neural::Param& p : encoder.params().params()) {
    p.value = m.store[m.store.id(p.name)].value;
  }
  return report;
}

}  // namespace retmem::carm
