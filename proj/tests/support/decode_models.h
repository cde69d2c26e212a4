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

#ifndef RETMEM_TESTS_SUPPORT_DECODE_MODELS_H_
#define RETMEM_TESTS_SUPPORT_DECODE_MODELS_H_

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "common/hash.h"
#include "common/rng.h"
#include "decoding/search.h"
#include "mamd/model.h"
#include "support/fixtures.h"

namespace retmem::testing {

// Next-token table keyed by the whole prefix: a random language model with
// no hidden state to get wrong.
struct TableModel {
  uint64_t seed = 0;
  size_t vocab = 8;
  double sharpness = 3.0;

  decoding::Step<std::vector<int>> operator()(const std::vector<int>& prefix, int prev) const {
    Fnv1a h;
    h.update(std::to_string(seed));
    for (int t : prefix) h.update(std::to_string(t) + ",");
    Rng rng(h.digest());
    std::vector<double> p(vocab);
    double z = 0.0;
    for (auto& x : p) {
      x = std::exp(sharpness * rng.uniform(-1, 1));
      z += x;
    }
    for (auto& x : p) x /= z;
    std::vector<int> next = prefix;
    next.push_back(prev);
    return {p, next};
  }
};

// Every path of up to max_len tokens, scored the way beam search scores.
inline decoding::Hypothesis exhaustive(const TableModel& m, size_t max_len) {
  using corpus::Vocabulary;
  using Prefix = std::vector<int>;
  decoding::Hypothesis best;
  bool have = false;
  std::function<void(const Prefix&, Prefix&, double, int)> walk =
      [&](const Prefix& state, Prefix& tokens, double score, int prev) {
        auto step = m(state, prev);
        for (size_t i = 0; i < step.probs.size(); ++i) {
          const int tok = static_cast<int>(i);
          if (tok == Vocabulary::kPad || tok == Vocabulary::kSos) continue;
          const double s = score + std::log(step.probs[i]);
          if (tok == Vocabulary::kEos || tokens.size() + 1 == max_len) {
            decoding::Hypothesis h{tokens, s, tok == Vocabulary::kEos};
            if (tok != Vocabulary::kEos) h.tokens.push_back(tok);
            if (!have || s > best.logprob || (s == best.logprob && h.tokens < best.tokens)) {
              best = h;
              have = true;
            }
            continue;
          }
          tokens.push_back(tok);
          walk(step.state, tokens, s, tok);
          tokens.pop_back();
        }
      };
  Prefix tokens;
  walk({}, tokens, 0.0, Vocabulary::kSos);
  return best;
}

// Response decoder of a randomly initialised model over a fixed turn.
class ResponseDecoder {
 public:
  ResponseDecoder(uint64_t seed, const std::vector<corpus::Dialogue>& corpus,
                  const corpus::Vocabulary& vocab) {
    mamd::MamdConfig cfg = tiny_config(3);
    cfg.seed = seed;
    model_ = std::make_unique<mamd::MamdModel>(cfg, vocab.size());
    tape_ = std::make_unique<neural::Tape>(std::as_const(model_->params()));
    const auto& d = corpus[seed % corpus.size()];
    const auto& turn = d.turns[seed % d.turns.size()];
    mamd::TurnInputs in = mamd::make_turn_inputs(turn, vocab);
    enc_ = model_->encode_inputs(*tape_, in);
    mamd::MemoryBank bank =
        model_->encode_memory(*tape_, mamd::make_memory_input(some_candidates(corpus, 3), vocab));
    model_->force_belief(*tape_, enc_, in.belief);
    model_->force_action(*tape_, enc_, bank, in.db_class, in.action);
    copy_ = model_->response_copy_source(*tape_, enc_);
    h0_ = model_->initial_state(*tape_);
  }

  neural::NodeId initial() const { return h0_; }

  decoding::StepFn<neural::NodeId> step() {
    return [this](const neural::NodeId& h, int prev) {
      neural::StepOutput s = model_->response_step(*tape_, h, prev, enc_, copy_);
      auto p = tape_->value(s.dist);
      return decoding::Step<neural::NodeId>{{p.begin(), p.end()}, s.hidden};
    };
  }

 private:
  std::unique_ptr<mamd::MamdModel> model_;
  std::unique_ptr<neural::Tape> tape_;
  mamd::TurnEncoding enc_;
  neural::CopySource copy_;
  neural::NodeId h0_ = -1;
};

}  // namespace retmem::testing

#endif  // RETMEM_TESTS_SUPPORT_DECODE_MODELS_H_
