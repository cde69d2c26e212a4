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

#ifndef RETMEM_DECODING_SEARCH_H_
#define RETMEM_DECODING_SEARCH_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "common/error.h"
#include "corpus/vocab.h"

namespace retmem::decoding {

struct Hypothesis {
  std::vector<int> tokens;  // without <eos>
  double logprob = 0.0;
  // Ended with <eos> (true) or stopped at max_len (false).
  bool finished = false;
};

template <class State>
struct Step {
  std::vector<double> probs;
  State state;
};

template <class State>
using StepFn = std::function<Step<State>(const State&, int prev_token)>;

namespace internal {

inline bool emittable(int token) {
  return token != corpus::Vocabulary::kPad && token != corpus::Vocabulary::kSos;
}

inline double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

// Higher score first, then lexicographically smaller tokens.
inline bool better(double sa, const std::vector<int>& ta, double sb,
                   const std::vector<int>& tb) {
  if (sa != sb) return sa > sb;
  return ta < tb;
}

}  // namespace internal

// Argmax every step with ties to the lowest id; <pad> and <sos> are never
// emitted. `on_token` sees each emitted token with the state it produced.
template <class State>
Hypothesis greedy_decode(const StepFn<State>& step, const State& init,
                         size_t max_len,
                         const std::function<void(int, const State&)>& on_token = {}) {
  if (max_len < 1) RETMEM_THROW(InvalidArgument, "max_len must be >= 1");
  Hypothesis h;
  State state = init;
  int prev = corpus::Vocabulary::kSos;
  for (size_t t = 0; t < max_len; ++t) {
    Step<State> s = step(state, prev);
    int best = -1;
    for (size_t i = 0; i < s.probs.size(); ++i) {
      if (!internal::emittable(static_cast<int>(i))) continue;
      if (best < 0 || s.probs[i] > s.probs[best]) best = static_cast<int>(i);
    }
    h.logprob += internal::safe_log(s.probs[best]);
    if (best == corpus::Vocabulary::kEos) {
      h.finished = true;
      return h;
    }
    h.tokens.push_back(best);
    state = std::move(s.state);
    if (on_token) on_token(best, state);
    prev = best;
  }
  return h;
}

// Length-unnormalized beam search. Hypotheses that emit <eos> are set aside;
// the result is the best finished hypothesis, or the best unfinished one at
// max_len when nothing finished or it scores higher.
template <class State>
Hypothesis beam_search(const StepFn<State>& step, const State& init,
                       size_t beam, size_t max_len) {
  if (beam < 1) RETMEM_THROW(InvalidArgument, "beam must be >= 1");
  if (max_len < 1) RETMEM_THROW(InvalidArgument, "max_len must be >= 1");
  struct Live {
    Hypothesis hyp;
    State state;
  };
  struct Cand {
    size_t parent;
    int token;
    double score;
    std::vector<int> tokens;  // including the new token
  };
  std::vector<Live> live = {{Hypothesis{}, init}};
  std::vector<Hypothesis> done;

  for (size_t t = 0; t < max_len && !live.empty(); ++t) {
    std::vector<Step<State>> steps;
    std::vector<Cand> cands;
    for (size_t b = 0; b < live.size(); ++b) {
      const int prev = live[b].hyp.tokens.empty() ? corpus::Vocabulary::kSos
                                                  : live[b].hyp.tokens.back();
      steps.push_back(step(live[b].state, prev));
      const std::vector<double>& probs = steps.back().probs;
      for (size_t i = 0; i < probs.size(); ++i) {
        if (!internal::emittable(static_cast<int>(i))) continue;
        Cand c{b, static_cast<int>(i),
               live[b].hyp.logprob + internal::safe_log(probs[i]),
               live[b].hyp.tokens};
        c.tokens.push_back(c.token);
        cands.push_back(std::move(c));
      }
    }
    const size_t m = std::min(beam, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(m),
                      cands.end(), [](const Cand& a, const Cand& b) {
                        return internal::better(a.score, a.tokens, b.score, b.tokens);
                      });
    std::vector<Live> next;
    for (size_t i = 0; i < m; ++i) {
      Cand& c = cands[i];
      if (c.token == corpus::Vocabulary::kEos) {
        c.tokens.pop_back();
        done.push_back({std::move(c.tokens), c.score, true});
      } else {
        next.push_back({{std::move(c.tokens), c.score, false}, steps[c.parent].state});
      }
    }
    live = std::move(next);
    // Scores only fall as hypotheses grow, so nothing live can overtake the
    // best finished one.
    if (!done.empty() && !live.empty()) {
      double best_done = done[0].logprob;
      for (const Hypothesis& h : done) best_done = std::max(best_done, h.logprob);
      double best_live = live[0].hyp.logprob;
      for (const Live& l : live) best_live = std::max(best_live, l.hyp.logprob);
      if (best_done >= best_live) live.clear();
    }
  }
  std::vector<Hypothesis> pool = std::move(done);
  for (Live& l : live) pool.push_back(std::move(l.hyp));
  Hypothesis best = pool[0];
  for (const Hypothesis& h : pool) {
    if (internal::better(h.logprob, h.tokens, best.logprob, best.tokens)) best = h;
  }
  return best;
}

}  // namespace retmem::decoding

#endif  // RETMEM_DECODING_SEARCH_H_
