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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.h"
#include "common/rng.h"
#include "corpus/vocab.h"
#include "doctest.h"
#include "mamd/model.h"
#include "neural/optim.h"
#include "support/fixtures.h"
#include "training/grad_check.h"
#include "training/trainer.h"

namespace retmem::mamd {
namespace {

using corpus::Vocabulary;

std::vector<double> vals(const Tape& tape, NodeId n) {
  auto v = tape.value(n);
  return {v.begin(), v.end()};
}

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

struct Fixture {
  std::vector<corpus::Dialogue> corpus = testing::small_corpus(4);
  Vocabulary vocab = testing::vocab_for(corpus);
};

carm::CandidateSet from_actions(const std::vector<corpus::SystemAction>& actions) {
  carm::CandidateSet s;
  for (const auto& a : actions) {
    s.actions.push_back(a);
    s.provenance.push_back(a.empty() ? carm::Provenance::kNullPad : carm::Provenance::kRetrieved);
    s.distances.push_back(0.0);
  }
  return s;
}

TEST_SUITE("mamd") {

TEST_CASE("input encodings have one state per token and a pad first turn") {
  Fixture f;
  MamdModel model(testing::tiny_config(), f.vocab.size());
  TurnInputs first = make_turn_inputs(f.corpus[0].turns[0], f.vocab);
  TurnInputs later = make_turn_inputs(f.corpus[0].turns[2], f.vocab);
  CHECK(first.prev_response.empty());
  CHECK(first.prev_belief.empty());
  Tape tape(std::as_const(model.params()));
  TurnEncoding a = model.encode_inputs(tape, first);
  CHECK(a.prev_response.size() == 1);
  CHECK(a.prev_response.tokens[0] == Vocabulary::kPad);
  CHECK(a.user.size() == first.user.size());
  TurnEncoding b = model.encode_inputs(tape, later);
  CHECK(b.prev_response.size() == later.prev_response.size());
  CHECK(b.prev_belief.size() == later.prev_belief.size());
  TurnEncoding c = model.encode_inputs(tape, later);
  for (size_t i = 0; i < b.user.size(); ++i) {
    CHECK(vals(tape, b.user.states[i]) == vals(tape, c.user.states[i]));
  }
}

TEST_CASE("memory bank has k slots and respects identity and null padding") {
  Fixture f;
  MamdModel model(testing::tiny_config(9), f.vocab.size());
  auto set = testing::some_candidates(f.corpus, 9);
  set.actions[1] = set.actions[0];
  MemoryInput mem = make_memory_input(set, f.vocab);
  Tape tape(std::as_const(model.params()));
  MemoryBank bank = model.encode_memory(tape, mem);
  REQUIRE(bank.vectors.size() == 9);
  CHECK(vals(tape, bank.vectors.states[0]) == vals(tape, bank.vectors.states[1]));
  const auto& null_param = model.params()[model.params().id("memory.null")].value;
  for (size_t i = 0; i < 9; ++i) {
    CHECK(bank.null_mask[i] == (set.provenance[i] == carm::Provenance::kNullPad));
    if (bank.null_mask[i]) CHECK(vals(tape, bank.vectors.states[i]) == null_param);
  }
}

TEST_CASE("permuting candidates permutes memory and attention, not the summary") {
  Fixture f;
  MamdModel model(testing::tiny_config(5), f.vocab.size());
  auto pool = training::action_pool(f.corpus);
  std::vector<corpus::SystemAction> acts = {pool[0], pool[3], {}, pool[5], pool[7]};
  std::vector<size_t> perm = {3, 0, 4, 2, 1};
  std::vector<corpus::SystemAction> shuffled;
  for (size_t i : perm) shuffled.push_back(acts[i]);

  Tape tape(std::as_const(model.params()));
  MemoryBank a = model.encode_memory(tape, make_memory_input(from_actions(acts), f.vocab));
  MemoryBank b = model.encode_memory(tape, make_memory_input(from_actions(shuffled), f.vocab));
  for (size_t j = 0; j < perm.size(); ++j) {
    CHECK(vals(tape, b.vectors.states[j]) == vals(tape, a.vectors.states[perm[j]]));
  }
  std::vector<double> h(model.config().hidden, 0.1);
  NodeId hn = tape.constant(h);
  NodeId va = model.memory_query(tape, hn, a);
  NodeId vb = model.memory_query(tape, hn, b);
  auto alpha_a = tape.attention(va);
  auto alpha_b = tape.attention(vb);
  for (size_t j = 0; j < perm.size(); ++j) {
    CHECK(alpha_b[j] == doctest::Approx(alpha_a[perm[j]]).epsilon(1e-14));
  }
  auto x = vals(tape, va), y = vals(tape, vb);
  for (size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("memory query over one slot is that slot; otherwise convex") {
  Fixture f;
  MamdModel one(testing::tiny_config(1), f.vocab.size());
  Tape t1(std::as_const(one.params()));
  MemoryBank b1 = one.encode_memory(t1, make_memory_input(testing::some_candidates(f.corpus, 1), f.vocab));
  NodeId v1 = one.memory_query(t1, one.initial_state(t1), b1);
  CHECK(vals(t1, v1) == vals(t1, b1.vectors.states[0]));

  MamdModel model(testing::tiny_config(6), f.vocab.size());
  Tape tape(std::as_const(model.params()));
  MemoryBank bank =
      model.encode_memory(tape, make_memory_input(testing::some_candidates(f.corpus, 6), f.vocab));
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> h(model.config().hidden);
    for (auto& x : h) x = rng.uniform(-1, 1);
    NodeId v = model.memory_query(tape, tape.constant(h), bank);
    CHECK(std::abs(sum_of(tape.attention(v)) - 1.0) < 1e-12);
    for (double a : tape.attention(v)) CHECK(a >= 0.0);
    for (size_t j = 0; j < h.size(); ++j) {
      double lo = 1e300, hi = -1e300;
      for (NodeId m : bank.vectors.states) {
        lo = std::min(lo, tape.value(m)[j]);
        hi = std::max(hi, tape.value(m)[j]);
      }
      CHECK(tape.value(v)[j] >= lo - 1e-12);
      CHECK(tape.value(v)[j] <= hi + 1e-12);
    }
  }
}

TEST_CASE("sample_memory boundaries and replacement frequency") {
  Fixture f;
  auto pool = training::action_pool(f.corpus);
  auto retrieved = testing::some_candidates(f.corpus, 4);
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    auto same = sample_memory(retrieved, pool, 0.0, 4, rng);
    CHECK(same.actions == retrieved.actions);
    auto rand = sample_memory(retrieved, pool, 1.0, 4, rng);
    CHECK(rand.size() == 4);
    CHECK(rand.count(carm::Provenance::kRandom) == 4);
  }
  size_t replaced = 0;
  Rng mc(22);
  for (int i = 0; i < 10000; ++i) {
    auto s = sample_memory(retrieved, pool, 0.8, 4, mc);
    replaced += s.count(carm::Provenance::kRandom) == 4;
  }
  const double freq = replaced / 10000.0;
  CHECK(freq > 0.78);
  CHECK(freq < 0.82);
  CHECK_THROWS_AS(sample_memory(retrieved, pool, 1.5, 4, mc), InvalidArgument);
}

TEST_CASE("decoder steps emit distributions; first state is zero") {
  Fixture f;
  MamdModel model(testing::tiny_config(), f.vocab.size());
  TurnInputs in = make_turn_inputs(f.corpus[1].turns[2], f.vocab);
  Tape tape(std::as_const(model.params()));
  TurnEncoding enc = model.encode_inputs(tape, in);
  NodeId h0 = model.initial_state(tape);
  for (double x : tape.value(h0)) CHECK(x == 0.0);
  StepOutput b = model.belief_step(tape, h0, Vocabulary::kSos, enc, model.belief_copy_source(tape, enc));
  CHECK(std::abs(sum_of(tape.value(b.dist)) - 1.0) < 1e-12);
  CHECK(tape.size(b.dist) == f.vocab.size());
  model.force_belief(tape, enc, in.belief);
  CHECK(enc.belief.size() == in.belief.size() + 1);
  CHECK(enc.belief.tokens[0] == Vocabulary::kPad);
  MemoryBank bank = model.encode_memory(tape, make_memory_input(testing::some_candidates(f.corpus, 3), f.vocab));
  ActionStepOutput a = model.action_step(tape, h0, Vocabulary::kSos, 1, enc, bank, model.action_copy_source(tape, enc));
  CHECK(std::abs(sum_of(tape.value(a.step.dist)) - 1.0) < 1e-12);
  CHECK(tape.attention(a.memory_attention).size() == 3);
  model.force_action(tape, enc, bank, in.db_class, in.action);
  CHECK(enc.action.size() == in.action.size() + 1);
  StepOutput r1 = model.response_step(tape, h0, Vocabulary::kSos, enc, model.response_copy_source(tape, enc));
  StepOutput r2 = model.response_step(tape, h0, Vocabulary::kSos, enc, model.response_copy_source(tape, enc));
  CHECK(vals(tape, r1.dist) == vals(tape, r2.dist));
  CHECK(std::abs(sum_of(tape.value(r1.dist)) - 1.0) < 1e-12);
}

TEST_CASE("the database class reaches the action distribution") {
  Fixture f;
  MamdModel model(testing::tiny_config(), f.vocab.size());
  TurnInputs in = make_turn_inputs(f.corpus[0].turns[1], f.vocab);
  Tape tape(std::as_const(model.params()));
  TurnEncoding enc = model.encode_inputs(tape, in);
  model.force_belief(tape, enc, in.belief);
  MemoryBank bank = model.encode_memory(tape, make_memory_input(testing::some_candidates(f.corpus, 3), f.vocab));
  CopySource copy = model.action_copy_source(tape, enc);
  NodeId h0 = model.initial_state(tape);
  auto d0 = vals(tape, model.action_step(tape, h0, Vocabulary::kSos, 0, enc, bank, copy).step.dist);
  auto d4 = vals(tape, model.action_step(tape, h0, Vocabulary::kSos, 4, enc, bank, copy).step.dist);
  CHECK(d0 != d4);
}

TEST_CASE("previous belief tokens receive copy mass") {
  Fixture f;
  MamdModel model(testing::tiny_config(), f.vocab.size());
  auto& wv = model.params()[model.params().id("belief_dec.w_v")].value;
  std::fill(wv.begin(), wv.end(), 0.0);
  TurnInputs in = make_turn_inputs(f.corpus[0].turns[2], f.vocab);
  REQUIRE(!in.prev_belief.empty());
  Tape tape(std::as_const(model.params()));
  TurnEncoding enc = model.encode_inputs(tape, in);
  StepOutput s = model.belief_step(tape, model.initial_state(tape), Vocabulary::kSos, enc,
                                   model.belief_copy_source(tape, enc));
  auto p = tape.value(s.dist);
  const double floor = *std::min_element(p.begin(), p.end());
  for (int id : in.prev_belief) CHECK(p[id] > floor);
  for (size_t w = 0; w < p.size(); ++w) {
    if (std::find(in.prev_belief.begin(), in.prev_belief.end(), static_cast<int>(w)) ==
        in.prev_belief.end()) {
      CHECK(p[w] == doctest::Approx(floor).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint loss is the exact sum of its parts and matches finite differences") {
  Fixture f;
  for (auto mode : {neural::CopyMode::kJoint, neural::CopyMode::kSeparate}) {
    MamdConfig cfg = testing::tiny_config();
    cfg.copy_mode = mode;
    MamdModel model(cfg, f.vocab.size());
    TurnInputs in = make_turn_inputs(f.corpus[2].turns[1], f.vocab);
    MemoryInput mem = make_memory_input(testing::some_candidates(f.corpus, 3), f.vocab);
    Tape tape(model.params());
    LossNodes l = model.joint_loss(tape, in, mem);
    CHECK(tape.scalar(l.total) ==
          tape.scalar(l.belief) + tape.scalar(l.action) + tape.scalar(l.response));
    auto report = training::grad_check(model.params(), [&](Tape& t) {
      return model.joint_loss(t, in, mem).total;
    });
    INFO(report.to_json().dump());
    CHECK(report.passed());
  }
}

TEST_CASE("a single turn is memorised within 200 steps") {
  auto corpus = testing::small_corpus(1, 3);
  corpus[0].turns.resize(1);
  auto vocab = testing::vocab_for(corpus);
  MamdConfig cfg;
  cfg.k = 2;
  cfg.sampling_p = 0.0;
  MamdModel model(cfg, vocab.size());
  carm::CandidateMap cands;
  cands[{corpus[0].dialogue_id, 1}] = testing::some_candidates(corpus, 2);
  training::TrainConfig tc;
  tc.batch_size = 1;
  tc.k = 2;
  tc.sampling_p = 0.0;
  tc.epochs = 200;
  tc.max_steps = 200;
  auto result = training::train(model, vocab, corpus, cands, tc);
  CHECK(result.steps == 200);
  Tape tape(model.params());
  LossNodes l = model.joint_loss(tape, make_turn_inputs(corpus[0].turns[0], vocab),
                                 make_memory_input(cands.begin()->second, vocab));
  CHECK(tape.scalar(l.total) < 0.05);
}

TEST_CASE("after overfitting, memory attention favours the gold candidate") {
  // Copies of one turn that differ only in the gold action, so the bank is
  // the only place the answer can come from. Noise slots are redrawn every
  // step.
  auto base = testing::small_corpus(3, 8);
  auto vocab = testing::vocab_for(base);
  auto pool = training::action_pool(base);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::vector<corpus::Turn> turns;
  for (size_t i = 0; i < 4; ++i) {
    corpus::Turn t = base[0].turns[0];
    t.action = pool[i];
    turns.push_back(t);
  }
  const size_t k = 3;
  MamdConfig cfg = testing::tiny_config(k);
  cfg.embed_dim = 16;
  cfg.hidden = 24;
  cfg.seed = 2;
  MamdModel model(cfg, vocab.size());
  Rng rng(2);
  auto bank_for = [&](const corpus::Turn& t, size_t& gold) {
    std::vector<corpus::SystemAction> slots;
    gold = rng.below(k);
    for (size_t i = 0; i < k; ++i) {
      corpus::SystemAction a = t.action;
      while (i != gold && a == t.action) a = rng.pick(pool);
      slots.push_back(a);
    }
    return from_actions(slots);
  };
  neural::Adam adam(0.01);
  for (int step = 0; step < 1000; ++step) {
    model.params().zero_grad();
    for (int b = 0; b < 2; ++b) {
      const corpus::Turn& t = turns[rng.below(turns.size())];
      size_t gold = 0;
      auto set = bank_for(t, gold);
      Tape tape(model.params());
      tape.backward(model.joint_loss(tape, make_turn_inputs(t, vocab), make_memory_input(set, vocab)).total);
    }
    adam.step(model.params());
  }

  double gold_mass = 0.0, noise_mass = 0.0;
  for (int pass = 0; pass < 5; ++pass) {
    for (const auto& t : turns) {
      size_t gold = 0;
      auto set = bank_for(t, gold);
      TurnInputs in = make_turn_inputs(t, vocab);
      Tape tape(std::as_const(model.params()));
      TurnEncoding enc = model.encode_inputs(tape, in);
      model.force_belief(tape, enc, in.belief);
      MemoryBank bank = model.encode_memory(tape, make_memory_input(set, vocab));
      CopySource copy = model.action_copy_source(tape, enc);
      NodeId h = model.initial_state(tape);
      int prev = Vocabulary::kSos;
      std::vector<int> gold_tokens = in.action;
      gold_tokens.push_back(Vocabulary::kEos);
      for (int tok : gold_tokens) {
        ActionStepOutput out = model.action_step(tape, h, prev, in.db_class, enc, bank, copy);
        auto alpha = tape.attention(out.memory_attention);
        for (size_t i = 0; i < k; ++i) {
          (i == gold ? gold_mass : noise_mass) += i == gold ? alpha[i] : alpha[i] / (k - 1);
        }
        h = out.step.hidden;
        prev = tok;
      }
    }
  }
  INFO("gold " << gold_mass << " mean noise " << noise_mass);
  CHECK(gold_mass > noise_mass);
}

TEST_CASE("config validation and json round trip") {
  MamdConfig c;
  c.copy_mode = neural::CopyMode::kSeparate;
  c.k = 4;
  MamdConfig back = MamdConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  MamdConfig bad;
  bad.sampling_p = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = MamdConfig{};
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  nlohmann::json j = {{"copy_mode", "sideways"}};
  CHECK_THROWS(MamdConfig::from_json(j));
}

}  // TEST_SUITE

}  // namespace
}  // namespace retmem::mamd
