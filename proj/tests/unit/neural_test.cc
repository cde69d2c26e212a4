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
#include <limits>
#include <numeric>

#include "common/error.h"
#include "common/rng.h"
#include "doctest.h"
#include "neural/layers.h"
#include "neural/optim.h"
#include "neural/param_store.h"
#include "neural/serialize.h"
#include "neural/tape.h"
#include "training/grad_check.h"

namespace retmem::neural {
namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

HiddenSeq constant_seq(Tape& tape, Rng& rng, size_t len, size_t width) {
  HiddenSeq s;
  for (size_t i = 0; i < len; ++i) {
    auto v = random_vec(rng, width);
    s.states.push_back(tape.constant(v));
    s.tokens.push_back(static_cast<int>(5 + i));
  }
  return s;
}

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<double> copy_of(std::span<const double> v) { return {v.begin(), v.end()}; }

TEST_SUITE("neural") {

TEST_CASE("bidirectional encoder shapes and order sensitivity") {
  Rng rng(1);
  ParamStore store;
  ParamId emb = store.add_matrix("emb", 20, 4, rng);
  BiGruEncoder enc = BiGruEncoder::create(store, "enc", emb, 4, 6, rng);
  Tape tape(store);
  std::vector<int> toks = {5, 6, 7, 8, 9};
  EncodedSeq a = bigru_encode(tape, enc, toks);
  CHECK(a.seq.size() == 5);
  CHECK(a.seq.tokens == toks);
  for (NodeId s : a.seq.states) CHECK(tape.size(s) == 6);

  std::vector<int> rev(toks.rbegin(), toks.rend());
  EncodedSeq b = bigru_encode(tape, enc, rev);
  CHECK(copy_of(tape.value(a.summary)) != copy_of(tape.value(b.summary)));

  EncodedSeq e = bigru_encode(tape, enc, std::span<const int>{});
  CHECK(e.seq.size() == 1);
  CHECK(e.seq.tokens[0] == 0);

  EncodedSeq again = bigru_encode(tape, enc, toks);
  for (size_t i = 0; i < toks.size(); ++i) {
    CHECK(copy_of(tape.value(a.seq.states[i])) == copy_of(tape.value(again.seq.states[i])));
  }
}

TEST_CASE("encoder gradients match central differences") {
  Rng rng(2);
  ParamStore store;
  ParamId emb = store.add_matrix("emb", 12, 4, rng);
  BiGruEncoder enc = BiGruEncoder::create(store, "enc", emb, 4, 5, rng);
  ParamId w = store.add_matrix("attn", 1, 10, rng);
  std::vector<int> toks = {3, 7, 1, 9};
  auto report = training::grad_check(store, [&](Tape& tape) {
    EncodedSeq s = bigru_encode(tape, enc, toks);
    NodeId ctx = cat_attn(tape, w, s.summary, s.seq);
    std::vector<NodeId> parts = {tape.tanh(ctx), s.summary};
    NodeId all = tape.concat(parts);
    std::vector<NodeId> one = {tape.nll(tape.copy_dist(all, s.summary, {}, {}, CopyMode::kJoint), 2)};
    return tape.sum(one);
  });
  INFO(report.to_json().dump());
  CHECK(report.passed());
}

TEST_CASE("cat attention over one key returns that key") {
  Rng rng(3);
  ParamStore store;
  ParamId w = store.add_matrix("w", 1, 8, rng);
  Tape tape(store);
  HiddenSeq s = constant_seq(tape, rng, 1, 4);
  NodeId q = tape.constant(random_vec(rng, 4));
  NodeId out = cat_attn(tape, w, q, s);
  CHECK(copy_of(tape.value(out)) == copy_of(tape.value(s.states[0])));
  CHECK(tape.attention(out)[0] == 1.0);
}

TEST_CASE("cat attention is a convex combination") {
  Rng rng(4);
  ParamStore store;
  ParamId w = store.add_uniform("w", 1, 10, 3.0, rng);
  for (int trial = 0; trial < 200; ++trial) {
    Tape tape(store);
    const size_t len = 1 + rng.below(7);
    HiddenSeq s = constant_seq(tape, rng, len, 5);
    NodeId out = cat_attn(tape, w, tape.constant(random_vec(rng, 5)), s);
    auto alpha = tape.attention(out);
    REQUIRE(alpha.size() == len);
    CHECK(std::abs(sum_of(alpha) - 1.0) < 1e-12);
    for (double a : alpha) CHECK(a >= 0.0);
    for (size_t j = 0; j < 5; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (NodeId st : s.states) {
        lo = std::min(lo, tape.value(st)[j]);
        hi = std::max(hi, tape.value(st)[j]);
      }
      CHECK(tape.value(out)[j] >= lo - 1e-12);
      CHECK(tape.value(out)[j] <= hi + 1e-12);
    }
  }
}

TEST_CASE("attn3 concatenates three independent attentions") {
  Rng rng(5);
  ParamStore store;
  Attn3 p = Attn3::create(store, "a3", 100, 100, rng);
  Tape tape(store);
  HiddenSeq a = constant_seq(tape, rng, 3, 100);
  HiddenSeq b = constant_seq(tape, rng, 1, 100);
  HiddenSeq c = constant_seq(tape, rng, 5, 100);
  NodeId h = tape.constant(random_vec(rng, 100));
  NodeId out = attn3(tape, p, h, a, b, c);
  REQUIRE(tape.size(out) == 300);
  const ParamId ws[3] = {p.a, p.b, p.c};
  const HiddenSeq* seqs[3] = {&a, &b, &c};
  for (int part = 0; part < 3; ++part) {
    NodeId alone = cat_attn(tape, ws[part], h, *seqs[part]);
    for (size_t j = 0; j < 100; ++j) {
      CHECK(tape.value(out)[part * 100 + j] == tape.value(alone)[j]);
    }
  }
}

TEST_CASE("attn3 gradients match central differences") {
  Rng rng(6);
  ParamStore store;
  Attn3 p = Attn3::create(store, "a3", 4, 4, rng);
  ParamId h0 = store.add_matrix("h", 4, 1, rng);
  ParamId proj = store.add_matrix("proj", 7, 12, rng);
  std::vector<std::vector<double>> keys;
  for (int i = 0; i < 6; ++i) keys.push_back(random_vec(rng, 4));
  auto report = training::grad_check(store, [&](Tape& tape) {
    auto seq = [&](size_t from, size_t n) {
      HiddenSeq s;
      for (size_t i = from; i < from + n; ++i) {
        s.states.push_back(tape.constant(keys[i]));
        s.tokens.push_back(5);
      }
      return s;
    };
    NodeId out = attn3(tape, p, tape.param(h0), seq(0, 2), seq(2, 3), seq(5, 1));
    NodeId logits = tape.linear(proj, out);
    return tape.nll(tape.copy_dist(logits, tape.param(h0), {}, {}, CopyMode::kJoint), 3);
  });
  INFO(report.to_json().dump());
  CHECK(report.passed());
}

TEST_CASE("copy distributions are normalized in both modes") {
  Rng rng(7);
  for (CopyMode mode : {CopyMode::kJoint, CopyMode::kSeparate}) {
    for (int trial = 0; trial < 100; ++trial) {
      ParamStore store;
      Tape tape(store);
      const size_t vocab = 12;
      NodeId logits = tape.constant(random_vec(rng, vocab, 4.0));
      NodeId h = tape.constant(random_vec(rng, 3, 2.0));
      std::vector<NodeId> keys;
      std::vector<int> src;
      const size_t n = rng.below(5);
      for (size_t i = 0; i < n; ++i) {
        keys.push_back(tape.constant(random_vec(rng, 3)));
        src.push_back(static_cast<int>(rng.below(vocab)));
      }
      NodeId d = tape.copy_dist(logits, h, keys, src, mode);
      auto p = tape.value(d);
      CHECK(std::abs(sum_of(p) - 1.0) < 1e-12);
      for (double x : p) CHECK(x >= 0.0);
      const bool any_copy = std::any_of(src.begin(), src.end(), [](int t) { return t != 0; });
      if (mode == CopyMode::kSeparate) {
        CHECK(std::abs(tape.copy_mass(d) - (any_copy ? 2.0 : 1.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("copy mass only lands on source tokens") {
  for (CopyMode mode : {CopyMode::kJoint, CopyMode::kSeparate}) {
    ParamStore store;
    Tape tape(store);
    std::vector<double> flat(10, 0.0);
    NodeId logits = tape.constant(flat);
    NodeId h = tape.constant(std::vector<double>{1.0, 0.5});
    std::vector<NodeId> keys = {tape.constant(std::vector<double>{0.3, 0.1}),
                                tape.constant(std::vector<double>{0.2, -0.4}),
                                tape.constant(std::vector<double>{0.9, 0.9})};
    std::vector<int> src = {7, 7, 0};  // the pad position takes nothing
    auto p = tape.value(tape.copy_dist(logits, h, keys, src, mode));
    for (int w = 0; w < 10; ++w) {
      if (w == 7) continue;
      CHECK(p[7] > p[w]);
      CHECK(std::abs(p[w] - p[1]) < 1e-15);
    }
  }
}

TEST_CASE("constant loss leaves zero gradients; accumulation is linear") {
  Rng rng(8);
  ParamStore store;
  ParamId w = store.add_matrix("w", 5, 3, rng);
  {
    Tape tape(store);
    NodeId c = tape.constant(std::vector<double>{1.5});
    tape.linear(w, tape.constant(random_vec(rng, 3)));
    tape.backward(c);
    for (double g : store[w].grad) CHECK(g == 0.0);
  }
  auto x = random_vec(rng, 3);
  auto run = [&]() {
    Tape tape(store);
    NodeId logits = tape.linear(w, tape.constant(x));
    tape.backward(tape.nll(tape.copy_dist(logits, logits, {}, {}, CopyMode::kJoint), 1));
  };
  run();
  auto once = store[w].grad;
  run();
  for (size_t i = 0; i < once.size(); ++i) CHECK(store[w].grad[i] == doctest::Approx(2 * once[i]).epsilon(1e-12));
}

TEST_CASE("non-finite loss is rejected") {
  ParamStore store;
  Tape tape(store);
  NodeId bad = tape.constant(std::vector<double>{std::nan("")});
  CHECK_THROWS_AS(tape.backward(bad), NumericError);
  const ParamStore& cstore = store;
  Tape frozen(cstore);
  CHECK_THROWS(frozen.backward(frozen.constant(std::vector<double>{1.0})));
}

TEST_CASE("bce with logits against its closed form") {
  ParamStore store;
  Tape tape(store);
  std::vector<double> z = {-2.0, 0.0, 3.0};
  std::vector<double> y = {0.0, 1.0, 1.0};
  double expect = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-z[i]));
    expect -= y[i] * std::log(s) + (1 - y[i]) * std::log(1 - s);
  }
  CHECK(tape.scalar(tape.bce_with_logits(tape.constant(z), y)) ==
        doctest::Approx(expect / 3).epsilon(1e-12));
}

TEST_CASE("adam moves against the gradient and clipping bounds the norm") {
  Rng rng(9);
  ParamStore store;
  ParamId w = store.add_zeros("w", 3);
  store[w].grad = {1.0, -2.0, 0.0};
  Adam opt(0.1);
  opt.step(store);
  CHECK(store[w].value[0] == doctest::Approx(-0.1));
  CHECK(store[w].value[1] == doctest::Approx(0.1));
  CHECK(store[w].value[2] == 0.0);
  CHECK(opt.steps() == 1);

  store[w].grad = {3.0, 4.0, 0.0};
  CHECK(grad_norm(store) == doctest::Approx(5.0));
  CHECK(clip_grad_norm(store, 1.0) == doctest::Approx(5.0));
  CHECK(grad_norm(store) == doctest::Approx(1.0));
  CHECK(clip_grad_norm(store, 10.0) == doctest::Approx(1.0));
  CHECK(grad_norm(store) == doctest::Approx(1.0));
}

TEST_CASE("array files round trip and reject damage") {
  Rng rng(10);
  ParamStore store;
  store.add_matrix("a", 3, 4, rng);
  store.add_zeros("b", 2);
  ArrayFile f{{{"kind", "test"}}, export_params(store)};
  const std::string bytes = encode_array_file(f);
  ArrayFile g = decode_array_file(bytes);
  CHECK(g.meta == f.meta);
  CHECK(encode_array_file(g) == bytes);

  ParamStore other;
  Rng rng2(99);
  other.add_matrix("a", 3, 4, rng2);
  other.add_zeros("b", 2);
  import_params(other, g.arrays);
  CHECK(other.same_values(store));

  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  CHECK_THROWS_AS(decode_array_file(flipped), ParseError);
  CHECK_THROWS_AS(decode_array_file(bytes.substr(0, bytes.size() - 3)), ParseError);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_array_file(magic), ParseError);

  ParamStore wrong;
  Rng rng3(1);
  wrong.add_matrix("a", 4, 3, rng3);
  wrong.add_zeros("b", 2);
  auto before = wrong.fingerprint();
  CHECK_THROWS(import_params(wrong, g.arrays));
  CHECK(wrong.fingerprint() == before);
}

}  // TEST_SUITE

}  // namespace
}  // namespace retmem::neural
