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

#include "neural/layers.h"

#include "common/error.h"
#include "common/rng.h"

namespace retmem::neural {

GruParams make_gru(ParamStore& store, const std::string& prefix, size_t input,
                   size_t hidden, Rng& rng) {
  GruParams g;
  g.input = input;
  g.hidden = hidden;
  g.wi = store.add_matrix(prefix + ".w_ih", 3 * hidden, input, rng);
  g.wh = store.add_matrix(prefix + ".w_hh", 3 * hidden, hidden, rng);
  g.bi = store.add_zeros(prefix + ".b_ih", 3 * hidden);
  g.bh = store.add_zeros(prefix + ".b_hh", 3 * hidden);
  return g;
}

BiGruEncoder BiGruEncoder::create(ParamStore& store, const std::string& prefix,
                                  ParamId embedding, size_t embed_dim,
                                  size_t hidden, Rng& rng) {
  BiGruEncoder e;
  e.embedding = embedding;
  e.hidden = hidden;
  e.fw = make_gru(store, prefix + ".fw", embed_dim, hidden, rng);
  e.bw = make_gru(store, prefix + ".bw", embed_dim, hidden, rng);
  e.proj_w = store.add_matrix(prefix + ".proj.w", hidden, 2 * hidden, rng);
  e.proj_b = store.add_zeros(prefix + ".proj.b", hidden);
  return e;
}

EncodedSeq bigru_encode(Tape& tape, const BiGruEncoder& enc,
                        std::span<const int> tokens) {
  static const int kPadOnly[] = {0};
  if (tokens.empty()) tokens = kPadOnly;
  const size_t L = tokens.size();
  std::vector<NodeId> emb(L), fw(L), bw(L);
  for (size_t i = 0; i < L; ++i) emb[i] = tape.param_row(enc.embedding, tokens[i]);
  NodeId h = tape.zeros(enc.hidden);
  for (size_t i = 0; i < L; ++i) fw[i] = h = tape.gru(enc.fw, emb[i], h);
  h = tape.zeros(enc.hidden);
  for (size_t i = L; i-- > 0;) bw[i] = h = tape.gru(enc.bw, emb[i], h);

  EncodedSeq out;
  out.seq.tokens.assign(tokens.begin(), tokens.end());
  out.seq.states.reserve(L);
  for (size_t i = 0; i < L; ++i) {
    NodeId both[] = {fw[i], bw[i]};
    out.seq.states.push_back(
        tape.linear(enc.proj_w, tape.concat(both), enc.proj_b));
  }
  NodeId ends[] = {fw[L - 1], bw[0]};
  out.summary = tape.linear(enc.proj_w, tape.concat(ends), enc.proj_b);
  return out;
}

NodeId cat_attn(Tape& tape, ParamId w, NodeId h, const HiddenSeq& seq) {
  return tape.cat_attn(w, h, seq.states);
}

Attn3 Attn3::create(ParamStore& store, const std::string& prefix,
                    size_t query_dim, size_t key_dim, Rng& rng) {
  Attn3 p;
  p.a = store.add_matrix(prefix + ".a", 1, query_dim + key_dim, rng);
  p.b = store.add_matrix(prefix + ".b", 1, query_dim + key_dim, rng);
  p.c = store.add_matrix(prefix + ".c", 1, query_dim + key_dim, rng);
  return p;
}

NodeId attn3(Tape& tape, const Attn3& p, NodeId h, const HiddenSeq& a,
             const HiddenSeq& b, const HiddenSeq& c) {
  NodeId parts[] = {cat_attn(tape, p.a, h, a), cat_attn(tape, p.b, h, b),
                    cat_attn(tape, p.c, h, c)};
  return tape.concat(parts);
}

CopyDecoder CopyDecoder::create(ParamStore& store, const std::string& prefix,
                                size_t input_dim, size_t hidden, size_t vocab,
                                size_t key_dim, Rng& rng) {
  CopyDecoder d;
  d.hidden = hidden;
  d.gru = make_gru(store, prefix + ".gru", input_dim, hidden, rng);
  d.wv = store.add_matrix(prefix + ".w_v", vocab, hidden, rng);
  d.wc = store.add_matrix(prefix + ".w_c", hidden, key_dim, rng);
  return d;
}

CopySource prepare_copy_source(Tape& tape, const CopyDecoder& dec,
                               const HiddenSeq& seq) {
  CopySource src;
  src.tokens = seq.tokens;
  src.keys.reserve(seq.size());
  for (NodeId s : seq.states) src.keys.push_back(tape.tanh(tape.linear(dec.wc, s)));
  return src;
}

StepOutput copy_decoder_step(Tape& tape, const CopyDecoder& dec,
                             NodeId context, NodeId h_prev,
                             const CopySource& source, CopyMode mode) {
  StepOutput out;
  out.hidden = tape.gru(dec.gru, context, h_prev);
  NodeId logits = tape.linear(dec.wv, out.hidden);
  out.dist = tape.copy_dist(logits, out.hidden, source.keys, source.tokens, mode);
  return out;
}

}  // namespace retmem::neural
