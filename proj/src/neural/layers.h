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

#ifndef RETMEM_NEURAL_LAYERS_H_
#define RETMEM_NEURAL_LAYERS_H_

#include <span>
#include <string>
#include <vector>

#include "neural/param_store.h"
#include "neural/tape.h"

namespace retmem {
class Rng;
}

namespace retmem::neural {

// Hidden vectors plus the token ids they encode (the copy source).
struct HiddenSeq {
  std::vector<NodeId> states;
  std::vector<int> tokens;

  size_t size() const { return states.size(); }
};

GruParams make_gru(ParamStore& store, const std::string& prefix, size_t input,
                   size_t hidden, Rng& rng);

struct BiGruEncoder {
  ParamId embedding = kNoParam;
  GruParams fw;
  GruParams bw;
  ParamId proj_w = kNoParam;  // hidden x 2*hidden
  ParamId proj_b = kNoParam;
  size_t hidden = 0;

  static BiGruEncoder create(ParamStore& store, const std::string& prefix,
                             ParamId embedding, size_t embed_dim,
                             size_t hidden, Rng& rng);
};

struct EncodedSeq {
  HiddenSeq seq;
  // Projection of [last forward state ; first backward state].
  NodeId summary = -1;
};

// Position i -> proj([fw_i ; bw_i]). An empty input is encoded as a single
// pad token.
EncodedSeq bigru_encode(Tape& tape, const BiGruEncoder& enc,
                        std::span<const int> tokens);

NodeId cat_attn(Tape& tape, ParamId w, NodeId h, const HiddenSeq& seq);

struct Attn3 {
  ParamId a = kNoParam;
  ParamId b = kNoParam;
  ParamId c = kNoParam;

  static Attn3 create(ParamStore& store, const std::string& prefix,
                      size_t query_dim, size_t key_dim, Rng& rng);
};

// [cat_attn(h, A) ; cat_attn(h, B) ; cat_attn(h, C)]
NodeId attn3(Tape& tape, const Attn3& p, NodeId h, const HiddenSeq& a,
             const HiddenSeq& b, const HiddenSeq& c);

struct CopyDecoder {
  GruParams gru;
  ParamId wv = kNoParam;  // vocab x hidden
  ParamId wc = kNoParam;  // hidden x key_dim
  size_t hidden = 0;

  static CopyDecoder create(ParamStore& store, const std::string& prefix,
                            size_t input_dim, size_t hidden, size_t vocab,
                            size_t key_dim, Rng& rng);
};

// tanh(W_c H_i) per position; independent of the decoder state, so computed
// once per sequence.
struct CopySource {
  std::vector<NodeId> keys;
  std::vector<int> tokens;
};

CopySource prepare_copy_source(Tape& tape, const CopyDecoder& dec,
                               const HiddenSeq& seq);

struct StepOutput {
  NodeId dist = -1;
  NodeId hidden = -1;
};

StepOutput copy_decoder_step(Tape& tape, const CopyDecoder& dec,
                             NodeId context, NodeId h_prev,
                             const CopySource& source, CopyMode mode);

}  // namespace retmem::neural

#endif  // RETMEM_NEURAL_LAYERS_H_
