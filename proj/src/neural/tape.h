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

#ifndef RETMEM_NEURAL_TAPE_H_
#define RETMEM_NEURAL_TAPE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "neural/param_store.h"

namespace retmem::neural {

using NodeId = int32_t;

inline constexpr double kProbFloor = 1e-12;

struct GruParams {
  ParamId wi = kNoParam;  // 3H x I, gate order r, z, n
  ParamId wh = kNoParam;  // 3H x H
  ParamId bi = kNoParam;  // 3H
  ParamId bh = kNoParam;  // 3H
  size_t input = 0;
  size_t hidden = 0;
};

// How the vocabulary and copy scores are merged into one distribution.
enum class CopyMode {
  // One softmax over [vocab logits ; copy scores], copy mass scattered onto
  // source tokens.
  kJoint,
  // Two independent softmaxes summed (total mass 2, or 1 with no copyable
  // positions) and divided by their total mass.
  kSeparate,
};

// Reverse-mode tape over the fixed set of operations the model needs. Nodes
// are vectors; scalars are size-1 vectors. A tape is built per forward pass
// and discarded afterwards.
class Tape {
 public:
  // Gradients flow into `params` on backward().
  explicit Tape(ParamStore& params);
  // Forward-only; backward() throws.
  explicit Tape(const ParamStore& params);

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  NodeId constant(std::span<const double> v);
  NodeId zeros(size_t n);
  NodeId param(ParamId p);
  NodeId param_row(ParamId p, size_t row);
  // W x (+ b)
  NodeId linear(ParamId w, NodeId x, ParamId b = kNoParam);
  NodeId gru(const GruParams& g, NodeId x, NodeId h);
  NodeId concat(std::span<const NodeId> parts);
  NodeId add(NodeId a, NodeId b);
  NodeId tanh(NodeId x);
  // Concat attention: score_i = tanh(w . [query ; key_i]), softmax over i,
  // output sum_i alpha_i key_i. `w` is a 1 x (|query| + |key|) parameter.
  NodeId cat_attn(ParamId w, NodeId query, std::span<const NodeId> keys);
  // Copy-augmented output distribution over the vocabulary. copy_keys[i] is
  // tanh(W_c H_i); its score is h . copy_keys[i]. Positions whose source
  // token is `masked_token` take no copy mass.
  NodeId copy_dist(NodeId vocab_logits, NodeId h,
                   std::span<const NodeId> copy_keys,
                   std::span<const int> source_tokens, CopyMode mode,
                   int masked_token = 0);
  // -log(max(p[target], kProbFloor))
  NodeId nll(NodeId dist, int target);
  NodeId sum(std::span<const NodeId> scalars);
  NodeId mean(std::span<const NodeId> scalars);
  NodeId scale(NodeId x, double factor);
  // Mean binary cross-entropy of sigmoid(logits) against 0/1 labels.
  NodeId bce_with_logits(NodeId logits, std::span<const double> labels);

  std::span<const double> value(NodeId n) const;
  double scalar(NodeId n) const { return value(n)[0]; }
  size_t size(NodeId n) const { return nodes_[n].size; }
  // Attention weights of a cat_attn node.
  std::span<const double> attention(NodeId n) const;
  // Pre-normalization total mass of a copy_dist node.
  double copy_mass(NodeId n) const;
  bool is_attention(NodeId n) const;
  bool is_distribution(NodeId n) const;
  // Valid after backward().
  std::span<const double> grad(NodeId n) const;

  // Accumulates d(loss)/d(param) into the ParamStore gradient slots.
  // Throws NumericError if the loss is not finite.
  void backward(NodeId loss);

  size_t num_nodes() const { return nodes_.size(); }

 private:
  enum class Op : uint8_t {
    kConst,
    kParam,
    kParamRow,
    kLinear,
    kGru,
    kConcat,
    kAdd,
    kTanh,
    kCatAttn,
    kCopyDist,
    kNll,
    kSum,
    kScale,
    kBce,
  };

  struct Node {
    Op op;
    int32_t size = 0;
    int64_t val = 0;
    int64_t aux = 0;
    int32_t aux_size = 0;
    NodeId a = -1;
    NodeId b = -1;
    ParamId p[4] = {kNoParam, kNoParam, kNoParam, kNoParam};
    int64_t list = 0;
    int32_t list_len = 0;
    int64_t list2 = 0;
    int32_t extra = 0;
    int32_t extra2 = 0;
    double factor = 0.0;
  };

  NodeId push(Node n);
  int64_t alloc(size_t n);
  int64_t alloc_aux(size_t n);
  int64_t store_ints(std::span<const int> ints);
  double* val_ptr(NodeId n) { return values_.data() + nodes_[n].val; }
  const double* val_ptr(NodeId n) const { return values_.data() + nodes_[n].val; }
  double* grad_ptr(NodeId n) { return grads_.data() + nodes_[n].val; }
  const Param& par(ParamId p) const { return (*cparams_)[p]; }
  Param& mpar(ParamId p) { return (*params_)[p]; }

  void backward_node(NodeId id);

  ParamStore* params_ = nullptr;
  const ParamStore* cparams_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> aux_;
  std::vector<int32_t> ints_;
  std::vector<double> grads_;
};

}  // namespace retmem::neural

#endif  // RETMEM_NEURAL_TAPE_H_
