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

#include "neural/tape.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace retmem::neural {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using CMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tape::Tape(ParamStore& params) : params_(&params), cparams_(&params) {
  nodes_.reserve(1024);
  values_.reserve(1 << 16);
}

Tape::Tape(const ParamStore& params) : cparams_(&params) {
  nodes_.reserve(1024);
  values_.reserve(1 << 16);
}

NodeId Tape::push(Node n) {
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

int64_t Tape::alloc(size_t n) {
  int64_t off = static_cast<int64_t>(values_.size());
  values_.resize(values_.size() + n, 0.0);
  return off;
}

int64_t Tape::alloc_aux(size_t n) {
  int64_t off = static_cast<int64_t>(aux_.size());
  aux_.resize(aux_.size() + n, 0.0);
  return off;
}

int64_t Tape::store_ints(std::span<const int> ints) {
  int64_t off = static_cast<int64_t>(ints_.size());
  ints_.insert(ints_.end(), ints.begin(), ints.end());
  return off;
}

std::span<const double> Tape::value(NodeId n) const {
  return {val_ptr(n), static_cast<size_t>(nodes_[n].size)};
}

std::span<const double> Tape::attention(NodeId n) const {
  const Node& node = nodes_[n];
  if (node.op != Op::kCatAttn) {
    RETMEM_THROW(InvalidArgument, "node " << n << " is not an attention node");
  }
  return {aux_.data() + node.aux, static_cast<size_t>(node.list_len)};
}

double Tape::copy_mass(NodeId n) const {
  const Node& node = nodes_[n];
  if (node.op != Op::kCopyDist) {
    RETMEM_THROW(InvalidArgument, "node " << n << " is not a copy node");
  }
  return aux_[node.aux + node.aux_size - 1];
}

bool Tape::is_attention(NodeId n) const { return nodes_.at(n).op == Op::kCatAttn; }

bool Tape::is_distribution(NodeId n) const { return nodes_.at(n).op == Op::kCopyDist; }

std::span<const double> Tape::grad(NodeId n) const {
  if (grads_.size() != values_.size()) {
    RETMEM_THROW(InvalidArgument, "grad() called before backward()");
  }
  return {grads_.data() + nodes_[n].val, static_cast<size_t>(nodes_[n].size)};
}

NodeId Tape::constant(std::span<const double> v) {
  Node n{Op::kConst};
  n.size = static_cast<int32_t>(v.size());
  n.val = alloc(v.size());
  std::copy(v.begin(), v.end(), values_.begin() + n.val);
  return push(n);
}

NodeId Tape::zeros(size_t size) {
  Node n{Op::kConst};
  n.size = static_cast<int32_t>(size);
  n.val = alloc(size);
  return push(n);
}

NodeId Tape::param(ParamId p) {
  const Param& pr = par(p);
  Node n{Op::kParam};
  n.p[0] = p;
  n.size = static_cast<int32_t>(pr.size());
  n.val = alloc(pr.size());
  std::copy(pr.value.begin(), pr.value.end(), values_.begin() + n.val);
  return push(n);
}

NodeId Tape::param_row(ParamId p, size_t row) {
  const Param& pr = par(p);
  if (row >= pr.rows) {
    RETMEM_THROW(InvalidArgument, "row " << row << " out of range for "
                                         << pr.name << " (" << pr.rows << ")");
  }
  Node n{Op::kParamRow};
  n.p[0] = p;
  n.extra = static_cast<int32_t>(row);
  n.size = static_cast<int32_t>(pr.cols);
  n.val = alloc(pr.cols);
  auto r = pr.row(row);
  std::copy(r.begin(), r.end(), values_.begin() + n.val);
  return push(n);
}

NodeId Tape::linear(ParamId w, NodeId x, ParamId b) {
  const Param& W = par(w);
  if (static_cast<size_t>(nodes_[x].size) != W.cols) {
    RETMEM_THROW(InvalidArgument, "linear " << W.name << ": input width "
                                            << nodes_[x].size << " != "
                                            << W.cols);
  }
  Node n{Op::kLinear};
  n.p[0] = w;
  n.p[1] = b;
  n.a = x;
  n.size = static_cast<int32_t>(W.rows);
  n.val = alloc(W.rows);
  VecMap y(val_ptr(push(n)), W.rows);
  CMatMap Wm(W.value.data(), W.rows, W.cols);
  y.noalias() = Wm * CVecMap(val_ptr(x), W.cols);
  if (b != kNoParam) y += CVecMap(par(b).value.data(), W.rows);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::gru(const GruParams& g, NodeId x, NodeId h) {
  const size_t H = g.hidden;
  const size_t I = g.input;
  if (static_cast<size_t>(nodes_[x].size) != I ||
      static_cast<size_t>(nodes_[h].size) != H) {
    RETMEM_THROW(InvalidArgument, "gru: width mismatch (input "
                                      << nodes_[x].size << "/" << I
                                      << ", hidden " << nodes_[h].size << "/"
                                      << H << ")");
  }
  Node n{Op::kGru};
  n.p[0] = g.wi;
  n.p[1] = g.wh;
  n.p[2] = g.bi;
  n.p[3] = g.bh;
  n.a = x;
  n.b = h;
  n.size = static_cast<int32_t>(H);
  n.extra = static_cast<int32_t>(I);
  n.val = alloc(H);
  n.aux = alloc_aux(4 * H);
  n.aux_size = static_cast<int32_t>(4 * H);
  NodeId id = push(n);

  Eigen::VectorXd gi = CMatMap(par(g.wi).value.data(), 3 * H, I) *
                       CVecMap(val_ptr(x), I);
  gi += CVecMap(par(g.bi).value.data(), 3 * H);
  Eigen::VectorXd gh = CMatMap(par(g.wh).value.data(), 3 * H, H) *
                       CVecMap(val_ptr(h), H);
  gh += CVecMap(par(g.bh).value.data(), 3 * H);

  double* r = aux_.data() + n.aux;
  double* z = r + H;
  double* nn = z + H;
  double* ghn = nn + H;
  const double* hp = val_ptr(h);
  double* out = val_ptr(id);
  for (size_t i = 0; i < H; ++i) {
    r[i] = sigmoid(gi[i] + gh[i]);
    z[i] = sigmoid(gi[H + i] + gh[H + i]);
    ghn[i] = gh[2 * H + i];
    nn[i] = std::tanh(gi[2 * H + i] + r[i] * ghn[i]);
    out[i] = (1.0 - z[i]) * nn[i] + z[i] * hp[i];
  }
  return id;
}

NodeId Tape::concat(std::span<const NodeId> parts) {
  Node n{Op::kConcat};
  size_t total = 0;
  for (NodeId p : parts) total += nodes_[p].size;
  n.size = static_cast<int32_t>(total);
  n.val = alloc(total);
  n.list = store_ints(std::span<const int>(parts.data(), parts.size()));
  n.list_len = static_cast<int32_t>(parts.size());
  NodeId id = push(n);
  double* out = val_ptr(id);
  for (NodeId p : parts) {
    std::copy_n(val_ptr(p), nodes_[p].size, out);
    out += nodes_[p].size;
  }
  return id;
}

NodeId Tape::add(NodeId a, NodeId b) {
  if (nodes_[a].size != nodes_[b].size) {
    RETMEM_THROW(InvalidArgument, "add: width mismatch");
  }
  Node n{Op::kAdd};
  n.a = a;
  n.b = b;
  n.size = nodes_[a].size;
  n.val = alloc(n.size);
  NodeId id = push(n);
  for (int32_t i = 0; i < n.size; ++i) val_ptr(id)[i] = val_ptr(a)[i] + val_ptr(b)[i];
  return id;
}

NodeId Tape::tanh(NodeId x) {
  Node n{Op::kTanh};
  n.a = x;
  n.size = nodes_[x].size;
  n.val = alloc(n.size);
  NodeId id = push(n);
  for (int32_t i = 0; i < n.size; ++i) val_ptr(id)[i] = std::tanh(val_ptr(x)[i]);
  return id;
}

NodeId Tape::cat_attn(ParamId w, NodeId query, std::span<const NodeId> keys) {
  if (keys.empty()) RETMEM_THROW(InvalidArgument, "cat_attn: no keys");
  const size_t dq = nodes_[query].size;
  const size_t dk = nodes_[keys[0]].size;
  const Param& W = par(w);
  if (W.size() != dq + dk) {
    RETMEM_THROW(InvalidArgument, "cat_attn " << W.name << ": expects "
                                              << W.size() << " inputs, got "
                                              << dq + dk);
  }
  for (NodeId k : keys) {
    if (static_cast<size_t>(nodes_[k].size) != dk) {
      RETMEM_THROW(InvalidArgument, "cat_attn: ragged keys");
    }
  }
  Node n{Op::kCatAttn};
  n.p[0] = w;
  n.a = query;
  n.size = static_cast<int32_t>(dk);
  n.val = alloc(dk);
  n.list = store_ints(std::span<const int>(keys.data(), keys.size()));
  n.list_len = static_cast<int32_t>(keys.size());
  n.aux = alloc_aux(2 * keys.size());
  n.aux_size = static_cast<int32_t>(2 * keys.size());
  NodeId id = push(n);

  const size_t L = keys.size();
  double* alpha = aux_.data() + n.aux;
  double* e = alpha + L;
  const double qs = CVecMap(W.value.data(), dq).dot(CVecMap(val_ptr(query), dq));
  CVecMap wk(W.value.data() + dq, dk);
  double mx = -INFINITY;
  for (size_t i = 0; i < L; ++i) {
    e[i] = std::tanh(qs + wk.dot(CVecMap(val_ptr(keys[i]), dk)));
    mx = std::max(mx, e[i]);
  }
  double z = 0;
  for (size_t i = 0; i < L; ++i) {
    alpha[i] = std::exp(e[i] - mx);
    z += alpha[i];
  }
  VecMap out(val_ptr(id), dk);
  out.setZero();
  for (size_t i = 0; i < L; ++i) {
    alpha[i] /= z;
    out += alpha[i] * CVecMap(val_ptr(keys[i]), dk);
  }
  return id;
}

NodeId Tape::copy_dist(NodeId vocab_logits, NodeId h,
                       std::span<const NodeId> copy_keys,
                       std::span<const int> source_tokens, CopyMode mode,
                       int masked_token) {
  if (copy_keys.size() != source_tokens.size()) {
    RETMEM_THROW(InvalidArgument, "copy_dist: keys/tokens length mismatch");
  }
  const size_t V = nodes_[vocab_logits].size;
  const size_t dh = nodes_[h].size;
  for (size_t i = 0; i < copy_keys.size(); ++i) {
    if (static_cast<size_t>(nodes_[copy_keys[i]].size) != dh) {
      RETMEM_THROW(InvalidArgument, "copy_dist: key width mismatch");
    }
    if (source_tokens[i] < 0 || static_cast<size_t>(source_tokens[i]) >= V) {
      RETMEM_THROW(InvalidArgument, "copy_dist: source token "
                                        << source_tokens[i]
                                        << " outside vocabulary");
    }
  }
  const size_t L = copy_keys.size();
  Node n{Op::kCopyDist};
  n.a = vocab_logits;
  n.b = h;
  n.size = static_cast<int32_t>(V);
  n.val = alloc(V);
  n.list = store_ints(std::span<const int>(copy_keys.data(), L));
  n.list_len = static_cast<int32_t>(L);
  n.list2 = store_ints(source_tokens);
  n.extra = static_cast<int32_t>(mode);
  n.extra2 = masked_token;
  n.aux = alloc_aux(V + L + 1);
  n.aux_size = static_cast<int32_t>(V + L + 1);
  NodeId id = push(n);

  double* pv = aux_.data() + n.aux;
  double* pc = pv + V;
  double& mass = pc[L];
  const double* l = val_ptr(vocab_logits);
  double* p = val_ptr(id);
  CVecMap hv(val_ptr(h), dh);

  std::vector<double> s(L, 0.0);
  std::vector<bool> valid(L, false);
  bool any_valid = false;
  for (size_t i = 0; i < L; ++i) {
    valid[i] = source_tokens[i] != masked_token;
    if (valid[i]) {
      s[i] = hv.dot(CVecMap(val_ptr(copy_keys[i]), dh));
      any_valid = true;
    }
  }

  if (mode == CopyMode::kJoint) {
    double mx = -INFINITY;
    for (size_t j = 0; j < V; ++j) mx = std::max(mx, l[j]);
    for (size_t i = 0; i < L; ++i) {
      if (valid[i]) mx = std::max(mx, s[i]);
    }
    double z = 0;
    for (size_t j = 0; j < V; ++j) z += (pv[j] = std::exp(l[j] - mx));
    for (size_t i = 0; i < L; ++i) {
      pc[i] = valid[i] ? std::exp(s[i] - mx) : 0.0;
      z += pc[i];
    }
    for (size_t j = 0; j < V; ++j) pv[j] /= z;
    for (size_t i = 0; i < L; ++i) pc[i] /= z;
    std::copy_n(pv, V, p);
    for (size_t i = 0; i < L; ++i) p[source_tokens[i]] += pc[i];
    mass = 1.0;
  } else {
    double mx = -INFINITY;
    for (size_t j = 0; j < V; ++j) mx = std::max(mx, l[j]);
    double z = 0;
    for (size_t j = 0; j < V; ++j) z += (pv[j] = std::exp(l[j] - mx));
    for (size_t j = 0; j < V; ++j) pv[j] /= z;
    if (any_valid) {
      double ms = -INFINITY;
      for (size_t i = 0; i < L; ++i) {
        if (valid[i]) ms = std::max(ms, s[i]);
      }
      double zs = 0;
      for (size_t i = 0; i < L; ++i) {
        pc[i] = valid[i] ? std::exp(s[i] - ms) : 0.0;
        zs += pc[i];
      }
      for (size_t i = 0; i < L; ++i) pc[i] /= zs;
    } else {
      std::fill_n(pc, L, 0.0);
    }
    std::copy_n(pv, V, p);
    for (size_t i = 0; i < L; ++i) p[source_tokens[i]] += pc[i];
    mass = 0;
    for (size_t j = 0; j < V; ++j) mass += p[j];
    for (size_t j = 0; j < V; ++j) p[j] /= mass;
  }
  return id;
}

NodeId Tape::nll(NodeId dist, int target) {
  if (target < 0 || target >= nodes_[dist].size) {
    RETMEM_THROW(InvalidArgument, "nll: target " << target << " out of range");
  }
  Node n{Op::kNll};
  n.a = dist;
  n.extra = target;
  n.size = 1;
  n.val = alloc(1);
  NodeId id = push(n);
  val_ptr(id)[0] = -std::log(std::max(val_ptr(dist)[target], kProbFloor));
  return id;
}

NodeId Tape::sum(std::span<const NodeId> scalars) {
  Node n{Op::kSum};
  n.size = 1;
  n.val = alloc(1);
  n.list = store_ints(std::span<const int>(scalars.data(), scalars.size()));
  n.list_len = static_cast<int32_t>(scalars.size());
  n.factor = 1.0;
  NodeId id = push(n);
  double s = 0;
  for (NodeId x : scalars) s += val_ptr(x)[0];
  val_ptr(id)[0] = s;
  return id;
}

NodeId Tape::mean(std::span<const NodeId> scalars) {
  if (scalars.empty()) RETMEM_THROW(InvalidArgument, "mean of nothing");
  NodeId id = sum(scalars);
  nodes_[id].factor = 1.0 / static_cast<double>(scalars.size());
  val_ptr(id)[0] *= nodes_[id].factor;
  return id;
}

NodeId Tape::scale(NodeId x, double factor) {
  Node n{Op::kScale};
  n.a = x;
  n.size = nodes_[x].size;
  n.factor = factor;
  n.val = alloc(n.size);
  NodeId id = push(n);
  for (int32_t i = 0; i < n.size; ++i) val_ptr(id)[i] = factor * val_ptr(x)[i];
  return id;
}

NodeId Tape::bce_with_logits(NodeId logits, std::span<const double> labels) {
  const size_t D = nodes_[logits].size;
  if (labels.size() != D) {
    RETMEM_THROW(InvalidArgument, "bce: label width " << labels.size()
                                                      << " != " << D);
  }
  Node n{Op::kBce};
  n.a = logits;
  n.size = 1;
  n.val = alloc(1);
  n.aux = alloc_aux(D);
  n.aux_size = static_cast<int32_t>(D);
  std::copy(labels.begin(), labels.end(), aux_.begin() + n.aux);
  NodeId id = push(n);
  double loss = 0;
  const double* l = val_ptr(logits);
  for (size_t i = 0; i < D; ++i) {
    loss += std::max(l[i], 0.0) - labels[i] * l[i] +
            std::log1p(std::exp(-std::abs(l[i])));
  }
  val_ptr(id)[0] = loss / static_cast<double>(D);
  return id;
}

void Tape::backward(NodeId loss) {
  if (params_ == nullptr) {
    RETMEM_THROW(InvalidArgument, "backward() on a forward-only tape");
  }
  if (nodes_[loss].size != 1) {
    RETMEM_THROW(InvalidArgument, "backward() needs a scalar loss");
  }
  if (!std::isfinite(scalar(loss))) {
    RETMEM_THROW(NumericError, "loss is not finite: " << scalar(loss));
  }
  grads_.assign(values_.size(), 0.0);
  grad_ptr(loss)[0] = 1.0;
  for (NodeId id = loss; id >= 0; --id) backward_node(id);
}

void Tape::backward_node(NodeId id) {
  const Node& n = nodes_[id];
  const double* g = grad_ptr(id);
  switch (n.op) {
    case Op::kConst:
      return;
    case Op::kParam: {
      auto& pg = mpar(n.p[0]).grad;
      for (int32_t i = 0; i < n.size; ++i) pg[i] += g[i];
      return;
    }
    case Op::kParamRow: {
      Param& p = mpar(n.p[0]);
      double* pg = p.grad.data() + static_cast<size_t>(n.extra) * p.cols;
      for (int32_t i = 0; i < n.size; ++i) pg[i] += g[i];
      return;
    }
    case Op::kLinear: {
      Param& W = mpar(n.p[0]);
      CVecMap gv(g, W.rows);
      CVecMap x(val_ptr(n.a), W.cols);
      MatMap(W.grad.data(), W.rows, W.cols).noalias() += gv * x.transpose();
      VecMap(grad_ptr(n.a), W.cols).noalias() +=
          CMatMap(W.value.data(), W.rows, W.cols).transpose() * gv;
      if (n.p[1] != kNoParam) VecMap(mpar(n.p[1]).grad.data(), W.rows) += gv;
      return;
    }
    case Op::kGru: {
      const size_t H = n.size;
      const size_t I = n.extra;
      const double* r = aux_.data() + n.aux;
      const double* z = r + H;
      const double* nn = z + H;
      const double* ghn = nn + H;
      const double* hp = val_ptr(n.b);
      double* dhp = grad_ptr(n.b);
      Eigen::VectorXd dgi(3 * H), dgh(3 * H);
      for (size_t i = 0; i < H; ++i) {
        const double dz = g[i] * (hp[i] - nn[i]);
        const double dn = g[i] * (1.0 - z[i]);
        dhp[i] += g[i] * z[i];
        const double dn_pre = dn * (1.0 - nn[i] * nn[i]);
        const double dr = dn_pre * ghn[i];
        const double dr_pre = dr * r[i] * (1.0 - r[i]);
        const double dz_pre = dz * z[i] * (1.0 - z[i]);
        dgi[i] = dr_pre;
        dgi[H + i] = dz_pre;
        dgi[2 * H + i] = dn_pre;
        dgh[i] = dr_pre;
        dgh[H + i] = dz_pre;
        dgh[2 * H + i] = dn_pre * r[i];
      }
      Param& wi = mpar(n.p[0]);
      Param& wh = mpar(n.p[1]);
      CVecMap x(val_ptr(n.a), I);
      CVecMap h(hp, H);
      MatMap(wi.grad.data(), 3 * H, I).noalias() += dgi * x.transpose();
      MatMap(wh.grad.data(), 3 * H, H).noalias() += dgh * h.transpose();
      VecMap(mpar(n.p[2]).grad.data(), 3 * H) += dgi;
      VecMap(mpar(n.p[3]).grad.data(), 3 * H) += dgh;
      VecMap(grad_ptr(n.a), I).noalias() +=
          CMatMap(wi.value.data(), 3 * H, I).transpose() * dgi;
      VecMap(dhp, H).noalias() +=
          CMatMap(wh.value.data(), 3 * H, H).transpose() * dgh;
      return;
    }
    case Op::kConcat: {
      const double* src = g;
      for (int32_t k = 0; k < n.list_len; ++k) {
        NodeId part = ints_[n.list + k];
        double* dst = grad_ptr(part);
        for (int32_t i = 0; i < nodes_[part].size; ++i) dst[i] += src[i];
        src += nodes_[part].size;
      }
      return;
    }
    case Op::kAdd: {
      for (int32_t i = 0; i < n.size; ++i) {
        grad_ptr(n.a)[i] += g[i];
        grad_ptr(n.b)[i] += g[i];
      }
      return;
    }
    case Op::kTanh: {
      const double* y = val_ptr(id);
      double* dx = grad_ptr(n.a);
      for (int32_t i = 0; i < n.size; ++i) dx[i] += g[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case Op::kCatAttn: {
      const size_t L = n.list_len;
      const size_t dk = n.size;
      const size_t dq = nodes_[n.a].size;
      const double* alpha = aux_.data() + n.aux;
      const double* e = alpha + L;
      Param& W = mpar(n.p[0]);
      CVecMap gv(g, dk);
      std::vector<double> dalpha(L);
      double c = 0;
      for (size_t i = 0; i < L; ++i) {
        dalpha[i] = gv.dot(CVecMap(val_ptr(ints_[n.list + i]), dk));
        c += alpha[i] * dalpha[i];
      }
      double dpre_sum = 0;
      CVecMap wk(W.value.data() + dq, dk);
      VecMap dwk(W.grad.data() + dq, dk);
      for (size_t i = 0; i < L; ++i) {
        const NodeId key = ints_[n.list + i];
        const double dpre = alpha[i] * (dalpha[i] - c) * (1.0 - e[i] * e[i]);
        dpre_sum += dpre;
        dwk += dpre * CVecMap(val_ptr(key), dk);
        VecMap dkey(grad_ptr(key), dk);
        dkey += dpre * wk + alpha[i] * gv;
      }
      VecMap(W.grad.data(), dq) += dpre_sum * CVecMap(val_ptr(n.a), dq);
      VecMap(grad_ptr(n.a), dq) += dpre_sum * CVecMap(W.value.data(), dq);
      return;
    }
    case Op::kCopyDist: {
      const size_t V = n.size;
      const size_t L = n.list_len;
      const size_t dh = nodes_[n.b].size;
      const double* pv = aux_.data() + n.aux;
      const double* pc = pv + V;
      const double mass = pc[L];
      const double* p = val_ptr(id);
      const int32_t* toks = ints_.data() + n.list2;
      double* dl = grad_ptr(n.a);
      std::vector<double> ds(L, 0.0);
      double c = 0;
      for (size_t j = 0; j < V; ++j) c += p[j] * g[j];
      if (static_cast<CopyMode>(n.extra) == CopyMode::kJoint) {
        for (size_t j = 0; j < V; ++j) dl[j] += pv[j] * (g[j] - c);
        for (size_t i = 0; i < L; ++i) ds[i] = pc[i] * (g[toks[i]] - c);
      } else {
        std::vector<double> dq(V);
        for (size_t j = 0; j < V; ++j) dq[j] = (g[j] - c) / mass;
        double cv = 0;
        for (size_t j = 0; j < V; ++j) cv += pv[j] * dq[j];
        for (size_t j = 0; j < V; ++j) dl[j] += pv[j] * (dq[j] - cv);
        double cs = 0;
        for (size_t i = 0; i < L; ++i) cs += pc[i] * dq[toks[i]];
        for (size_t i = 0; i < L; ++i) ds[i] = pc[i] * (dq[toks[i]] - cs);
      }
      CVecMap hv(val_ptr(n.b), dh);
      VecMap dhv(grad_ptr(n.b), dh);
      for (size_t i = 0; i < L; ++i) {
        if (ds[i] == 0.0) continue;
        const NodeId key = ints_[n.list + i];
        dhv += ds[i] * CVecMap(val_ptr(key), dh);
        VecMap(grad_ptr(key), dh) += ds[i] * hv;
      }
      return;
    }
    case Op::kNll: {
      const double pt = val_ptr(n.a)[n.extra];
      if (pt > kProbFloor) grad_ptr(n.a)[n.extra] -= g[0] / pt;
      return;
    }
    case Op::kSum: {
      for (int32_t k = 0; k < n.list_len; ++k) {
        grad_ptr(ints_[n.list + k])[0] += g[0] * n.factor;
      }
      return;
    }
    case Op::kScale: {
      for (int32_t i = 0; i < n.size; ++i) grad_ptr(n.a)[i] += g[i] * n.factor;
      return;
    }
    case Op::kBce: {
      const size_t D = n.aux_size;
      const double* y = aux_.data() + n.aux;
      const double* l = val_ptr(n.a);
      double* dl = grad_ptr(n.a);
      for (size_t i = 0; i < D; ++i) {
        dl[i] += g[0] * (sigmoid(l[i]) - y[i]) / static_cast<double>(D);
      }
      return;
    }
  }
}

}  // namespace retmem::neural
