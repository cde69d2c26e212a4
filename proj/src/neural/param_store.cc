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

#include "neural/param_store.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "common/error.h"
#include "common/hash.h"
#include "common/rng.h"

namespace retmem::neural {

ParamId ParamStore::insert(Param p) {
  if (index_.count(p.name)) {
    RETMEM_THROW(InvalidArgument, "duplicate parameter '" << p.name << "'");
  }
  p.grad.assign(p.value.size(), 0.0);
  ParamId id = static_cast<ParamId>(params_.size());
  index_[p.name] = id;
  params_.push_back(std::move(p));
  return id;
}

ParamId ParamStore::add_matrix(const std::string& name, size_t rows,
                               size_t cols, Rng& rng) {
  return add_uniform(name, rows, cols, 1.0 / std::sqrt(static_cast<double>(cols)),
                     rng);
}

ParamId ParamStore::add_uniform(const std::string& name, size_t rows,
                                size_t cols, double scale, Rng& rng) {
  Param p{name, rows, cols, std::vector<double>(rows * cols), {}};
  for (auto& v : p.value) v = rng.uniform(-scale, scale);
  return insert(std::move(p));
}

ParamId ParamStore::add_zeros(const std::string& name, size_t rows,
                              size_t cols) {
  return insert(Param{name, rows, cols, std::vector<double>(rows * cols, 0.0), {}});
}

ParamId ParamStore::id(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    RETMEM_THROW(InvalidArgument, "unknown parameter '" << name << "'");
  }
  return it->second;
}

bool ParamStore::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

size_t ParamStore::num_values() const {
  size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
    if (std::memcmp(a.value.data(), b.value.data(),
                    a.value.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

std::string ParamStore::fingerprint() const {
  Fnv1a h;
  for (const auto& p : params_) {
    h.update(p.name);
    h.update_u64(p.rows);
    h.update_u64(p.cols);
    h.update(std::span<const double>(p.value));
  }
  return h.hex();
}

}  // namespace retmem::neural
