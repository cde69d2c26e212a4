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

#ifndef RETMEM_NEURAL_PARAM_STORE_H_
#define RETMEM_NEURAL_PARAM_STORE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace retmem {
class Rng;
}

namespace retmem::neural {

using ParamId = int32_t;
inline constexpr ParamId kNoParam = -1;

// Row-major matrix (or vector when cols == 1) with a matching gradient slot.
struct Param {
  std::string name;
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;

  size_t size() const { return value.size(); }
  std::span<const double> row(size_t r) const {
    return {value.data() + r * cols, cols};
  }
};

class ParamStore {
 public:
  // Uniform in +-1/sqrt(cols) for matrices; `zero` for biases.
  ParamId add_matrix(const std::string& name, size_t rows, size_t cols,
                     Rng& rng);
  ParamId add_zeros(const std::string& name, size_t rows, size_t cols = 1);
  ParamId add_uniform(const std::string& name, size_t rows, size_t cols,
                      double scale, Rng& rng);

  ParamId id(const std::string& name) const;
  bool contains(const std::string& name) const;
  Param& operator[](ParamId id) { return params_[id]; }
  const Param& operator[](ParamId id) const { return params_[id]; }
  size_t size() const { return params_.size(); }
  size_t num_values() const;

  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }

  void zero_grad();
  // Same names, shapes and bit-identical values.
  bool same_values(const ParamStore& other) const;
  std::string fingerprint() const;

 private:
  ParamId insert(Param p);

  std::vector<Param> params_;
  std::map<std::string, ParamId> index_;
};

}  // namespace retmem::neural

#endif  // RETMEM_NEURAL_PARAM_STORE_H_
