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

#ifndef RETMEM_NEURAL_OPTIM_H_
#define RETMEM_NEURAL_OPTIM_H_

#include <vector>

#include "neural/param_store.h"

namespace retmem::neural {

class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // One update from the accumulated gradients; gradients are left intact.
  void step(ParamStore& store);
  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  long steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

double grad_norm(const ParamStore& store);
// Rescales gradients so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(ParamStore& store, double max_norm);
void scale_grads(ParamStore& store, double factor);

}  // namespace retmem::neural

#endif  // RETMEM_NEURAL_OPTIM_H_
