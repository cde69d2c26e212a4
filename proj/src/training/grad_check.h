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

#ifndef RETMEM_TRAINING_GRAD_CHECK_H_
#define RETMEM_TRAINING_GRAD_CHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "neural/param_store.h"
#include "neural/tape.h"

namespace retmem::training {

struct GroupCheck {
  std::string name;
  size_t coords = 0;
  double max_rel_error = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GroupCheck> groups;
  double tolerance = 1e-4;

  bool passed() const;
  std::vector<std::string> failed_groups() const;
  double max_rel_error() const;
  nlohmann::json to_json() const;
};

struct GradCheckOptions {
  double epsilon = 1e-4;
  double tolerance = 1e-4;
  size_t coords_per_group = 20;
  uint64_t seed = 1;
  // Gradients below this magnitude are compared absolutely.
  double abs_floor = 1e-6;
  // Runs between the analytic backward pass and the comparison; tests use it
  // to corrupt gradients on purpose.
  std::function<void(neural::ParamStore&)> after_backward;
};

// Central differences against the tape's gradients. Half of each group's
// coordinates are drawn from entries with a nonzero analytic gradient, the
// rest uniformly; groups smaller than coords_per_group are checked fully.
GradCheckReport grad_check(
    neural::ParamStore& store,
    const std::function<neural::NodeId(neural::Tape&)>& loss_fn,
    const GradCheckOptions& options = {});

// |a - n| / max(|a|, |n|, abs_floor)
double relative_error(double analytic, double numeric, double abs_floor);

}  // namespace retmem::training

#endif  // RETMEM_TRAINING_GRAD_CHECK_H_
