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

#include "training/grad_check.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "common/rng.h"

namespace retmem::training {

bool GradCheckReport::passed() const {
  return std::all_of(groups.begin(), groups.end(),
                     [](const GroupCheck& g) { return g.passed; });
}

std::vector<std::string> GradCheckReport::failed_groups() const {
  std::vector<std::string> out;
  for (const GroupCheck& g : groups) {
    if (!g.passed) out.push_back(g.name);
  }
  return out;
}

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const GroupCheck& g : groups) m = std::max(m, g.max_rel_error);
  return m;
}

nlohmann::json GradCheckReport::to_json() const {
  nlohmann::json gs = nlohmann::json::array();
  for (const GroupCheck& g : groups) {
    gs.push_back({{"name", g.name}, {"coords", g.coords},
                  {"max_rel_error", g.max_rel_error}, {"passed", g.passed}});
  }
  return {{"passed", passed()}, {"tolerance", tolerance},
          {"max_rel_error", max_rel_error()}, {"groups", gs}};
}

double relative_error(double analytic, double numeric, double abs_floor) {
  const double den = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return std::abs(analytic - numeric) / den;
}

GradCheckReport grad_check(
    neural::ParamStore& store,
    const std::function<neural::NodeId(neural::Tape&)>& loss_fn,
    const GradCheckOptions& options) {
  store.zero_grad();
  {
    neural::Tape tape(store);
    tape.backward(loss_fn(tape));
  }
  if (options.after_backward) options.after_backward(store);

  auto eval = [&]() {
    neural::Tape tape(static_cast<const neural::ParamStore&>(store));
    return tape.scalar(loss_fn(tape));
  };

  Rng rng(options.seed);
  GradCheckReport report;
  report.tolerance = options.tolerance;
  for (neural::Param& p : store.params()) {
    std::vector<size_t> coords;
    if (p.size() <= options.coords_per_group) {
      for (size_t i = 0; i < p.size(); ++i) coords.push_back(i);
    } else {
      std::vector<size_t> nonzero;
      for (size_t i = 0; i < p.size(); ++i) {
        if (p.grad[i] != 0.0) nonzero.push_back(i);
      }
      std::set<size_t> chosen;
      const size_t want_nonzero =
          std::min(nonzero.size(), options.coords_per_group / 2);
      while (chosen.size() < want_nonzero) chosen.insert(nonzero[rng.below(nonzero.size())]);
      while (chosen.size() < options.coords_per_group) chosen.insert(rng.below(p.size()));
      coords.assign(chosen.begin(), chosen.end());
    }
    GroupCheck g;
    g.name = p.name;
    g.coords = coords.size();
    for (size_t i : coords) {
      const double saved = p.value[i];
      p.value[i] = saved + options.epsilon;
      const double up = eval();
      p.value[i] = saved - options.epsilon;
      const double down = eval();
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      g.max_rel_error = std::max(
          g.max_rel_error, relative_error(p.grad[i], numeric, options.abs_floor));
    }
    g.passed = g.max_rel_error < options.tolerance;
    report.groups.push_back(g);
  }
  return report;
}

}  // namespace retmem::training
