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

#ifndef RETMEM_CARM_PRETRAIN_H_
#define RETMEM_CARM_PRETRAIN_H_

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "carm/context.h"
#include "corpus/ontology.h"
#include "corpus/types.h"
#include "json.hpp"

namespace retmem::carm {

// Multi-hot label space. For every (domain, function) there is one atom for
// the pair itself plus one per ontology slot of that domain.
class ActionAtoms {
 public:
  explicit ActionAtoms(const corpus::Ontology& ontology);

  size_t size() const { return names_.size(); }
  const std::string& name(size_t i) const { return names_[i]; }
  // Atoms outside the ontology are ignored.
  std::vector<double> label(const corpus::SystemAction& action) const;

 private:
  std::vector<std::string> names_;
  std::map<std::tuple<std::string, std::string, std::string>, size_t> index_;
};

struct PretrainEpoch {
  size_t epoch = 0;
  double loss = 0.0;
  double f1 = 0.0;
};

struct PretrainReport {
  double initial_f1 = 0.0;
  double final_f1 = 0.0;
  double initial_loss = 0.0;
  std::vector<PretrainEpoch> epochs;

  nlohmann::json to_json() const;
};

// Trains the encoder plus a throwaway linear head on per-atom BCE. The
// learning rate warms up linearly over the first `warmup` share of steps
// and then decays linearly to zero.
PretrainReport pretrain_encoder(
    GruContextEncoder& encoder, const std::vector<corpus::Dialogue>& corpus,
    const corpus::Ontology& ontology,
    const std::function<void(const PretrainEpoch&)>& on_epoch = {});

// Micro-averaged F1 of thresholded predictions against labels.
double micro_f1(const std::vector<std::vector<double>>& probs,
                const std::vector<std::vector<double>>& labels,
                double threshold = 0.5);

}  // namespace retmem::carm

#endif  // RETMEM_CARM_PRETRAIN_H_
