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

#ifndef RETMEM_CARM_INDEX_H_
#define RETMEM_CARM_INDEX_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carm/candidates.h"
#include "carm/context.h"
#include "corpus/types.h"

namespace retmem::carm {

// Throws InvalidArgument on a width mismatch.
double l2_distance(std::span<const double> u, std::span<const double> v);

struct IndexEntry {
  corpus::SampleKey key;
  corpus::SystemAction action;
  corpus::DbResultClass db_class;
};

// Exact index: entry vectors live in one contiguous row-major block and are
// scanned linearly.
class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  RetrievalIndex(size_t width, std::string encoder_fingerprint);

  // Throws InvalidArgument on a duplicate key or wrong width.
  void add(IndexEntry entry, std::span<const double> vector);

  size_t size() const { return entries_.size(); }
  size_t width() const { return width_; }
  const std::string& encoder_fingerprint() const { return fingerprint_; }
  const IndexEntry& entry(size_t i) const { return entries_[i]; }
  std::span<const double> vector(size_t i) const {
    return {data_.data() + i * width_, width_};
  }

  std::string serialize() const;
  static RetrievalIndex deserialize(const std::string& bytes);
  void save(const std::string& path) const;
  static RetrievalIndex load(const std::string& path);

 private:
  size_t width_ = 0;
  std::string fingerprint_;
  std::vector<IndexEntry> entries_;
  std::vector<double> data_;
  std::map<corpus::SampleKey, size_t> keys_;
};

// One entry per turn, encoded with the gold belief.
RetrievalIndex build_index(const std::vector<corpus::Dialogue>& corpus,
                           const ContextEncoder& encoder);

struct RawCandidate {
  corpus::SampleKey key;
  corpus::SystemAction action;
  corpus::DbResultClass db_class;
  double distance = 0.0;
};

// Ascending distance, ties by key. n larger than the index returns every
// entry.
std::vector<RawCandidate> retrieve(const RetrievalIndex& index,
                                   std::span<const double> query, size_t n,
                                   const std::optional<corpus::SampleKey>& exclude = {});

// Dedup (best rank wins), drop empty actions, drop db-class mismatches, drop
// requests for slots the belief already fills; keep the first k and pad the
// rest with null slots.
CandidateSet postprocess(const std::vector<RawCandidate>& raw,
                         const corpus::BeliefState& belief,
                         corpus::DbResultClass db, size_t k);

// Candidate sets keyed by sample, as written by the retrieve command.
using CandidateMap = std::map<corpus::SampleKey, CandidateSet>;

CandidateMap retrieve_corpus(const RetrievalIndex& index,
                             const ContextEncoder& encoder,
                             const std::vector<corpus::Dialogue>& corpus,
                             size_t n_raw, size_t k, bool exclude_self);

// JSON lines {query_key, candidates:[{action, distance, provenance}]}.
void save_candidates(const CandidateMap& map, const std::string& path);
CandidateMap load_candidates(const std::string& path);

}  // namespace retmem::carm

#endif  // RETMEM_CARM_INDEX_H_
