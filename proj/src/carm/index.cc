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

#include "carm/index.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.h"
#include "corpus/linearize.h"

namespace retmem::carm {

namespace {

constexpr char kIndexMagic[] = "RMINDEX1";

bool rank_less(const RawCandidate& a, const RawCandidate& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.key < b.key;
}

void put_u64(std::string& out, uint64_t v) {
  out.append(reinterpret_cast<const char*>(&v), 8);
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

class Cursor {
 public:
  explicit Cursor(const std::string& b) : b_(b) {}
  void raw(void* p, size_t n) {
    if (n > b_.size() - pos_) RETMEM_THROW(ParseError, "index file truncated");
    std::memcpy(p, b_.data() + pos_, n);
    pos_ += n;
  }
  uint64_t u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    const uint64_t n = u64();
    if (n > b_.size() - pos_) RETMEM_THROW(ParseError, "index file truncated");
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  const std::string& b_;
  size_t pos_ = 0;
};

}  // namespace

double l2_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    RETMEM_THROW(InvalidArgument, "l2_distance width mismatch: " << u.size()
                                                                 << " vs " << v.size());
  }
  double sq = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

RetrievalIndex::RetrievalIndex(size_t width, std::string encoder_fingerprint)
    : width_(width), fingerprint_(std::move(encoder_fingerprint)) {
  if (width_ == 0) RETMEM_THROW(InvalidArgument, "index width must be positive");
}

void RetrievalIndex::add(IndexEntry entry, std::span<const double> vector) {
  if (vector.size() != width_) {
    RETMEM_THROW(InvalidArgument, "index vector width " << vector.size()
                                                        << ", expected " << width_);
  }
  if (!keys_.emplace(entry.key, entries_.size()).second) {
    RETMEM_THROW(InvalidArgument, "duplicate index key " << entry.key.dialogue_id
                                                         << "/" << entry.key.turn_id);
  }
  for (double x : vector) {
    if (!std::isfinite(x)) RETMEM_THROW(NumericError, "non-finite context vector");
  }
  entries_.push_back(std::move(entry));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::string RetrievalIndex::serialize() const {
  std::string out(kIndexMagic, 8);
  put_u64(out, width_);
  put_u64(out, entries_.size());
  put_str(out, fingerprint_);
  for (size_t i = 0; i < entries_.size(); ++i) {
    const IndexEntry& e = entries_[i];
    put_str(out, e.key.dialogue_id);
    put_u64(out, static_cast<uint64_t>(e.key.turn_id));
    put_u64(out, static_cast<uint64_t>(e.db_class.bucket()));
    put_str(out, corpus::join(corpus::linearize_action(e.action)));
    out.append(reinterpret_cast<const char*>(data_.data() + i * width_),
               width_ * sizeof(double));
  }
  return out;
}

RetrievalIndex RetrievalIndex::deserialize(const std::string& bytes) {
  if (bytes.size() < 8 || bytes.compare(0, 8, kIndexMagic) != 0) {
    RETMEM_THROW(ParseError, "not an index file (bad magic)");
  }
  Cursor c(bytes);
  char magic[8];
  c.raw(magic, 8);
  const uint64_t width = c.u64();
  const uint64_t count = c.u64();
  RetrievalIndex index(width, c.str());
  std::vector<double> v(width);
  for (uint64_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.key.dialogue_id = c.str();
    e.key.turn_id = static_cast<int>(c.u64());
    e.db_class = corpus::DbResultClass(static_cast<int>(c.u64()));
    e.action = corpus::delinearize_action(corpus::tokenize(c.str())).action;
    c.raw(v.data(), width * sizeof(double));
    index.add(std::move(e), v);
  }
  if (!c.done()) RETMEM_THROW(ParseError, "trailing bytes in index file");
  return index;
}

void RetrievalIndex::save(const std::string& path) const {
  const std::string bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

RetrievalIndex RetrievalIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) RETMEM_THROW(MissingArtifact, "cannot open " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

RetrievalIndex build_index(const std::vector<corpus::Dialogue>& corpus,
                           const ContextEncoder& encoder) {
  RetrievalIndex index(encoder.width(), encoder.fingerprint());
  for (const corpus::Dialogue& d : corpus) {
    for (size_t t = 0; t < d.turns.size(); ++t) {
      const corpus::Turn& turn = d.turns[t];
      index.add({{d.dialogue_id, turn.turn_id}, turn.action, turn.db_class},
                encoder.encode(make_context_input(d, t)));
    }
  }
  return index;
}

std::vector<RawCandidate> retrieve(const RetrievalIndex& index,
                                   std::span<const double> query, size_t n,
                                   const std::optional<corpus::SampleKey>& exclude) {
  if (n < 1) RETMEM_THROW(InvalidArgument, "retrieve needs n >= 1");
  if (index.size() > 0 && query.size() != index.width()) {
    RETMEM_THROW(InvalidArgument, "query width " << query.size() << ", index width "
                                                 << index.width());
  }
  std::vector<RawCandidate> all;
  all.reserve(index.size());
  for (size_t i = 0; i < index.size(); ++i) {
    const IndexEntry& e = index.entry(i);
    if (exclude && e.key == *exclude) continue;
    all.push_back({e.key, e.action, e.db_class, l2_distance(query, index.vector(i))});
  }
  const size_t m = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m),
                    all.end(), rank_less);
  all.resize(m);
  return all;
}

CandidateSet postprocess(const std::vector<RawCandidate>& raw,
                         const corpus::BeliefState& belief,
                         corpus::DbResultClass db, size_t k) {
  std::vector<const RawCandidate*> kept;
  std::set<corpus::SystemAction> seen;
  for (const RawCandidate& c : raw) {
    if (seen.insert(c.action).second) kept.push_back(&c);
  }
  std::erase_if(kept, [](const RawCandidate* c) { return c->action.empty(); });
  std::erase_if(kept, [&](const RawCandidate* c) { return !(c->db_class == db); });
  std::erase_if(kept, [&](const RawCandidate* c) {
    for (const corpus::ActionEntry& e : c->action.entries) {
      if (e.function != "request") continue;
      for (const std::string& s : e.slots) {
        if (belief.has(e.domain, s)) return true;
      }
    }
    return false;
  });
  CandidateSet out;
  for (size_t i = 0; i < kept.size() && i < k; ++i) {
    out.actions.push_back(kept[i]->action);
    out.provenance.push_back(Provenance::kRetrieved);
    out.distances.push_back(kept[i]->distance);
  }
  while (out.size() < k) {
    out.actions.emplace_back();
    out.provenance.push_back(Provenance::kNullPad);
    out.distances.push_back(0.0);
  }
  return out;
}

CandidateMap retrieve_corpus(const RetrievalIndex& index,
                             const ContextEncoder& encoder,
                             const std::vector<corpus::Dialogue>& corpus,
                             size_t n_raw, size_t k, bool exclude_self) {
  CandidateMap out;
  for (const corpus::Dialogue& d : corpus) {
    for (size_t t = 0; t < d.turns.size(); ++t) {
      const corpus::Turn& turn = d.turns[t];
      ContextInput in = make_context_input(d, t);
      std::optional<corpus::SampleKey> ex;
      if (exclude_self) ex = in.key;
      out[in.key] = postprocess(retrieve(index, encoder.encode(in), n_raw, ex),
                                turn.belief, turn.db_class, k);
    }
  }
  return out;
}

void save_candidates(const CandidateMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  for (const auto& [key, set] : map) {
    nlohmann::json j = {
        {"query_key", {{"dialogue_id", key.dialogue_id}, {"turn_id", key.turn_id}}},
        {"candidates", set.to_json()}};
    out << j.dump() << "\n";
  }
}

CandidateMap load_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) RETMEM_THROW(MissingArtifact, "cannot open " << path);
  CandidateMap map;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      corpus::SampleKey key{j.at("query_key").at("dialogue_id").get<std::string>(),
                            j.at("query_key").at("turn_id").get<int>()};
      map[key] = CandidateSet::from_json(j.at("candidates"));
    } catch (const nlohmann::json::exception& e) {
      RETMEM_THROW(ParseError, path << ":" << lineno << ": " << e.what());
    }
  }
  return map;
}

}  // namespace retmem::carm
