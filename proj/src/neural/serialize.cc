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

#include "neural/serialize.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "common/error.h"
#include "common/hash.h"

namespace retmem::neural {

static_assert(std::endian::native == std::endian::little,
              "array files are written in native little-endian order");

namespace {

class Writer {
 public:
  void raw(const void* p, size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  void u8(uint8_t v) { raw(&v, 1); }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, size_t end) : bytes_(bytes), end_(end) {}

  void raw(void* p, size_t n) {
    if (n > end_ - pos_) RETMEM_THROW(ParseError, "array file truncated");
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  uint8_t u8() {
    uint8_t v;
    raw(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    uint64_t n = u64();
    if (n > end_ - pos_) RETMEM_THROW(ParseError, "array file truncated");
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& bytes_;
  size_t end_;
  size_t pos_ = 0;
};

constexpr uint8_t kDtypeF64 = 1;

}  // namespace

std::string encode_array_file(const ArrayFile& file) {
  Writer w;
  w.raw(kArrayFileMagic, 8);
  w.u32(kArrayFileVersion);
  w.str(file.meta.dump());
  w.u64(file.arrays.size());
  for (const NamedArray& a : file.arrays) {
    if (a.values.size() != a.rows * a.cols) {
      RETMEM_THROW(InvalidArgument, "array " << a.name << " shape mismatch");
    }
    w.str(a.name);
    w.u64(a.rows);
    w.u64(a.cols);
    w.u8(kDtypeF64);
    w.raw(a.values.data(), a.values.size() * sizeof(double));
  }
  Fnv1a h;
  h.update(w.bytes());
  w.u64(h.digest());
  return std::move(w.bytes());
}

ArrayFile decode_array_file(const std::string& bytes) {
  if (bytes.size() < 8 + 4 + 8) RETMEM_THROW(ParseError, "array file truncated");
  if (bytes.compare(0, 8, kArrayFileMagic) != 0) {
    RETMEM_THROW(ParseError, "not an array file (bad magic)");
  }
  const size_t body = bytes.size() - 8;
  uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, 8);
  Fnv1a h;
  h.update(std::string_view(bytes.data(), body));
  if (h.digest() != stored) {
    RETMEM_THROW(ParseError, "array file checksum mismatch (truncated or corrupt)");
  }
  Reader r(bytes, body);
  char magic[8];
  r.raw(magic, 8);
  const uint32_t version = r.u32();
  if (version != kArrayFileVersion) {
    RETMEM_THROW(ParseError, "unsupported array file version " << version);
  }
  ArrayFile file;
  file.meta = nlohmann::json::parse(r.str());
  const uint64_t n = r.u64();
  for (uint64_t i = 0; i < n; ++i) {
    NamedArray a;
    a.name = r.str();
    a.rows = r.u64();
    a.cols = r.u64();
    if (r.u8() != kDtypeF64) RETMEM_THROW(ParseError, "unknown dtype in " << a.name);
    if (a.cols != 0 && a.rows > (bytes.size() / 8) / a.cols) {
      RETMEM_THROW(ParseError, "array file truncated");
    }
    a.values.resize(a.rows * a.cols);
    r.raw(a.values.data(), a.values.size() * sizeof(double));
    file.arrays.push_back(std::move(a));
  }
  if (!r.done()) RETMEM_THROW(ParseError, "trailing bytes in array file");
  return file;
}

void write_array_file(const ArrayFile& file, const std::string& path) {
  const std::string bytes = encode_array_file(file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) RETMEM_THROW(IoError, "cannot write " << path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) RETMEM_THROW(IoError, "write failed for " << path);
}

ArrayFile read_array_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) RETMEM_THROW(MissingArtifact, "cannot open " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_array_file(ss.str());
}

std::vector<NamedArray> export_params(const ParamStore& store) {
  std::vector<NamedArray> out;
  for (const Param& p : store.params()) {
    out.push_back({p.name, p.rows, p.cols, p.value});
  }
  return out;
}

void import_params(ParamStore& store, const std::vector<NamedArray>& arrays) {
  std::map<std::string, const NamedArray*> by_name;
  for (const NamedArray& a : arrays) by_name[a.name] = &a;
  for (const Param& p : store.params()) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      RETMEM_THROW(ValidationError, "parameter " << p.name << " missing from file");
    }
    if (it->second->rows != p.rows || it->second->cols != p.cols) {
      RETMEM_THROW(ValidationError, "parameter " << p.name << " has shape "
                                                 << it->second->rows << "x"
                                                 << it->second->cols
                                                 << ", expected " << p.rows
                                                 << "x" << p.cols);
    }
  }
  for (Param& p : store.params()) p.value = by_name[p.name]->values;
}

}  // namespace retmem::neural
