// Copyright 2026 The QRewrite Authors.
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

#include <string>

#include "binary_io.h"
#include "qrewrite/errors.h"
#include "qrewrite/index.h"

namespace qrewrite {

namespace {

constexpr std::string_view kMagic = "qridx1";
constexpr std::string_view kFamily = "qridx";

void put_hypothesis(internal::ByteWriter& w, const NluHypothesis& h) {
  w.put_string(h.domain);
  w.put_string(h.intent);
  w.put_u32(static_cast<std::uint32_t>(h.slots.size()));
  for (const Slot& s : h.slots) {
    w.put_string(s.type);
    w.put_string(s.value);
  }
}

NluHypothesis get_hypothesis(internal::ByteReader& r) {
  NluHypothesis h;
  h.domain = r.get_string();
  h.intent = r.get_string();
  const std::uint32_t n = r.get_u32();
  if (n > r.remaining()) r.fail("slot count exceeds file size");
  for (std::uint32_t i = 0; i < n; ++i) {
    Slot s;
    s.type = r.get_string();
    s.value = r.get_string();
    h.slots.push_back(std::move(s));
  }
  return h;
}

}  // namespace

bool operator==(const CoarsePartition& a, const CoarsePartition& b) {
  return a.centroids.rows() == b.centroids.rows() && a.centroids.cols() == b.centroids.cols() &&
         a.centroids == b.centroids && a.lists == b.lists;
}

bool operator==(const CandidateIndex& a, const CandidateIndex& b) {
  return a.dim_ == b.dim_ && a.alpha_ == b.alpha_ && a.entries_ == b.entries_ &&
         a.vectors_ == b.vectors_ && a.partition_ == b.partition_;
}

void CandidateIndex::save(const std::filesystem::path& path) const {
  internal::ByteWriter w;
  w.put_raw(kMagic);
  w.put_u32(static_cast<std::uint32_t>(dim_));
  w.put_u64(entries_.size());
  w.put_f64(alpha_);
  for (const CandidateEntry& e : entries_) {
    w.put_u32(e.id);
    w.put_u64(static_cast<std::uint64_t>(e.frequency));
    w.put_string(e.text);
    w.put_u8(e.nlu ? 1 : 0);
    if (e.nlu) put_hypothesis(w, *e.nlu);
    for (float x : vector(e.id)) w.put_f32(x);
  }
  w.put_u8(partition_ ? 1 : 0);
  if (partition_) {
    w.put_u32(static_cast<std::uint32_t>(partition_->n_list()));
    for (Eigen::Index c = 0; c < partition_->centroids.rows(); ++c) {
      for (Eigen::Index j = 0; j < partition_->centroids.cols(); ++j) {
        w.put_f64(partition_->centroids(c, j));
      }
    }
    for (const auto& list : partition_->lists) {
      w.put_u32(static_cast<std::uint32_t>(list.size()));
      for (std::uint32_t id : list) w.put_u32(id);
    }
  }
  internal::seal(w);
  internal::write_file_atomically(path, w.bytes());
}

CandidateIndex CandidateIndex::load(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string bytes = internal::read_file(path);
  if (bytes.size() >= kMagic.size() && bytes.starts_with(kFamily) &&
      !bytes.starts_with(kMagic)) {
    throw VersionError(source + ": unsupported index format version '" +
                       bytes.substr(0, kMagic.size()) + "'");
  }
  if (!bytes.starts_with(kMagic)) throw CorruptFileError(source + ": not an index file");
  internal::ByteReader r(internal::unseal(bytes, source), source);
  r.take(kMagic.size());

  CandidateIndex idx;
  idx.dim_ = static_cast<int>(r.get_u32());
  const std::uint64_t count = r.get_u64();
  idx.alpha_ = r.get_f64();
  if (idx.dim_ < 1 || count == 0 || count > r.remaining()) r.fail("bad index header");
  idx.entries_.reserve(count);
  idx.vectors_.reserve(count * static_cast<std::uint64_t>(idx.dim_));
  for (std::uint64_t i = 0; i < count; ++i) {
    CandidateEntry e;
    e.id = r.get_u32();
    if (e.id != i) r.fail("entry ids out of order");
    e.frequency = static_cast<std::int64_t>(r.get_u64());
    e.text = r.get_string();
    const std::uint8_t has_nlu = r.get_u8();
    if (has_nlu > 1) r.fail("bad hypothesis flag");
    if (has_nlu) e.nlu = get_hypothesis(r);
    for (int j = 0; j < idx.dim_; ++j) idx.vectors_.push_back(r.get_f32());
    idx.entries_.push_back(std::move(e));
  }
  const std::uint8_t has_partition = r.get_u8();
  if (has_partition > 1) r.fail("bad partition flag");
  if (has_partition) {
    const std::uint32_t n_list = r.get_u32();
    if (n_list == 0 || n_list > count) r.fail("bad partition size");
    CoarsePartition part;
    part.centroids.resize(n_list, idx.dim_);
    for (std::uint32_t c = 0; c < n_list; ++c) {
      for (int j = 0; j < idx.dim_; ++j) part.centroids(c, j) = r.get_f64();
    }
    part.lists.resize(n_list);
    std::uint64_t listed = 0;
    for (auto& list : part.lists) {
      const std::uint32_t n = r.get_u32();
      if (n > count) r.fail("inverted list too long");
      for (std::uint32_t k = 0; k < n; ++k) {
        const std::uint32_t id = r.get_u32();
        if (id >= count) r.fail("inverted list id out of range");
        list.push_back(id);
      }
      listed += n;
    }
    if (listed != count) r.fail("inverted lists do not cover every entry exactly once");
    idx.partition_ = std::move(part);
  }
  if (r.remaining() != 0) r.fail("trailing bytes after index body");
  return idx;
}

}  // namespace qrewrite
