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
#include "qrewrite/encoder.h"
#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

constexpr std::string_view kMagic = "qrenc1";
constexpr std::string_view kMagicFamily = "qrenc";

template <typename Derived>
void put_matrix(internal::ByteWriter& w, const Eigen::MatrixBase<Derived>& m) {
  w.put_u64(static_cast<std::uint64_t>(m.rows()));
  w.put_u64(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.put_f64(m(r, c));
  }
}

template <typename Derived>
void get_matrix(internal::ByteReader& in, Eigen::MatrixBase<Derived>& m,
                const char* name) {
  const std::uint64_t rows = in.get_u64();
  const std::uint64_t cols = in.get_u64();
  if (rows != static_cast<std::uint64_t>(m.rows()) ||
      cols != static_cast<std::uint64_t>(m.cols())) {
    in.fail(std::string("tensor ") + name + " has shape " + std::to_string(rows) + "x" +
            std::to_string(cols) + ", config implies " + std::to_string(m.rows()) + "x" +
            std::to_string(m.cols()));
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.get_f64();
  }
}

// Visits tensors in the documented on-disk order.
template <typename Params, typename Fn>
void visit_tensors(Params& p, Fn&& fn) {
  fn(p.embedding, "embedding");
  fn(p.gru_fwd.wx, "gru_fwd.wx");
  fn(p.gru_fwd.wh, "gru_fwd.wh");
  fn(p.gru_fwd.b, "gru_fwd.b");
  fn(p.gru_bwd.wx, "gru_bwd.wx");
  fn(p.gru_bwd.wh, "gru_bwd.wh");
  fn(p.gru_bwd.b, "gru_bwd.b");
  fn(p.pool_query, "pool_query");
  fn(p.pool_out, "pool_out");
  fn(p.head_source.w, "head_source.w");
  fn(p.head_source.b, "head_source.b");
  fn(p.head_target.w, "head_target.w");
  fn(p.head_target.b, "head_target.b");
}

}  // namespace

void save_checkpoint(const EncoderParams& params, const std::filesystem::path& path) {
  const EncoderConfig& cfg = params.config;
  cfg.validate();
  internal::ByteWriter w;
  w.put_raw(kMagic);
  w.put_i32(cfg.vocab_size);
  w.put_i32(cfg.d_emb);
  w.put_i32(cfg.d_hid);
  w.put_i32(cfg.n_heads);
  w.put_i32(cfg.d_head);
  w.put_i32(cfg.d_out);
  w.put_i32(cfg.max_len);
  w.put_f64(cfg.dropout_rate);
  w.put_u64(cfg.seed);
  visit_tensors(params, [&](const auto& m, const char*) { put_matrix(w, m); });
  internal::seal(w);
  internal::write_file_atomically(path, w.bytes());
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string bytes = internal::read_file(path);
  if (bytes.size() < kMagic.size() ||
      std::string_view(bytes).substr(0, kMagic.size()) != kMagic) {
    if (bytes.compare(0, kMagicFamily.size(), kMagicFamily) == 0) {
      throw VersionError(source + ": unsupported checkpoint version '" +
                         bytes.substr(0, kMagic.size()) + "', expected '" +
                         std::string(kMagic) + "'");
    }
    throw CorruptFileError(source + ": not an encoder checkpoint (bad magic)");
  }
  internal::ByteReader in(internal::unseal(bytes, source), source);
  in.take(kMagic.size());

  EncoderConfig cfg;
  cfg.vocab_size = in.get_i32();
  cfg.d_emb = in.get_i32();
  cfg.d_hid = in.get_i32();
  cfg.n_heads = in.get_i32();
  cfg.d_head = in.get_i32();
  cfg.d_out = in.get_i32();
  cfg.max_len = in.get_i32();
  cfg.dropout_rate = in.get_f64();
  cfg.seed = in.get_u64();
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    in.fail(std::string("stored config is invalid: ") + e.what());
  }

  EncoderParams params = EncoderParams::zeros(cfg);
  visit_tensors(params, [&](auto& m, const char* name) { get_matrix(in, m, name); });
  if (in.remaining() != 0) in.fail("trailing bytes after the last tensor");
  return params;
}

}  // namespace qrewrite
