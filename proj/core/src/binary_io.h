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

// Little-endian byte encoding shared by the checkpoint and index formats.

#ifndef QREWRITE_SRC_BINARY_IO_H_
#define QREWRITE_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "qrewrite/errors.h"

namespace qrewrite::internal {

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class ByteWriter {
 public:
  void put_raw(std::string_view bytes) { buf_.append(bytes); }

  template <typename T>
  void put_le(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      buf_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }

  void put_u8(std::uint8_t v) { put_le(v); }
  void put_u32(std::uint32_t v) { put_le(v); }
  void put_i32(std::int32_t v) { put_le(v); }
  void put_u64(std::uint64_t v) { put_le(v); }
  void put_f32(float v) { put_le(v); }
  void put_f64(double v) { put_le(v); }

  void put_string(std::string_view s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    put_raw(s);
  }

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

// Bounds-checked reader; running off the end throws CorruptFileError.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  std::string_view take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      throw CorruptFileError(source_ + ": truncated at byte " + std::to_string(pos_));
    }
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T get_le() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    const std::string_view raw = take(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return std::bit_cast<T>(bits);
  }

  std::uint8_t get_u8() { return get_le<std::uint8_t>(); }
  std::uint32_t get_u32() { return get_le<std::uint32_t>(); }
  std::int32_t get_i32() { return get_le<std::int32_t>(); }
  std::uint64_t get_u64() { return get_le<std::uint64_t>(); }
  float get_f32() { return get_le<float>(); }
  double get_f64() { return get_le<double>(); }

  std::string get_string() {
    const std::uint32_t n = get_u32();
    return std::string(take(n));
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw CorruptFileError(source_ + ": " + what);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::string source_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Writes to a sibling temp file and renames it over path.
inline void write_file_atomically(const std::filesystem::path& path,
                                  std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

// Appends the checksum of everything written so far.
inline void seal(ByteWriter& w) { w.put_u64(fnv1a64(w.bytes())); }

// Verifies and strips the trailing checksum added by seal().
inline std::string_view unseal(std::string_view bytes, const std::string& source) {
  if (bytes.size() < 8) throw CorruptFileError(source + ": file too short");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  ByteReader tail(bytes.substr(bytes.size() - 8), source);
  if (tail.get_u64() != fnv1a64(body)) {
    throw CorruptFileError(source + ": checksum mismatch (file truncated or corrupted)");
  }
  return body;
}

}  // namespace qrewrite::internal

#endif  // QREWRITE_SRC_BINARY_IO_H_
