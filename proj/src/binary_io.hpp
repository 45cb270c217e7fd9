// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "usi/error.hpp"

namespace usi::detail {

// FNV-1a, 64-bit.
class Checksum {
 public:
  void update(const char* data, std::size_t size) noexcept {
    for (std::size_t i = 0; i < size; ++i) {
      h_ ^= static_cast<unsigned char>(data[i]);
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline void store_le64(char* out, std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}
inline std::uint64_t load_le64(const char* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[i]);
  return v;
}

// Little-endian writer that checksums everything it emits.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const char* data, std::size_t size) {
    out_.write(data, static_cast<std::streamsize>(size));
    if (!out_) throw_data("write failed");
    sum_.update(data, size);
  }
  void u64(std::uint64_t v) {
    char buf[8];
    store_le64(buf, v);
    bytes(buf, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  template <class T, class Convert>
  void array(std::span<const T> values, Convert convert) {
    u64(values.size());
    constexpr std::size_t kChunk = 1 << 14;
    std::vector<char> buf(kChunk * 8);
    for (std::size_t i = 0; i < values.size(); i += kChunk) {
      const std::size_t end = std::min(values.size(), i + kChunk);
      for (std::size_t k = i; k < end; ++k) store_le64(buf.data() + (k - i) * 8, convert(values[k]));
      bytes(buf.data(), (end - i) * 8);
    }
  }

  std::uint64_t checksum() const noexcept { return sum_.value(); }

 private:
  std::ostream& out_;
  Checksum sum_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  void bytes(char* data, std::size_t size) {
    in_.read(data, static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) throw_data("truncated input");
    sum_.update(data, size);
  }
  std::uint64_t u64() {
    char buf[8];
    bytes(buf, 8);
    return load_le64(buf);
  }
  double f64() { return std::bit_cast<double>(u64()); }

  // Reads a length-prefixed array; limit guards against absurd lengths in
  // corrupted input.
  template <class T, class Convert>
  std::vector<T> array(std::uint64_t limit, Convert convert) {
    const std::uint64_t size = u64();
    if (size > limit) throw_data("array length " + std::to_string(size) + " exceeds limit");
    std::vector<T> out(size);
    constexpr std::size_t kChunk = 1 << 14;
    std::vector<char> buf(kChunk * 8);
    for (std::size_t i = 0; i < size; i += kChunk) {
      const std::size_t end = std::min<std::size_t>(size, i + kChunk);
      bytes(buf.data(), (end - i) * 8);
      for (std::size_t k = i; k < end; ++k) out[k] = convert(load_le64(buf.data() + (k - i) * 8));
    }
    return out;
  }

  std::uint64_t checksum() const noexcept { return sum_.value(); }

 private:
  std::istream& in_;
  Checksum sum_;
};

}  // namespace usi::detail
