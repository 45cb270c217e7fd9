// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace usi {

inline constexpr std::uint64_t kDefaultFingerprintSeed = 0x5eed'2024'0c0f'fee5ULL;

// Karp-Rabin fingerprints modulo the Mersenne prime 2^61 - 1. The base is
// derived from a seed so runs are reproducible.
class Fingerprinter {
 public:
  static constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;

  explicit Fingerprinter(std::uint64_t seed = kDefaultFingerprintSeed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t base() const noexcept { return base_; }

  static std::uint64_t mul(std::uint64_t a, std::uint64_t b) noexcept {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(p & kModulus) +
                      static_cast<std::uint64_t>(p >> 61);
    if (r >= kModulus) r -= kModulus;
    return r;
  }
  static std::uint64_t add(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t r = a + b;
    if (r >= kModulus) r -= kModulus;
    return r;
  }
  static std::uint64_t sub(std::uint64_t a, std::uint64_t b) noexcept {
    return a >= b ? a - b : a + kModulus - b;
  }
  static std::uint64_t symbol(unsigned char c) noexcept { return std::uint64_t{c} + 1; }

  // Horner evaluation; the empty sequence maps to 0.
  std::uint64_t fingerprint(std::string_view bytes) const noexcept;

  // fp(x c) from fp(x).
  std::uint64_t extend(std::uint64_t fp, unsigned char c) const noexcept {
    return add(mul(fp, base_), symbol(c));
  }

  // base^k mod p.
  std::uint64_t power(std::uint64_t k) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
};

// Fixed-length rolling window over a text.
class RollingWindow {
 public:
  RollingWindow(const Fingerprinter& fpr, std::string_view text, std::size_t length);

  bool valid() const noexcept { return pos_ + length_ <= text_.size(); }
  std::size_t position() const noexcept { return pos_; }
  std::uint64_t value() const noexcept { return fp_; }
  void advance() noexcept;

 private:
  std::string_view text_;
  std::size_t length_;
  std::size_t pos_ = 0;
  std::uint64_t fp_ = 0;
  std::uint64_t top_power_ = 0;
  std::uint64_t base_ = 0;
};

// Prefix fingerprints of a whole text: O(1) fingerprint of any fragment.
class PrefixFingerprints {
 public:
  PrefixFingerprints(const Fingerprinter& fpr, std::string_view text);

  std::uint64_t fragment(std::size_t i, std::size_t length) const noexcept {
    return Fingerprinter::sub(prefix_[i + length],
                              Fingerprinter::mul(prefix_[i], powers_[length]));
  }
  std::size_t size_bytes() const noexcept {
    return (prefix_.size() + powers_.size()) * sizeof(std::uint64_t);
  }

 private:
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> powers_;
};

}  // namespace usi
