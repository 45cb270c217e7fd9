// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/fingerprint.hpp"

#include <random>

namespace usi {

Fingerprinter::Fingerprinter(std::uint64_t seed) : seed_(seed) {
  std::mt19937_64 gen(seed);
  base_ = 2 + gen() % (kModulus - 3);
}

std::uint64_t Fingerprinter::fingerprint(std::string_view bytes) const noexcept {
  std::uint64_t fp = 0;
  for (unsigned char c : bytes) fp = extend(fp, c);
  return fp;
}

std::uint64_t Fingerprinter::power(std::uint64_t k) const noexcept {
  std::uint64_t result = 1;
  std::uint64_t b = base_;
  while (k > 0) {
    if (k & 1) result = mul(result, b);
    b = mul(b, b);
    k >>= 1;
  }
  return result;
}

RollingWindow::RollingWindow(const Fingerprinter& fpr, std::string_view text,
                             std::size_t length)
    : text_(text), length_(length), base_(fpr.base()) {
  top_power_ = fpr.power(length == 0 ? 0 : length - 1);
  if (valid()) fp_ = fpr.fingerprint(text.substr(0, length));
}

void RollingWindow::advance() noexcept {
  const auto out = static_cast<unsigned char>(text_[pos_]);
  ++pos_;
  if (!valid()) return;
  const auto in = static_cast<unsigned char>(text_[pos_ + length_ - 1]);
  const std::uint64_t head = Fingerprinter::mul(Fingerprinter::symbol(out), top_power_);
  fp_ = Fingerprinter::add(Fingerprinter::mul(Fingerprinter::sub(fp_, head), base_),
                           Fingerprinter::symbol(in));
}

PrefixFingerprints::PrefixFingerprints(const Fingerprinter& fpr, std::string_view text)
    : prefix_(text.size() + 1), powers_(text.size() + 1) {
  prefix_[0] = 0;
  powers_[0] = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    prefix_[i + 1] = fpr.extend(prefix_[i], static_cast<unsigned char>(text[i]));
    powers_[i + 1] = Fingerprinter::mul(powers_[i], fpr.base());
  }
}

}  // namespace usi
