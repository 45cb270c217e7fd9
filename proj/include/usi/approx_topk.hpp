// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "usi/fingerprint.hpp"

namespace usi {

enum class LceStrategy {
  direct_compare,             // word-at-a-time scan, no extra space
  fingerprint_binary_search,  // O(log n) per query over prefix fingerprints
};

LceStrategy parse_lce_strategy(std::string_view name);

// Longest common extension of two suffixes of one text.
class LceOracle {
 public:
  explicit LceOracle(std::string_view text, LceStrategy strategy = LceStrategy::direct_compare,
                     std::uint64_t seed = kDefaultFingerprintSeed);

  std::size_t lce(std::size_t i, std::size_t j) const noexcept;

  // Sign of the lexicographic comparison of the suffixes at i and j.
  int compare_suffixes(std::size_t i, std::size_t j) const noexcept;

  // Sign of the comparison of text[i, i + li) and text[j, j + lj).
  int compare_fragments(std::size_t i, std::size_t li, std::size_t j,
                        std::size_t lj) const noexcept;

  std::string_view text() const noexcept { return text_; }
  LceStrategy strategy() const noexcept { return strategy_; }
  std::size_t size_bytes() const noexcept { return prefix_ ? prefix_->size_bytes() : 0; }

 private:
  std::size_t lce_direct(std::size_t i, std::size_t j, std::size_t limit) const noexcept;
  std::size_t lce_fingerprint(std::size_t i, std::size_t j, std::size_t limit) const noexcept;

  std::string_view text_;
  LceStrategy strategy_;
  std::unique_ptr<PrefixFingerprints> prefix_;
};

// A mined substring text[j, j + length) with its (estimated) frequency.
struct SampledEntry {
  std::uint32_t j = 0;
  std::uint32_t length = 0;
  std::uint64_t f = 0;

  friend bool operator==(const SampledEntry&, const SampledEntry&) = default;
};

std::vector<std::uint32_t> sample_positions(std::size_t n, std::size_t s, std::size_t round);

struct SparseStructures {
  std::vector<std::uint32_t> ssa;
  std::vector<std::uint32_t> slcp;

  std::size_t size_bytes() const noexcept {
    return (ssa.capacity() + slcp.capacity()) * sizeof(std::uint32_t);
  }
};

SparseStructures build_sparse_structures(std::string_view text,
                                         std::span<const std::uint32_t> positions,
                                         const LceOracle& oracle);

// Top-K prefixes of the sampled suffixes by in-sample frequency.
std::vector<SampledEntry> round_top_k(const SparseStructures& sparse, std::size_t n,
                                      std::uint64_t k);

std::vector<SampledEntry> merge_round_lists(std::vector<SampledEntry> prev,
                                            std::vector<SampledEntry> cur, std::uint64_t k,
                                            const LceOracle& oracle);

// ceil(log2 n), at least 1.
std::size_t default_sampling_rate(std::size_t n) noexcept;

struct ApproxOptions {
  std::size_t s = 0;          // 0 selects default_sampling_rate(n)
  double oversampling = 1.0;  // per-round lists keep ceil(K * oversampling) entries
  LceStrategy strategy = LceStrategy::direct_compare;
  std::uint64_t seed = kDefaultFingerprintSeed;
};

std::vector<SampledEntry> approximate_top_k(std::string_view text, std::uint64_t k,
                                            const ApproxOptions& options = {});

std::vector<SampledEntry> approximate_top_k(const LceOracle& oracle, std::uint64_t k,
                                            std::size_t s, double oversampling = 1.0);

}  // namespace usi
