// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "usi/suffix_array.hpp"

namespace usi {

// One suffix-tree node (explicit internal node or leaf) together with the q
// letters on the edge from its parent. It stands for the q distinct
// substrings of lengths sd - q + 1 .. sd, all occurring rb - lb + 1 times.
struct FrequencyTriple {
  std::uint32_t lb = 0;
  std::uint32_t rb = 0;
  std::uint32_t sd = 0;
  std::uint32_t q = 0;

  std::uint32_t frequency() const noexcept { return rb - lb + 1; }
  friend bool operator==(const FrequencyTriple&, const FrequencyTriple&) = default;
};

// A listed top-K substring: text[sa[lb] .. sa[lb] + lcp - 1], occurring at
// every rank in [lb, rb].
struct TopKTriple {
  std::uint32_t lcp = 0;
  std::uint32_t lb = 0;
  std::uint32_t rb = 0;

  std::uint32_t frequency() const noexcept { return rb - lb + 1; }
  friend bool operator==(const TopKTriple&, const TopKTriple&) = default;
};

struct TuningOptions {
  // Leaves (frequency-1 triples) are needed to tune or list beyond the
  // substrings that occur at least twice. Omitting them saves 28 bytes per
  // text position.
  bool leaf_segment = true;
};

// Triples sorted by frequency (descending), then string depth (ascending),
// then lb (ascending); q_prefix[i] is the number of substrings represented by
// triples 0..i and l_prefix[i] the number of distinct lengths among them.
class TuningTables {
 public:
  TuningTables() = default;
  TuningTables(std::vector<FrequencyTriple> triples, std::size_t text_length,
               std::uint64_t distinct_substrings, bool has_leaf_segment);

  std::span<const FrequencyTriple> triples() const noexcept { return t_; }
  std::span<const std::uint64_t> q_prefix() const noexcept { return q_; }
  std::span<const std::uint32_t> l_prefix() const noexcept { return l_; }

  std::size_t text_length() const noexcept { return n_; }
  bool has_leaf_segment() const noexcept { return has_leaves_; }
  // Number of leading triples with frequency >= 2.
  std::size_t repeated_count() const noexcept { return repeated_; }

  // Distinct substrings represented by the stored triples.
  std::uint64_t represented_substrings() const noexcept {
    return q_.empty() ? 0 : q_.back();
  }
  std::uint64_t distinct_substrings() const noexcept { return distinct_; }

  std::size_t size_bytes() const noexcept {
    return t_.size() * (sizeof(FrequencyTriple) + sizeof(std::uint64_t) + sizeof(std::uint32_t));
  }

 private:
  std::vector<FrequencyTriple> t_;
  std::vector<std::uint64_t> q_;
  std::vector<std::uint32_t> l_;
  std::size_t n_ = 0;
  std::size_t repeated_ = 0;
  std::uint64_t distinct_ = 0;
  bool has_leaves_ = false;
};

TuningTables build_tuning_tables(const SuffixArrayIndex& idx, TuningOptions options = {});

// Exact top-K: the first K substrings in table order. Returns fewer than K
// only when the text has fewer distinct substrings. When the tables were
// built without their leaf segment, frequency-1 substrings are derived from
// idx on demand.
std::vector<TopKTriple> exact_top_k(const TuningTables& tables, const SuffixArrayIndex& idx,
                                    std::uint64_t k);

struct TuneByK {
  std::uint32_t tau = 0;
  std::uint64_t lengths = 0;
};
struct TuneByTau {
  std::uint64_t k = 0;
  std::uint64_t lengths = 0;
};

// tau_K and L_K for the top-K substrings. Throws when K exceeds the number
// of substrings the tables can represent.
TuneByK tune_by_k(const TuningTables& tables, std::uint64_t k);

// K_tau and L_tau; (0, 0) when no substring occurs tau times.
TuneByTau tune_by_tau(const TuningTables& tables, std::uint64_t tau);

}  // namespace usi
