// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace usi {

// Suffix array and LCP array of a text. lcp[0] = 0 and lcp[j] is the longest
// common prefix of the suffixes at sa[j - 1] and sa[j]. No terminator is
// appended: a suffix that is a prefix of another sorts first.
struct SuffixArrayIndex {
  std::vector<std::uint32_t> sa;
  std::vector<std::uint32_t> lcp;

  std::size_t size() const noexcept { return sa.size(); }
  std::size_t size_bytes() const noexcept {
    return (sa.size() + lcp.size()) * sizeof(std::uint32_t);
  }
};

// SA-IS (induced sorting), O(n) time.
std::vector<std::uint32_t> build_suffix_array(std::string_view text);

// Kasai et al., O(n) time.
std::vector<std::uint32_t> build_lcp(std::string_view text,
                                     std::span<const std::uint32_t> sa);

SuffixArrayIndex build_suffix_index(std::string_view text);

// Inclusive range of suffix-array ranks.
struct SaRange {
  std::size_t lb = 0;
  std::size_t rb = 0;

  std::size_t count() const noexcept { return rb - lb + 1; }
  friend bool operator==(const SaRange&, const SaRange&) = default;
};

// Ranks of all suffixes that start with the pattern, by binary search in
// O(m log n). Empty when the pattern does not occur.
std::optional<SaRange> pattern_interval(std::span<const std::uint32_t> sa,
                                        std::string_view text,
                                        std::string_view pattern);

// An lcp-interval, i.e. an explicit internal node of the suffix tree of the
// indexed suffixes. frequency = rb - lb + 1; parent_lcp is the string depth
// of the enclosing interval (0 for children of the root).
struct LcpInterval {
  std::uint32_t lcp = 0;
  std::uint32_t lb = 0;
  std::uint32_t rb = 0;
  std::uint32_t parent_lcp = 0;

  std::uint32_t frequency() const noexcept { return rb - lb + 1; }
  friend bool operator==(const LcpInterval&, const LcpInterval&) = default;
};

// Stack-based bottom-up traversal of the lcp array (children are reported
// before their parents). The root interval (lcp 0) is not reported.
// Visitor is invoked as visit(const LcpInterval&).
template <class Visitor>
void for_each_lcp_interval(std::span<const std::uint32_t> lcp, Visitor&& visit) {
  struct Open {
    std::uint32_t lcp;
    std::uint32_t lb;
  };
  const std::size_t n = lcp.size();
  if (n < 2) return;
  std::vector<Open> stack;
  stack.push_back({0, 0});
  for (std::size_t i = 1; i <= n; ++i) {
    const std::uint32_t cur = i < n ? lcp[i] : 0;
    auto lb = static_cast<std::uint32_t>(i - 1);
    while (cur < stack.back().lcp) {
      const Open top = stack.back();
      stack.pop_back();
      const std::uint32_t parent = std::max(cur, stack.back().lcp);
      visit(LcpInterval{top.lcp, top.lb, static_cast<std::uint32_t>(i - 1), parent});
      lb = top.lb;
    }
    if (cur > stack.back().lcp) stack.push_back({cur, lb});
  }
}

std::vector<LcpInterval> bottom_up_lcp_intervals(std::span<const std::uint32_t> lcp);

// On-disk cache of the suffix and lcp arrays, keyed by a content hash of the
// text. Arrays are stored as little-endian 64-bit integers.
void save_suffix_cache(const std::filesystem::path& path, std::string_view text,
                       const SuffixArrayIndex& index);
std::optional<SuffixArrayIndex> load_suffix_cache(const std::filesystem::path& path,
                                                  std::string_view text);

}  // namespace usi
