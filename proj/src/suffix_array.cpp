// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/suffix_array.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>

#include "binary_io.hpp"
#include "usi/error.hpp"
#include "usi/fingerprint.hpp"

namespace usi {

namespace {

constexpr std::uint32_t kNone = 0xffffffffU;

template <class Symbols>
std::vector<std::uint32_t> sort_naive(const Symbols& s, std::uint32_t n) {
  std::vector<std::uint32_t> sa(n);
  std::iota(sa.begin(), sa.end(), 0U);
  std::sort(sa.begin(), sa.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (a == b) return false;
    while (a < n && b < n) {
      if (s[a] != s[b]) return s[a] < s[b];
      ++a;
      ++b;
    }
    return a == n;
  });
  return sa;
}

// Induced sorting over symbols in [0, upper]. Symbols is indexable by
// position (a byte view at the top level, a vector of names when recursing).
template <class Symbols>
std::vector<std::uint32_t> sa_is(const Symbols& s, std::uint32_t n, std::uint32_t upper) {
  if (n == 0) return {};
  if (n < 16) return sort_naive(s, n);

  std::vector<std::uint32_t> sa(n);
  std::vector<bool> ls(n, false);  // true: S-type
  for (std::uint32_t i = n - 1; i-- > 0;) {
    ls[i] = s[i] == s[i + 1] ? ls[i + 1] : (s[i] < s[i + 1]);
  }
  std::vector<std::uint32_t> sum_l(upper + 2, 0), sum_s(upper + 2, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!ls[i]) ++sum_s[s[i]];
    else ++sum_l[s[i] + 1];
  }
  for (std::uint32_t i = 0; i <= upper; ++i) {
    sum_s[i] += sum_l[i];
    if (i < upper) sum_l[i + 1] += sum_s[i];
  }

  auto induce = [&](const std::vector<std::uint32_t>& lms) {
    std::fill(sa.begin(), sa.end(), kNone);
    std::vector<std::uint32_t> buf(upper + 2);
    std::copy(sum_s.begin(), sum_s.end(), buf.begin());
    for (std::uint32_t d : lms) {
      if (d == n) continue;
      sa[buf[s[d]]++] = d;
    }
    std::copy(sum_l.begin(), sum_l.end(), buf.begin());
    sa[buf[s[n - 1]]++] = n - 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t v = sa[i];
      if (v != kNone && v >= 1 && !ls[v - 1]) sa[buf[s[v - 1]]++] = v - 1;
    }
    std::copy(sum_l.begin(), sum_l.end(), buf.begin());
    for (std::uint32_t i = n; i-- > 0;) {
      const std::uint32_t v = sa[i];
      if (v != kNone && v >= 1 && ls[v - 1]) sa[--buf[s[v - 1] + 1]] = v - 1;
    }
  };

  std::vector<std::uint32_t> lms_map(n + 1, kNone);
  std::uint32_t m = 0;
  for (std::uint32_t i = 1; i < n; ++i) {
    if (!ls[i - 1] && ls[i]) lms_map[i] = m++;
  }
  std::vector<std::uint32_t> lms;
  lms.reserve(m);
  for (std::uint32_t i = 1; i < n; ++i) {
    if (!ls[i - 1] && ls[i]) lms.push_back(i);
  }

  induce(lms);

  if (m > 0) {
    std::vector<std::uint32_t> sorted_lms;
    sorted_lms.reserve(m);
    for (std::uint32_t v : sa) {
      if (lms_map[v] != kNone) sorted_lms.push_back(v);
    }
    std::vector<std::uint32_t> rec_s(m);
    std::uint32_t rec_upper = 0;
    rec_s[lms_map[sorted_lms[0]]] = 0;
    for (std::uint32_t i = 1; i < m; ++i) {
      std::uint32_t l = sorted_lms[i - 1];
      std::uint32_t r = sorted_lms[i];
      const std::uint32_t end_l = lms_map[l] + 1 < m ? lms[lms_map[l] + 1] : n;
      const std::uint32_t end_r = lms_map[r] + 1 < m ? lms[lms_map[r] + 1] : n;
      bool same = true;
      if (end_l - l != end_r - r) {
        same = false;
      } else {
        while (l < end_l) {
          if (s[l] != s[r]) break;
          ++l;
          ++r;
        }
        if (l == n || s[l] != s[r]) same = false;
      }
      if (!same) ++rec_upper;
      rec_s[lms_map[sorted_lms[i]]] = rec_upper;
    }
    // Release what the recursion does not need.
    std::vector<std::uint32_t>().swap(lms_map);
    std::vector<std::uint32_t>().swap(sa);

    const std::vector<std::uint32_t> rec_sa = sa_is(rec_s, m, rec_upper);
    std::vector<std::uint32_t>().swap(rec_s);
    for (std::uint32_t i = 0; i < m; ++i) sorted_lms[i] = lms[rec_sa[i]];
    sa.assign(n, kNone);
    induce(sorted_lms);
  }
  return sa;
}

struct ByteSymbols {
  const unsigned char* data;
  std::uint32_t operator[](std::size_t i) const noexcept { return data[i]; }
};

// Compares the suffix at pos with the pattern, skipping the first `skip`
// characters (known to match). Returns the comparison sign and updates
// `matched` to the length of the common prefix.
int compare_suffix(std::string_view text, std::size_t pos, std::string_view pattern,
                   std::size_t skip, std::size_t& matched) noexcept {
  std::size_t k = skip;
  const std::size_t avail = text.size() - pos;
  const std::size_t limit = std::min(avail, pattern.size());
  while (k < limit && text[pos + k] == pattern[k]) ++k;
  matched = k;
  if (k == pattern.size()) return 0;
  if (k == avail) return -1;
  return static_cast<unsigned char>(text[pos + k]) < static_cast<unsigned char>(pattern[k]) ? -1 : 1;
}

constexpr char kCacheMagic[8] = {'U', 'S', 'I', 'S', 'A', 'C', '0', '1'};
constexpr std::uint64_t kCacheVersion = 1;

std::uint64_t content_hash(std::string_view text) {
  return Fingerprinter(kDefaultFingerprintSeed).fingerprint(text);
}

}  // namespace

std::vector<std::uint32_t> build_suffix_array(std::string_view text) {
  if (text.size() > kNone - 2) throw_usage("text too long for 32-bit suffix arrays");
  const ByteSymbols s{reinterpret_cast<const unsigned char*>(text.data())};
  return sa_is(s, static_cast<std::uint32_t>(text.size()), 255);
}

std::vector<std::uint32_t> build_lcp(std::string_view text,
                                     std::span<const std::uint32_t> sa) {
  const std::size_t n = sa.size();
  std::vector<std::uint32_t> lcp(n, 0);
  if (n == 0) return lcp;
  std::vector<std::uint32_t> rank(n);
  for (std::size_t j = 0; j < n; ++j) rank[sa[j]] = static_cast<std::uint32_t>(j);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    const std::size_t j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && text[i + h] == text[j + h]) ++h;
    lcp[rank[i]] = static_cast<std::uint32_t>(h);
    if (h > 0) --h;
  }
  return lcp;
}

SuffixArrayIndex build_suffix_index(std::string_view text) {
  SuffixArrayIndex idx;
  idx.sa = build_suffix_array(text);
  idx.lcp = build_lcp(text, idx.sa);
  return idx;
}

std::optional<SaRange> pattern_interval(std::span<const std::uint32_t> sa,
                                        std::string_view text,
                                        std::string_view pattern) {
  if (pattern.empty()) throw_usage("pattern must not be empty");
  const std::size_t n = sa.size();
  if (n == 0 || pattern.size() > text.size()) return std::nullopt;

  // Lower bound: first rank whose suffix is >= pattern (prefix match counts
  // as equal). lo/hi track the common prefix with the bracketing suffixes.
  std::size_t lo = 0, hi = n, lcp_lo = 0, lcp_hi = 0;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::size_t matched = 0;
    const int c = compare_suffix(text, sa[mid], pattern, std::min(lcp_lo, lcp_hi), matched);
    if (c < 0) {
      lo = mid + 1;
      lcp_lo = matched;
    } else {
      hi = mid;
      lcp_hi = matched;
    }
  }
  const std::size_t first = lo;
  if (first == n) return std::nullopt;
  {
    std::size_t matched = 0;
    if (compare_suffix(text, sa[first], pattern, 0, matched) != 0) return std::nullopt;
  }
  // Upper bound: first rank whose suffix is > pattern.
  lo = first;
  hi = n;
  lcp_lo = pattern.size();
  lcp_hi = 0;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::size_t matched = 0;
    const int c = compare_suffix(text, sa[mid], pattern, std::min(lcp_lo, lcp_hi), matched);
    if (c <= 0) {
      lo = mid + 1;
      lcp_lo = matched;
    } else {
      hi = mid;
      lcp_hi = matched;
    }
  }
  return SaRange{first, lo - 1};
}

std::vector<LcpInterval> bottom_up_lcp_intervals(std::span<const std::uint32_t> lcp) {
  std::vector<LcpInterval> out;
  for_each_lcp_interval(lcp, [&](const LcpInterval& iv) { out.push_back(iv); });
  return out;
}

void save_suffix_cache(const std::filesystem::path& path, std::string_view text,
                       const SuffixArrayIndex& index) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_data("cannot open " + path.string() + " for writing");
  detail::BinaryWriter w(out);
  w.bytes(kCacheMagic, sizeof kCacheMagic);
  w.u64(kCacheVersion);
  w.u64(text.size());
  w.u64(content_hash(text));
  const auto id = [](std::uint32_t v) { return std::uint64_t{v}; };
  w.array(std::span<const std::uint32_t>(index.sa), id);
  w.array(std::span<const std::uint32_t>(index.lcp), id);
  const std::uint64_t sum = w.checksum();
  w.u64(sum);
}

std::optional<SuffixArrayIndex> load_suffix_cache(const std::filesystem::path& path,
                                                  std::string_view text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  detail::BinaryReader r(in);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kCacheMagic, sizeof magic) != 0)
    throw_data(path.string() + " is not a suffix-array cache");
  if (r.u64() != kCacheVersion) throw_data(path.string() + ": unsupported cache version");
  if (r.u64() != text.size() || r.u64() != content_hash(text)) return std::nullopt;
  const auto narrow = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  SuffixArrayIndex idx;
  idx.sa = r.array<std::uint32_t>(text.size(), narrow);
  idx.lcp = r.array<std::uint32_t>(text.size(), narrow);
  const std::uint64_t expect = r.checksum();
  if (r.u64() != expect) throw_data(path.string() + ": checksum mismatch");
  if (idx.sa.size() != text.size() || idx.lcp.size() != text.size())
    throw_data(path.string() + ": array length mismatch");
  return idx;
}

}  // namespace usi
