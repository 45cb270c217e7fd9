// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/approx_topk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "usi/error.hpp"
#include "usi/suffix_array.hpp"
#include "usi/tuning.hpp"

namespace usi {

namespace {

std::uint64_t load_word(const char* p) noexcept {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

// First eight bytes of the suffix, big-endian, zero padded.
std::uint64_t suffix_key(std::string_view text, std::size_t pos) noexcept {
  std::uint64_t key = 0;
  const std::size_t avail = std::min<std::size_t>(8, text.size() - pos);
  for (std::size_t k = 0; k < 8; ++k) {
    key <<= 8;
    if (k < avail) key |= static_cast<unsigned char>(text[pos + k]);
  }
  return key;
}

bool sample_order(const FrequencyTriple& a, const FrequencyTriple& b) noexcept {
  const std::uint32_t fa = a.frequency(), fb = b.frequency();
  if (fa != fb) return fa > fb;
  if (a.sd != b.sd) return a.sd < b.sd;
  return a.lb < b.lb;
}

}  // namespace

LceStrategy parse_lce_strategy(std::string_view name) {
  if (name == "direct" || name == "direct-compare") return LceStrategy::direct_compare;
  if (name == "fingerprint" || name == "fingerprint-binary-search")
    return LceStrategy::fingerprint_binary_search;
  throw_usage("unknown LCE strategy '" + std::string(name) + "'");
}

LceOracle::LceOracle(std::string_view text, LceStrategy strategy, std::uint64_t seed)
    : text_(text), strategy_(strategy) {
  if (strategy == LceStrategy::fingerprint_binary_search)
    prefix_ = std::make_unique<PrefixFingerprints>(Fingerprinter(seed), text);
}

std::size_t LceOracle::lce(std::size_t i, std::size_t j) const noexcept {
  const std::size_t limit = text_.size() - std::max(i, j);
  if (i == j) return limit;
  return strategy_ == LceStrategy::direct_compare ? lce_direct(i, j, limit)
                                                  : lce_fingerprint(i, j, limit);
}

std::size_t LceOracle::lce_direct(std::size_t i, std::size_t j,
                                  std::size_t limit) const noexcept {
  const char* a = text_.data() + i;
  const char* b = text_.data() + j;
  std::size_t k = 0;
  while (k + 8 <= limit) {
    const std::uint64_t x = load_word(a + k) ^ load_word(b + k);
    if (x != 0) {
      if constexpr (std::endian::native == std::endian::little)
        return k + static_cast<std::size_t>(std::countr_zero(x)) / 8;
      else
        return k + static_cast<std::size_t>(std::countl_zero(x)) / 8;
    }
    k += 8;
  }
  while (k < limit && a[k] == b[k]) ++k;
  return k;
}

std::size_t LceOracle::lce_fingerprint(std::size_t i, std::size_t j,
                                       std::size_t limit) const noexcept {
  if (limit == 0 || text_[i] != text_[j]) return 0;
  // Galloping first keeps short extensions cheap.
  std::size_t lo = 1, step = 1;
  while (true) {
    const std::size_t probe = std::min(limit, lo + step);
    if (prefix_->fragment(i, probe) != prefix_->fragment(j, probe)) {
      std::size_t hi = probe;  // lo matches, hi does not
      while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (prefix_->fragment(i, mid) == prefix_->fragment(j, mid)) lo = mid;
        else hi = mid;
      }
      return lo;
    }
    lo = probe;
    if (lo == limit) return lo;
    step *= 2;
  }
}

int LceOracle::compare_suffixes(std::size_t i, std::size_t j) const noexcept {
  if (i == j) return 0;
  const std::size_t h = lce(i, j);
  const std::size_t n = text_.size();
  if (i + h == n) return -1;
  if (j + h == n) return 1;
  return static_cast<unsigned char>(text_[i + h]) < static_cast<unsigned char>(text_[j + h]) ? -1
                                                                                             : 1;
}

int LceOracle::compare_fragments(std::size_t i, std::size_t li, std::size_t j,
                                 std::size_t lj) const noexcept {
  const std::size_t shorter = std::min(li, lj);
  const std::size_t h = std::min(lce(i, j), shorter);
  if (h < shorter) {
    return static_cast<unsigned char>(text_[i + h]) < static_cast<unsigned char>(text_[j + h])
               ? -1
               : 1;
  }
  return li < lj ? -1 : (li > lj ? 1 : 0);
}

std::vector<std::uint32_t> sample_positions(std::size_t n, std::size_t s, std::size_t round) {
  if (s == 0 || round >= s) throw_usage("round must lie in [0, s)");
  std::vector<std::uint32_t> out;
  if (round >= n) return out;
  out.reserve((n - round + s - 1) / s);
  for (std::size_t p = round; p < n; p += s) out.push_back(static_cast<std::uint32_t>(p));
  return out;
}

SparseStructures build_sparse_structures(std::string_view text,
                                         std::span<const std::uint32_t> positions,
                                         const LceOracle& oracle) {
  if (positions.empty()) throw_usage("no sampled positions");
  struct Keyed {
    std::uint64_t key;
    std::uint32_t pos;
  };
  std::vector<Keyed> keyed(positions.size());
  for (std::size_t r = 0; r < positions.size(); ++r)
    keyed[r] = {suffix_key(text, positions[r]), positions[r]};
  std::sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key < b.key;
    return oracle.compare_suffixes(a.pos, b.pos) < 0;
  });
  SparseStructures out;
  out.ssa.resize(keyed.size());
  for (std::size_t r = 0; r < keyed.size(); ++r) out.ssa[r] = keyed[r].pos;
  std::vector<Keyed>().swap(keyed);
  out.slcp.assign(out.ssa.size(), 0);
  for (std::size_t r = 1; r < out.ssa.size(); ++r)
    out.slcp[r] = static_cast<std::uint32_t>(oracle.lce(out.ssa[r - 1], out.ssa[r]));
  return out;
}

std::vector<SampledEntry> round_top_k(const SparseStructures& sparse, std::size_t n,
                                      std::uint64_t k) {
  std::vector<SampledEntry> out;
  if (k == 0 || sparse.ssa.empty()) return out;
  const auto& ssa = sparse.ssa;
  const auto& slcp = sparse.slcp;
  const std::size_t m = ssa.size();

  std::vector<FrequencyTriple> t;
  for_each_lcp_interval(std::span<const std::uint32_t>(slcp), [&](const LcpInterval& iv) {
    t.push_back({iv.lb, iv.rb, iv.lcp, iv.lcp - iv.parent_lcp});
  });
  std::sort(t.begin(), t.end(), sample_order);

  auto expand = [&](const FrequencyTriple& x) {
    const std::uint32_t parent = x.sd - x.q;
    for (std::uint32_t l = 1; l <= x.q && out.size() < k; ++l)
      out.push_back({ssa[x.lb], parent + l, x.frequency()});
  };
  for (const FrequencyTriple& x : t) {
    if (out.size() >= k) return out;
    expand(x);
  }
  if (out.size() >= k) return out;

  // Sampled leaves, by increasing depth.
  t.clear();
  for (std::size_t r = 0; r < m; ++r) {
    const std::uint32_t next = r + 1 < m ? slcp[r + 1] : 0;
    const std::uint32_t h = std::max(slcp[r], next);
    const auto depth = static_cast<std::uint32_t>(n - ssa[r]);
    if (depth > h)
      t.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r), depth, depth - h});
  }
  std::sort(t.begin(), t.end(), sample_order);
  for (const FrequencyTriple& x : t) {
    if (out.size() >= k) break;
    expand(x);
  }
  return out;
}

std::vector<SampledEntry> merge_round_lists(std::vector<SampledEntry> prev,
                                            std::vector<SampledEntry> cur, std::uint64_t k,
                                            const LceOracle& oracle) {
  std::vector<SampledEntry> all = std::move(prev);
  all.insert(all.end(), cur.begin(), cur.end());
  std::vector<SampledEntry>().swap(cur);
  std::sort(all.begin(), all.end(), [&](const SampledEntry& a, const SampledEntry& b) {
    return oracle.compare_fragments(a.j, a.length, b.j, b.length) < 0;
  });
  std::size_t w = 0;
  for (std::size_t r = 0; r < all.size(); ++r) {
    if (w > 0 &&
        oracle.compare_fragments(all[w - 1].j, all[w - 1].length, all[r].j, all[r].length) == 0) {
      all[w - 1].f += all[r].f;
    } else {
      all[w++] = all[r];
    }
  }
  all.resize(w);
  std::stable_sort(all.begin(), all.end(), [](const SampledEntry& a, const SampledEntry& b) {
    if (a.f != b.f) return a.f > b.f;
    return a.length < b.length;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

std::size_t default_sampling_rate(std::size_t n) noexcept {
  if (n <= 2) return 1;
  return static_cast<std::size_t>(std::bit_width(n - 1));
}

std::vector<SampledEntry> approximate_top_k(const LceOracle& oracle, std::uint64_t k,
                                            std::size_t s, double oversampling) {
  const std::string_view text = oracle.text();
  const std::size_t n = text.size();
  if (k == 0) throw_usage("K must be at least 1");
  if (s == 0 || s > n) throw_usage("s must lie in [1, n]");
  if (!(oversampling >= 1.0)) throw_usage("oversampling factor must be >= 1");
  const auto keep = static_cast<std::uint64_t>(std::ceil(static_cast<double>(k) * oversampling));

  std::vector<SampledEntry> acc;
  for (std::size_t round = 0; round < s; ++round) {
    std::vector<SampledEntry> cur;
    {
      const std::vector<std::uint32_t> positions = sample_positions(n, s, round);
      const SparseStructures sparse = build_sparse_structures(text, positions, oracle);
      cur = round_top_k(sparse, n, keep);
    }
    acc = merge_round_lists(std::move(acc), std::move(cur), keep, oracle);
  }
  if (acc.size() > k) acc.resize(k);
  return acc;
}

std::vector<SampledEntry> approximate_top_k(std::string_view text, std::uint64_t k,
                                            const ApproxOptions& options) {
  if (text.empty()) throw_usage("text must not be empty");
  const std::size_t s = options.s == 0 ? default_sampling_rate(text.size()) : options.s;
  const LceOracle oracle(text, options.strategy, options.seed);
  return approximate_top_k(oracle, k, s, options.oversampling);
}

}  // namespace usi
