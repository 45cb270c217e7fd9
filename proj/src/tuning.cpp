// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/tuning.hpp"

#include <algorithm>

#include "usi/error.hpp"

namespace usi {

namespace {

bool table_order(const FrequencyTriple& a, const FrequencyTriple& b) noexcept {
  const std::uint32_t fa = a.frequency(), fb = b.frequency();
  if (fa != fb) return fa > fb;
  if (a.sd != b.sd) return a.sd < b.sd;
  return a.lb < b.lb;
}

// Leaf triples (frequency 1) in table order, i.e. by increasing string depth.
// A suffix that is a prefix of another suffix contributes nothing.
std::vector<FrequencyTriple> leaf_triples(const SuffixArrayIndex& idx) {
  const std::size_t n = idx.size();
  std::vector<FrequencyTriple> by_position(n);
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint32_t next = j + 1 < n ? idx.lcp[j + 1] : 0;
    const std::uint32_t h = std::max(idx.lcp[j], next);
    const auto depth = static_cast<std::uint32_t>(n - idx.sa[j]);
    const std::uint32_t q = depth - h;
    by_position[idx.sa[j]] = {static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j), depth, q};
    if (q > 0) ++count;
  }
  std::vector<FrequencyTriple> out;
  out.reserve(count);
  for (std::size_t p = n; p-- > 0;) {
    if (by_position[p].q > 0) out.push_back(by_position[p]);
  }
  return out;
}

std::uint64_t count_distinct_substrings(const SuffixArrayIndex& idx) {
  const std::uint64_t n = idx.size();
  std::uint64_t total = n * (n + 1) / 2;
  for (std::uint32_t h : idx.lcp) total -= h;
  return total;
}

void expand(const FrequencyTriple& t, std::uint64_t limit, std::vector<TopKTriple>& out) {
  const std::uint32_t parent = t.sd - t.q;
  for (std::uint32_t l = 1; l <= t.q && out.size() < limit; ++l)
    out.push_back({parent + l, t.lb, t.rb});
}

}  // namespace

TuningTables::TuningTables(std::vector<FrequencyTriple> triples, std::size_t text_length,
                           std::uint64_t distinct_substrings, bool has_leaf_segment)
    : t_(std::move(triples)), n_(text_length), distinct_(distinct_substrings),
      has_leaves_(has_leaf_segment) {
  q_.resize(t_.size());
  l_.resize(t_.size());
  std::uint64_t total = 0;
  std::uint32_t c = 0;  // distinct lengths so far
  std::uint32_t m = 0;  // largest string depth so far
  for (std::size_t i = 0; i < t_.size(); ++i) {
    const FrequencyTriple& t = t_[i];
    if (t.q == 0 || t.q > t.sd) throw_internal("malformed frequency triple");
    total += t.q;
    q_[i] = total;
    if (t.sd > m) {
      c += t.sd - m;
      m = t.sd;
    }
    l_[i] = c;
    if (t.frequency() >= 2) repeated_ = i + 1;
  }
}

TuningTables build_tuning_tables(const SuffixArrayIndex& idx, TuningOptions options) {
  const std::span<const std::uint32_t> lcp(idx.lcp);
  std::size_t internal = 0;
  for_each_lcp_interval(lcp, [&](const LcpInterval&) { ++internal; });

  std::vector<FrequencyTriple> leaves;
  if (options.leaf_segment) leaves = leaf_triples(idx);

  std::vector<FrequencyTriple> t;
  t.reserve(internal + leaves.size());
  for_each_lcp_interval(lcp, [&](const LcpInterval& iv) {
    t.push_back({iv.lb, iv.rb, iv.lcp, iv.lcp - iv.parent_lcp});
  });
  // Internal nodes occur at least twice and leaves once, and leaves are
  // already in table order, so only the internal part needs sorting.
  std::sort(t.begin(), t.end(), table_order);
  t.insert(t.end(), leaves.begin(), leaves.end());
  std::vector<FrequencyTriple>().swap(leaves);
  return TuningTables(std::move(t), idx.size(), count_distinct_substrings(idx),
                      options.leaf_segment);
}

std::vector<TopKTriple> exact_top_k(const TuningTables& tables, const SuffixArrayIndex& idx,
                                    std::uint64_t k) {
  std::vector<TopKTriple> out;
  if (k == 0) return out;
  const std::uint64_t limit = std::min(k, tables.distinct_substrings());
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(limit, std::uint64_t{1} << 26)));
  for (const FrequencyTriple& t : tables.triples()) {
    if (out.size() >= limit) return out;
    expand(t, limit, out);
  }
  if (out.size() < limit && !tables.has_leaf_segment()) {
    for (const FrequencyTriple& t : leaf_triples(idx)) {
      if (out.size() >= limit) break;
      expand(t, limit, out);
    }
  }
  return out;
}

TuneByK tune_by_k(const TuningTables& tables, std::uint64_t k) {
  if (k == 0) throw_usage("K must be at least 1");
  const auto q = tables.q_prefix();
  const auto it = std::lower_bound(q.begin(), q.end(), k);
  if (it == q.end()) {
    if (k > tables.distinct_substrings())
      throw_usage("K = " + std::to_string(k) + " exceeds the " +
                  std::to_string(tables.distinct_substrings()) + " distinct substrings");
    throw_usage("K reaches frequency-1 substrings; rebuild the tables with their leaf segment");
  }
  const auto i = static_cast<std::size_t>(it - q.begin());
  const FrequencyTriple& t = tables.triples()[i];
  const std::uint64_t before = i == 0 ? 0 : q[i - 1];
  const std::uint64_t prior_lengths = i == 0 ? 0 : tables.l_prefix()[i - 1];
  // Only the first (k - before) letters of the edge are part of the top-K.
  const std::uint64_t reached = std::uint64_t{t.sd - t.q} + (k - before);
  return {t.frequency(), std::max(prior_lengths, reached)};
}

TuneByTau tune_by_tau(const TuningTables& tables, std::uint64_t tau) {
  if (tau == 0) throw_usage("tau must be at least 1");
  const auto t = tables.triples();
  if (tau == 1 && !tables.has_leaf_segment())
    return {tables.distinct_substrings(), tables.text_length()};
  // First triple whose frequency drops below tau.
  const auto it = std::partition_point(t.begin(), t.end(), [&](const FrequencyTriple& x) {
    return x.frequency() >= tau;
  });
  if (it == t.begin()) return {0, 0};
  const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
  return {tables.q_prefix()[i], tables.l_prefix()[i]};
}

}  // namespace usi
