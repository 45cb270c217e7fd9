// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "oracle.hpp"
#include "usi/approx_topk.hpp"
#include "usi/error.hpp"
#include "usi/suffix_array.hpp"
#include "usi/tuning.hpp"

namespace {

std::size_t naive_lce(const std::string& s, std::size_t i, std::size_t j) {
  std::size_t l = 0;
  while (i + l < s.size() && j + l < s.size() && s[i + l] == s[j + l]) ++l;
  return l;
}

int sign(int x) { return (x > 0) - (x < 0); }

}  // namespace

TEST_CASE("LCE strategies agree with scanning") {
  oracle::Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    std::string s = oracle::random_test_text(rng, 400);
    if (t % 4 == 0) s = std::string(300, 'q') + s;  // long common runs
    const usi::LceOracle direct(s, usi::LceStrategy::direct_compare);
    const usi::LceOracle fp(s, usi::LceStrategy::fingerprint_binary_search, 77);
    CHECK(direct.size_bytes() == 0);
    CHECK(fp.size_bytes() > 0);
    for (int q = 0; q < 200; ++q) {
      const std::size_t i = rng.below(s.size()), j = rng.below(s.size());
      const std::size_t want = naive_lce(s, i, j);
      REQUIRE(direct.lce(i, j) == want);
      REQUIRE(fp.lce(i, j) == want);
      const int cmp = sign(s.compare(i, std::string::npos, s, j, std::string::npos));
      CHECK(sign(direct.compare_suffixes(i, j)) == cmp);
      CHECK(sign(fp.compare_suffixes(i, j)) == cmp);
      const std::size_t li = rng.between(0, s.size() - i), lj = rng.between(0, s.size() - j);
      const int fc = sign(s.compare(i, li, s, j, lj));
      CHECK(sign(direct.compare_fragments(i, li, j, lj)) == fc);
      CHECK(sign(fp.compare_fragments(i, li, j, lj)) == fc);
    }
  }
  CHECK(usi::parse_lce_strategy("direct") == usi::LceStrategy::direct_compare);
  CHECK(usi::parse_lce_strategy("fingerprint") == usi::LceStrategy::fingerprint_binary_search);
  CHECK_THROWS_AS(usi::parse_lce_strategy("psi"), usi::Error);
}

TEST_CASE("sampling rounds partition the positions") {
  const std::size_t n = 103, s = 7;
  std::vector<int> seen(n, 0);
  for (std::size_t r = 0; r < s; ++r)
    for (auto p : usi::sample_positions(n, s, r)) {
      CHECK(p % s == r);
      ++seen[p];
    }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  CHECK_THROWS_AS(usi::sample_positions(n, s, s), usi::Error);
  CHECK(usi::default_sampling_rate(1) == 1);
  CHECK(usi::default_sampling_rate(1024) == 10);
  CHECK(usi::default_sampling_rate(1025) == 11);
}

TEST_CASE("sparse suffix array and lcp match naive sorting") {
  oracle::Rng rng(32);
  for (int t = 0; t < 60; ++t) {
    const std::string s = oracle::random_test_text(rng, 600);
    const usi::LceOracle lce(s);
    const std::size_t step = rng.between(1, 5);
    const auto pos = usi::sample_positions(s.size(), std::min(step, s.size()), 0);
    const auto sp = usi::build_sparse_structures(s, pos, lce);
    auto want = pos;
    std::sort(want.begin(), want.end(), [&](std::uint32_t a, std::uint32_t b) {
      return s.compare(a, std::string::npos, s, b, std::string::npos) < 0;
    });
    REQUIRE(sp.ssa == want);
    CHECK(sp.slcp[0] == 0);
    for (std::size_t r = 1; r < want.size(); ++r) CHECK(sp.slcp[r] == naive_lce(s, want[r - 1], want[r]));
  }
}

TEST_CASE("a full sample reproduces the exact miner") {
  const std::string s = "banana";
  const usi::LceOracle lce(s);
  const auto sp = usi::build_sparse_structures(s, usi::sample_positions(6, 1, 0), lce);
  const auto round = usi::round_top_k(sp, 6, 3);
  REQUIRE(round.size() == 3);
  CHECK(s.substr(round[0].j, round[0].length) == "a");
  CHECK(round[0].f == 3);
  CHECK(round[1].f == 2);
  CHECK(round[2].f == 2);
}

TEST_CASE("merging sums duplicate substrings") {
  const std::string s = "abcabcab";
  const usi::LceOracle lce(s);
  // "ab" appears at 0 and 3; both entries describe the same string.
  std::vector<usi::SampledEntry> a = {{0, 2, 2}, {2, 1, 2}};
  std::vector<usi::SampledEntry> b = {{3, 2, 1}, {1, 1, 1}};
  const auto m = usi::merge_round_lists(a, b, 10, lce);
  REQUIRE(m.size() == 3);
  CHECK(s.substr(m[0].j, m[0].length) == "ab");
  CHECK(m[0].f == 3);
  CHECK(m[1].f == 2);
  CHECK(m[1].length == 1);
  CHECK(m[2].f == 1);
  const auto cut = usi::merge_round_lists(a, b, 1, lce);
  CHECK(cut.size() == 1);
}

TEST_CASE("approximate miner on banana with two rounds") {
  const auto out = usi::approximate_top_k("banana", 2, {.s = 2});
  REQUIRE(out.size() == 2);
  CHECK(std::string("banana").substr(out[0].j, out[0].length) == "a");
  CHECK(out[0].f == 3);
  CHECK(out[1].f == 2);
}

TEST_CASE("single round is exact and more rounds never overcount") {
  oracle::Rng rng(33);
  for (int t = 0; t < 80; ++t) {
    const std::string s = oracle::random_test_text(rng, 800);
    const auto idx = usi::build_suffix_index(s);
    const auto tables = usi::build_tuning_tables(idx);
    const std::uint64_t k = rng.between(1, std::min<std::uint64_t>(300, tables.distinct_substrings()));
    std::vector<std::uint64_t> exact;
    for (const auto& x : usi::exact_top_k(tables, idx, k)) exact.push_back(x.frequency());

    for (auto strategy : {usi::LceStrategy::direct_compare, usi::LceStrategy::fingerprint_binary_search}) {
      const auto one = usi::approximate_top_k(s, k, {.s = 1, .strategy = strategy});
      std::vector<std::uint64_t> f;
      for (const auto& e : one) f.push_back(e.f);
      REQUIRE(oracle::sorted_desc(f) == oracle::sorted_desc(exact));
    }
    for (std::size_t rounds : {2U, 4U, 8U}) {
      if (rounds > s.size()) continue;
      const auto est = usi::approximate_top_k(s, k, {.s = rounds, .oversampling = rounds == 4 ? 1.5 : 1.0});
      CHECK(est.size() <= k);
      for (const auto& e : est) {
        REQUIRE(e.length >= 1);
        REQUIRE(e.j + e.length <= s.size());
        CHECK(e.f <= oracle::count_occurrences(s, std::string_view(s).substr(e.j, e.length)));
      }
    }
  }
}

TEST_CASE("approximate miner argument checks") {
  CHECK_THROWS_AS(usi::approximate_top_k("abc", 0), usi::Error);
  CHECK_THROWS_AS(usi::approximate_top_k("abc", 1, {.s = 4}), usi::Error);
  CHECK_THROWS_AS(usi::approximate_top_k("abc", 1, {.s = 1, .oversampling = 0.5}), usi::Error);
  CHECK_THROWS_AS(usi::approximate_top_k("", 1), usi::Error);
}
