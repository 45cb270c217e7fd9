// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <string>

#include "oracle.hpp"
#include "usi/competitors.hpp"
#include "usi/error.hpp"
#include "usi/suffix_array.hpp"
#include "usi/tuning.hpp"

namespace {

std::shared_ptr<const usi::TextIndex> make_base(const std::string& s, const std::vector<double>& w,
                                                usi::UtilitySpec spec = {}) {
  return usi::TextIndex::build(usi::WeightedText(s, w), spec);
}

// Reference cache: evicts the least recently used pattern, or the least
// queried one with ties going to the earliest inserted.
class ModelCache {
 public:
  ModelCache(std::size_t capacity, bool lru) : capacity_(capacity), lru_(lru) {}

  void access(const std::string& p) {
    ++clock_;
    if (auto it = entries_.find(p); it != entries_.end()) {
      it->second.last = clock_;
      ++it->second.count;
      return;
    }
    if (capacity_ == 0) return;
    if (entries_.size() >= capacity_) {
      auto victim = entries_.begin();
      for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        const auto& a = it->second;
        const auto& b = victim->second;
        const bool better = lru_ ? a.last < b.last
                                 : (a.count != b.count ? a.count < b.count : a.inserted < b.inserted);
        if (better) victim = it;
      }
      entries_.erase(victim);
    }
    entries_[p] = {clock_, clock_, 1};
  }
  bool contains(const std::string& p) const { return entries_.count(p) != 0; }
  std::size_t size() const { return entries_.size(); }

 private:
  struct E {
    std::uint64_t last = 0, inserted = 0, count = 0;
  };
  std::size_t capacity_;
  bool lru_;
  std::uint64_t clock_ = 0;
  std::map<std::string, E> entries_;
};

std::uint64_t true_count(const std::string& s, const usi::SampledEntry& e) {
  return oracle::count_occurrences(s, std::string_view(s).substr(e.j, e.length));
}

}  // namespace

TEST_CASE("indexed min-heap orders by priority then age") {
  usi::IndexedMinHeap<int> h;
  const auto a = h.push(5, 1);
  h.push(3, 2);
  const auto c = h.push(3, 3);
  h.push(9, 4);
  CHECK(h.value(h.top()) == 2);
  h.update(c, 1);
  CHECK(h.pop() == 3);
  CHECK(h.pop() == 2);
  h.update(a, 10);
  CHECK(h.pop() == 4);
  CHECK(h.pop() == 1);
  CHECK(h.empty());
  // Reused handles behave like fresh ones.
  const auto d = h.push(2, 7);
  h.push(2, 8);
  CHECK(h.value(h.top()) == 7);
  h.update(d, 4);
  CHECK(h.pop() == 8);
}

TEST_CASE("cache eviction follows the reference model") {
  oracle::Rng rng(51);
  const std::string s = oracle::random_text(rng, 400, 3);
  const auto base = make_base(s, oracle::random_weights(rng, s.size()));
  for (int round = 0; round < 20; ++round) {
    const bool lru = round % 2 == 0;
    const std::size_t capacity = rng.between(0, 12);
    usi::QueryCache cache(capacity, lru ? usi::CachePolicy::lru : usi::CachePolicy::least_frequently_queried);
    ModelCache model(capacity, lru);
    std::vector<std::string> universe;
    for (int u = 0; u < 25; ++u) universe.push_back(s.substr(rng.below(390), rng.between(1, 4)));
    for (int step = 0; step < 600; ++step) {
      const std::string& p = universe[rng.below(universe.size())];
      const bool expect_hit = model.contains(p);
      bool hit = false;
      cache.query(*base, p, &hit);
      model.access(p);
      REQUIRE(hit == expect_hit);
      REQUIRE(cache.size() == model.size());
      REQUIRE(cache.size() <= capacity);
      for (const auto& q : universe) REQUIRE(cache.contains(q) == model.contains(q));
    }
    cache.clear();
    CHECK(cache.size() == 0);
  }
}

TEST_CASE("count-min sketch never undercounts") {
  usi::CountMinSketch cms(4, 64, 9);
  std::map<std::uint64_t, std::uint64_t> truth;
  oracle::Rng rng(52);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t key = rng.below(300) * 0x9e3779b97f4a7c15ULL;
    cms.add(key);
    ++truth[key];
  }
  for (const auto& [key, c] : truth) CHECK(cms.estimate(key) >= c);
  cms.clear();
  CHECK(cms.estimate(truth.begin()->first) == 0);
  CHECK(cms.size_bytes() == 4 * 64 * sizeof(std::uint32_t));
}

TEST_CASE("all baselines return brute-force utilities whatever the cache state") {
  oracle::Rng rng(53);
  for (int t = 0; t < 25; ++t) {
    const std::string s = oracle::random_test_text(rng, 200);
    const auto w = oracle::random_weights(rng, s.size());
    const int li = static_cast<int>(rng.below(2)), gi = static_cast<int>(rng.below(4));
    const auto base = make_base(s, w, {static_cast<usi::LocalOp>(li), static_cast<usi::GlobalOp>(gi)});
    const std::size_t capacity = rng.between(0, 8);
    std::vector<std::unique_ptr<usi::QueryEngine>> engines;
    for (const char* name : {"bsl1", "bsl2", "bsl3", "bsl4"})
      engines.push_back(usi::make_baseline(name, base, capacity));
    for (int q = 0; q < 300; ++q) {
      const std::size_t i = rng.below(s.size());
      std::string p = s.substr(i, rng.between(1, std::min<std::size_t>(6, s.size() - i)));
      if (q % 10 == 0) p += '#';
      const auto want = oracle::utility(s, w, p, static_cast<oracle::Local>(li),
                                        static_cast<oracle::Global>(gi));
      for (auto& e : engines) {
        const auto got = e->query(p);
        REQUIRE(got.has_value() == want.has_value());
        if (want) REQUIRE(oracle::close(*got, *want));
      }
    }
    for (auto& e : engines) {
      CHECK(e->size_bytes() >= base->size_bytes());
      e->reset();
    }
  }
  CHECK_THROWS_AS(usi::make_baseline("bsl9", make_base("ab", {1, 1}), 1), usi::Error);
}

TEST_CASE("bsl4 keeps a hot pattern") {
  const std::string s = "abracadabra";
  const auto base = make_base(s, std::vector<double>(s.size(), 1.0));
  usi::Bsl4Engine e(base, 2);
  oracle::Rng rng(54);
  for (int i = 0; i < 1000; ++i) {
    e.query("abra");
    const std::size_t p = rng.below(s.size());
    e.query(s.substr(p, rng.between(1, s.size() - p)));
  }
  CHECK(e.cached("abra"));
  CHECK(e.cached_count() <= 2);
  e.reset();
  CHECK(e.cached_count() == 0);
  CHECK(*e.query("abra") == 8.0);
}

TEST_CASE("heavy keeper estimates a dominant key") {
  usi::HeavyKeeper hk(4, 1024, 1.08, 3);
  for (int i = 0; i < 500; ++i) {
    hk.insert(42);
    hk.insert(1000 + i);
  }
  CHECK(hk.estimate(42) >= 450);
  CHECK(hk.estimate(42) <= 500);
}

TEST_CASE("substring heavy keeper basic behaviour") {
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  const auto out = usi::substring_hk_mine(letters, letters.size());
  REQUIRE(out.size() == letters.size());
  std::string seen;
  for (const auto& e : out) {
    CHECK(e.length == 1);
    CHECK(e.f == 1);
    seen += letters[e.j];
  }
  std::sort(seen.begin(), seen.end());
  CHECK(seen == letters);

  oracle::Rng rng(55);
  for (int t = 0; t < 10; ++t) {
    const std::string s = oracle::random_test_text(rng, 3000);
    const std::uint64_t k = rng.between(1, 200);
    const auto est = usi::substring_hk_mine(s, k, {.seed = 100 + static_cast<std::uint64_t>(t)});
    CHECK(est.size() <= k);
    for (const auto& e : est) {
      REQUIRE(e.j + e.length <= s.size());
      CHECK(e.f <= s.size() - e.length + 1);
    }
  }
  CHECK_THROWS_AS(usi::substring_hk_mine("abc", 0), usi::Error);
  CHECK_THROWS_AS(usi::substring_hk_mine("abc", 1, {.extension_base = 1.0}), usi::Error);
}

TEST_CASE("top-k trie counts and undercounts") {
  const auto aaaa = usi::topk_trie_mine("aaaa", 4);
  REQUIRE(aaaa.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(aaaa[i].length == i + 1);
    CHECK(aaaa[i].f == 4 - i);
  }
  oracle::Rng rng(56);
  for (int t = 0; t < 20; ++t) {
    const std::string s = oracle::random_test_text(rng, 2000);
    const std::uint64_t k = rng.between(1, 150);
    const auto est = usi::topk_trie_mine(s, k);
    CHECK(est.size() <= k);
    for (const auto& e : est) REQUIRE(e.f <= true_count(s, e));
  }
  // With an ample budget nothing is evicted; a node only counts occurrences
  // from its creation onward, so single letters are exact and longer paths
  // may still undercount.
  const std::string s = "mississippi";
  const auto all = usi::topk_trie_mine(s, 1000);
  CHECK(all.size() == s.size());
  for (const auto& e : all) {
    if (e.length == 1) CHECK(e.f == true_count(s, e));
    CHECK(e.f >= 1);
  }
}

TEST_CASE("sketch miners trail the approximate miner on random text") {
  oracle::Rng rng(57);
  const std::string s = oracle::random_text(rng, 100000, 4);
  const auto idx = usi::build_suffix_index(s);
  const auto tables = usi::build_tuning_tables(idx, {.leaf_segment = false});
  std::vector<std::uint64_t> exact;
  for (const auto& t : usi::exact_top_k(tables, idx, 100)) exact.push_back(t.frequency());
  const auto score = [&](const std::vector<usi::SampledEntry>& est) {
    std::vector<std::uint64_t> f;
    for (const auto& e : est) f.push_back(true_count(s, e));
    std::multiset<std::uint64_t> a(exact.begin(), exact.end());
    std::size_t common = 0;
    for (auto x : f)
      if (auto it = a.find(x); it != a.end()) {
        a.erase(it);
        ++common;
      }
    return static_cast<double>(common) / static_cast<double>(exact.size());
  };
  const double approx = score(usi::approximate_top_k(s, 100));
  CHECK(score(usi::substring_hk_mine(s, 100)) < approx);
  CHECK(score(usi::topk_trie_mine(s, 100)) <= approx);
}
