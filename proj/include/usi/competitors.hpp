// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "usi/approx_topk.hpp"
#include "usi/fingerprint.hpp"
#include "usi/usi_index.hpp"

namespace usi {

struct PatternKey {
  std::uint64_t fp = 0;
  std::uint64_t length = 0;

  friend bool operator==(const PatternKey&, const PatternKey&) = default;
};

struct PatternKeyHash {
  std::size_t operator()(const PatternKey& k) const noexcept {
    std::uint64_t x = k.fp ^ (k.length * 0x9e3779b97f4a7c15ULL);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

// Min-heap over (priority, stamp) with handles that stay valid while the
// element is in the heap. Ties on priority evict the older element first.
template <class Value>
class IndexedMinHeap {
 public:
  using Handle = std::size_t;

  std::size_t size() const noexcept { return heap_.size(); }
  bool empty() const noexcept { return heap_.empty(); }

  Handle push(std::uint64_t priority, Value value) {
    Handle h;
    if (!free_.empty()) {
      h = free_.back();
      free_.pop_back();
    } else {
      h = nodes_.size();
      nodes_.emplace_back();
    }
    nodes_[h] = Node{priority, stamp_++, heap_.size(), std::move(value)};
    heap_.push_back(h);
    sift_up(heap_.size() - 1);
    return h;
  }

  Handle top() const noexcept { return heap_.front(); }
  std::uint64_t priority(Handle h) const noexcept { return nodes_[h].priority; }
  Value& value(Handle h) noexcept { return nodes_[h].value; }
  const Value& value(Handle h) const noexcept { return nodes_[h].value; }

  void update(Handle h, std::uint64_t priority) {
    Node& n = nodes_[h];
    const std::uint64_t old = n.priority;
    n.priority = priority;
    if (priority < old) sift_up(n.pos);
    else sift_down(n.pos);
  }

  Value pop() {
    const Handle h = heap_.front();
    swap_at(0, heap_.size() - 1);
    heap_.pop_back();
    if (!heap_.empty()) sift_down(0);
    free_.push_back(h);
    return std::move(nodes_[h].value);
  }

 private:
  struct Node {
    std::uint64_t priority = 0;
    std::uint64_t stamp = 0;
    std::size_t pos = 0;
    Value value{};
  };

  bool less(std::size_t a, std::size_t b) const noexcept {
    const Node& x = nodes_[heap_[a]];
    const Node& y = nodes_[heap_[b]];
    return x.priority != y.priority ? x.priority < y.priority : x.stamp < y.stamp;
  }
  void swap_at(std::size_t a, std::size_t b) noexcept {
    std::swap(heap_[a], heap_[b]);
    nodes_[heap_[a]].pos = a;
    nodes_[heap_[b]].pos = b;
  }
  void sift_up(std::size_t i) noexcept {
    while (i > 0) {
      const std::size_t p = (i - 1) / 2;
      if (!less(i, p)) break;
      swap_at(i, p);
      i = p;
    }
  }
  void sift_down(std::size_t i) noexcept {
    for (;;) {
      const std::size_t l = 2 * i + 1, r = l + 1;
      std::size_t m = i;
      if (l < heap_.size() && less(l, m)) m = l;
      if (r < heap_.size() && less(r, m)) m = r;
      if (m == i) return;
      swap_at(i, m);
      i = m;
    }
  }

  std::vector<Node> nodes_;
  std::vector<Handle> heap_;
  std::vector<Handle> free_;
  std::uint64_t stamp_ = 0;
};

// Common interface of the query engines compared in benchmarks.
class QueryEngine {
 public:
  virtual ~QueryEngine() = default;
  virtual std::string name() const = 0;
  virtual std::optional<double> query(std::string_view pattern) = 0;
  // Bytes held by the engine, shared text structures included.
  virtual std::size_t size_bytes() const = 0;
  // Drops any state accumulated by earlier queries.
  virtual void reset() {}
};

class UsiEngine final : public QueryEngine {
 public:
  explicit UsiEngine(std::shared_ptr<const UsiIndex> index) : index_(std::move(index)) {}
  std::string name() const override { return "usi"; }
  std::optional<double> query(std::string_view pattern) override { return index_->query(pattern); }
  std::size_t size_bytes() const override { return index_->size_bytes(); }

 private:
  std::shared_ptr<const UsiIndex> index_;
};

// BSL1: every query goes through the suffix array and PSW.
class Bsl1Engine final : public QueryEngine {
 public:
  explicit Bsl1Engine(std::shared_ptr<const TextIndex> base) : base_(std::move(base)) {}
  std::string name() const override { return "bsl1"; }
  std::optional<double> query(std::string_view pattern) override;
  std::size_t size_bytes() const override { return base_->size_bytes(); }

 private:
  std::shared_ptr<const TextIndex> base_;
};

enum class CachePolicy { lru, least_frequently_queried };

// Caches the utilities of up to `capacity` queried patterns.
class QueryCache {
 public:
  QueryCache(std::size_t capacity, CachePolicy policy,
             std::uint64_t seed = kDefaultFingerprintSeed);

  // Looks the pattern up; on a miss computes it with `base` and inserts it.
  std::optional<double> query(const TextIndex& base, std::string_view pattern, bool* hit = nullptr);

  bool contains(std::string_view pattern) const;
  void clear();
  std::size_t size() const noexcept { return map_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  CachePolicy policy() const noexcept { return policy_; }
  std::size_t size_bytes() const noexcept;

 private:
  struct Slot {
    std::string pattern;
    std::optional<double> value;
    std::list<PatternKey>::iterator recency;  // lru
    IndexedMinHeap<PatternKey>::Handle handle = 0;  // least frequently queried
  };

  void evict();

  std::size_t capacity_;
  CachePolicy policy_;
  Fingerprinter fpr_;
  std::unordered_map<PatternKey, Slot, PatternKeyHash> map_;
  std::list<PatternKey> order_;  // most recent first
  IndexedMinHeap<PatternKey> heap_;
};

class CachedEngine final : public QueryEngine {
 public:
  CachedEngine(std::shared_ptr<const TextIndex> base, std::size_t capacity, CachePolicy policy)
      : base_(std::move(base)), cache_(capacity, policy) {}
  std::string name() const override {
    return cache_.policy() == CachePolicy::lru ? "bsl2" : "bsl3";
  }
  std::optional<double> query(std::string_view pattern) override {
    return cache_.query(*base_, pattern);
  }
  std::size_t size_bytes() const override { return base_->size_bytes() + cache_.size_bytes(); }
  void reset() override { cache_.clear(); }
  const QueryCache& cache() const noexcept { return cache_; }

 private:
  std::shared_ptr<const TextIndex> base_;
  QueryCache cache_;
};

class CountMinSketch {
 public:
  CountMinSketch(std::size_t depth, std::size_t width, std::uint64_t seed);

  void add(std::uint64_t key, std::uint32_t amount = 1) noexcept;
  void clear() noexcept { std::fill(counters_.begin(), counters_.end(), 0U); }
  std::uint64_t estimate(std::uint64_t key) const noexcept;

  std::size_t depth() const noexcept { return depth_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size_bytes() const noexcept { return counters_.size() * sizeof(std::uint32_t); }

 private:
  std::size_t bucket(std::size_t row, std::uint64_t key) const noexcept;

  std::size_t depth_;
  std::size_t width_;
  std::vector<std::uint64_t> a_, b_;
  std::vector<std::uint32_t> counters_;
};

// BSL4: query counts live in a count-min sketch; the utilities of the K
// patterns with the highest estimated counts are cached.
class Bsl4Engine final : public QueryEngine {
 public:
  Bsl4Engine(std::shared_ptr<const TextIndex> base, std::size_t capacity,
             std::size_t depth = 4, std::size_t width = 0,
             std::uint64_t seed = kDefaultFingerprintSeed);

  std::string name() const override { return "bsl4"; }
  std::optional<double> query(std::string_view pattern) override;
  std::size_t size_bytes() const override;
  void reset() override;
  bool cached(std::string_view pattern) const;
  std::size_t cached_count() const noexcept { return map_.size(); }

 private:
  struct Slot {
    std::string pattern;
    std::optional<double> value;
    IndexedMinHeap<PatternKey>::Handle handle = 0;
  };

  std::shared_ptr<const TextIndex> base_;
  std::size_t capacity_;
  Fingerprinter fpr_;
  CountMinSketch sketch_;
  std::unordered_map<PatternKey, Slot, PatternKeyHash> map_;
  IndexedMinHeap<PatternKey> heap_;
};

std::unique_ptr<QueryEngine> make_baseline(std::string_view name,
                                           std::shared_ptr<const TextIndex> base,
                                           std::size_t capacity);

// HeavyKeeper: count-with-exponential-decay sketch.
class HeavyKeeper {
 public:
  HeavyKeeper(std::size_t depth, std::size_t width, double decay_base, std::uint64_t seed);

  // Counts one arrival of key and returns its estimate afterwards.
  std::uint64_t insert(std::uint64_t key);
  std::uint64_t estimate(std::uint64_t key) const noexcept;

 private:
  struct Bucket {
    std::uint64_t key = 0;
    std::uint32_t count = 0;
  };

  std::size_t depth_;
  std::size_t width_;
  double decay_base_;
  std::vector<std::uint64_t> salts_;
  std::vector<Bucket> buckets_;
  std::vector<double> decay_;  // decay_base^-count, cached for small counts
  std::mt19937_64 rng_;
};

struct SubstringHkOptions {
  std::size_t depth = 4;
  std::size_t width = std::size_t{1} << 16;
  double decay_base = 1.08;
  double extension_base = 2.0;
  std::uint64_t seed = kDefaultFingerprintSeed;
};

// Entries sorted by estimated frequency (descending), then length.
std::vector<SampledEntry> substring_hk_mine(std::string_view text, std::uint64_t k,
                                            const SubstringHkOptions& options = {});

// Misra-Gries trie with at most K counted nodes.
std::vector<SampledEntry> topk_trie_mine(std::string_view text, std::uint64_t k);

}  // namespace usi
