// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/competitors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "usi/error.hpp"

namespace usi {

namespace {

std::uint64_t key_hash(const PatternKey& k) noexcept {
  return static_cast<std::uint64_t>(PatternKeyHash{}(k));
}

// Rough per-entry overhead of a node-based hash map or list.
constexpr std::size_t kNodeOverhead = 32;

bool by_estimate(const SampledEntry& a, const SampledEntry& b) noexcept {
  if (a.f != b.f) return a.f > b.f;
  if (a.length != b.length) return a.length < b.length;
  return a.j < b.j;
}

}  // namespace

std::optional<double> Bsl1Engine::query(std::string_view pattern) {
  if (pattern.empty()) throw_usage("pattern must not be empty");
  return base_->fallback_query(pattern);
}

QueryCache::QueryCache(std::size_t capacity, CachePolicy policy, std::uint64_t seed)
    : capacity_(capacity), policy_(policy), fpr_(seed) {
  map_.reserve(capacity);
}

std::optional<double> QueryCache::query(const TextIndex& base, std::string_view pattern,
                                        bool* hit) {
  if (pattern.empty()) throw_usage("pattern must not be empty");
  const PatternKey key{fpr_.fingerprint(pattern), pattern.size()};
  if (hit) *hit = false;
  const auto it = map_.find(key);
  if (it != map_.end()) {
    Slot& slot = it->second;
    if (slot.pattern == pattern) {
      if (policy_ == CachePolicy::lru) {
        order_.splice(order_.begin(), order_, slot.recency);
      } else {
        heap_.update(slot.handle, heap_.priority(slot.handle) + 1);
      }
      if (hit) *hit = true;
      return slot.value;
    }
    // Fingerprint collision with a cached pattern: answer without caching.
    return base.fallback_query(pattern);
  }
  const std::optional<double> value = base.fallback_query(pattern);
  if (capacity_ == 0) return value;
  if (map_.size() >= capacity_) evict();
  Slot slot{std::string(pattern), value, {}, 0};
  if (policy_ == CachePolicy::lru) {
    order_.push_front(key);
    slot.recency = order_.begin();
  } else {
    slot.handle = heap_.push(1, key);
  }
  map_.emplace(key, std::move(slot));
  return value;
}

void QueryCache::evict() {
  PatternKey victim;
  if (policy_ == CachePolicy::lru) {
    victim = order_.back();
    order_.pop_back();
  } else {
    victim = heap_.pop();
  }
  map_.erase(victim);
}

bool QueryCache::contains(std::string_view pattern) const {
  const auto it = map_.find(PatternKey{fpr_.fingerprint(pattern), pattern.size()});
  return it != map_.end() && it->second.pattern == pattern;
}

void QueryCache::clear() {
  map_.clear();
  order_.clear();
  heap_ = IndexedMinHeap<PatternKey>{};
}

std::size_t QueryCache::size_bytes() const noexcept {
  std::size_t bytes = map_.bucket_count() * sizeof(void*);
  for (const auto& [key, slot] : map_)
    bytes += sizeof(key) + sizeof(slot) + kNodeOverhead + slot.pattern.capacity();
  if (policy_ == CachePolicy::lru) bytes += order_.size() * (sizeof(PatternKey) + 2 * sizeof(void*));
  else bytes += heap_.size() * (sizeof(PatternKey) + 4 * sizeof(std::uint64_t));
  return bytes;
}

CountMinSketch::CountMinSketch(std::size_t depth, std::size_t width, std::uint64_t seed)
    : depth_(depth), width_(width) {
  if (depth == 0 || width == 0) throw_usage("sketch dimensions must be positive");
  std::mt19937_64 gen(seed);
  for (std::size_t r = 0; r < depth; ++r) {
    a_.push_back(1 + gen() % (Fingerprinter::kModulus - 1));
    b_.push_back(gen() % Fingerprinter::kModulus);
  }
  counters_.assign(depth * width, 0);
}

std::size_t CountMinSketch::bucket(std::size_t row, std::uint64_t key) const noexcept {
  const std::uint64_t x = key % Fingerprinter::kModulus;
  const std::uint64_t h = Fingerprinter::add(Fingerprinter::mul(a_[row], x), b_[row]);
  return row * width_ + static_cast<std::size_t>(h % width_);
}

void CountMinSketch::add(std::uint64_t key, std::uint32_t amount) noexcept {
  for (std::size_t r = 0; r < depth_; ++r) {
    std::uint32_t& c = counters_[bucket(r, key)];
    c = c > UINT32_MAX - amount ? UINT32_MAX : c + amount;
  }
}

std::uint64_t CountMinSketch::estimate(std::uint64_t key) const noexcept {
  std::uint64_t best = UINT64_MAX;
  for (std::size_t r = 0; r < depth_; ++r) best = std::min<std::uint64_t>(best, counters_[bucket(r, key)]);
  return best;
}

Bsl4Engine::Bsl4Engine(std::shared_ptr<const TextIndex> base, std::size_t capacity,
                       std::size_t depth, std::size_t width, std::uint64_t seed)
    : base_(std::move(base)),
      capacity_(capacity),
      fpr_(seed),
      sketch_(depth, width != 0 ? width : std::max<std::size_t>(1024, std::bit_ceil(2 * capacity)),
              seed ^ 0x9e3779b97f4a7c15ULL) {
  map_.reserve(capacity);
}

std::optional<double> Bsl4Engine::query(std::string_view pattern) {
  if (pattern.empty()) throw_usage("pattern must not be empty");
  const PatternKey key{fpr_.fingerprint(pattern), pattern.size()};
  const std::uint64_t h = key_hash(key);
  sketch_.add(h);
  const std::uint64_t est = sketch_.estimate(h);
  const auto it = map_.find(key);
  if (it != map_.end()) {
    if (it->second.pattern == pattern) {
      heap_.update(it->second.handle, est);
      return it->second.value;
    }
    return base_->fallback_query(pattern);
  }
  const std::optional<double> value = base_->fallback_query(pattern);
  if (capacity_ == 0) return value;
  if (map_.size() < capacity_ || est > heap_.priority(heap_.top())) {
    if (map_.size() >= capacity_) map_.erase(heap_.pop());
    const auto handle = heap_.push(est, key);
    map_.emplace(key, Slot{std::string(pattern), value, handle});
  }
  return value;
}

bool Bsl4Engine::cached(std::string_view pattern) const {
  const auto it = map_.find(PatternKey{fpr_.fingerprint(pattern), pattern.size()});
  return it != map_.end() && it->second.pattern == pattern;
}

void Bsl4Engine::reset() {
  sketch_.clear();
  map_.clear();
  heap_ = IndexedMinHeap<PatternKey>{};
}

std::size_t Bsl4Engine::size_bytes() const {
  std::size_t bytes = base_->size_bytes() + sketch_.size_bytes() + map_.bucket_count() * sizeof(void*);
  for (const auto& [key, slot] : map_)
    bytes += sizeof(key) + sizeof(slot) + kNodeOverhead + slot.pattern.capacity();
  bytes += heap_.size() * (sizeof(PatternKey) + 4 * sizeof(std::uint64_t));
  return bytes;
}

std::unique_ptr<QueryEngine> make_baseline(std::string_view name,
                                           std::shared_ptr<const TextIndex> base,
                                           std::size_t capacity) {
  if (name == "bsl1") return std::make_unique<Bsl1Engine>(std::move(base));
  if (name == "bsl2")
    return std::make_unique<CachedEngine>(std::move(base), capacity, CachePolicy::lru);
  if (name == "bsl3")
    return std::make_unique<CachedEngine>(std::move(base), capacity,
                                          CachePolicy::least_frequently_queried);
  if (name == "bsl4") return std::make_unique<Bsl4Engine>(std::move(base), capacity);
  throw_usage("unknown engine '" + std::string(name) + "'");
}

HeavyKeeper::HeavyKeeper(std::size_t depth, std::size_t width, double decay_base,
                         std::uint64_t seed)
    : depth_(depth), width_(width), decay_base_(decay_base), rng_(seed) {
  if (depth == 0 || width == 0) throw_usage("sketch dimensions must be positive");
  if (!(decay_base > 1.0)) throw_usage("decay base must exceed 1");
  for (std::size_t r = 0; r < depth; ++r) salts_.push_back(rng_() | 1);
  buckets_.resize(depth * width);
  for (std::size_t c = 0; c < 4096; ++c) decay_.push_back(std::pow(decay_base, -static_cast<double>(c)));
}

std::uint64_t HeavyKeeper::insert(std::uint64_t key) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uint64_t best = 0;
  for (std::size_t r = 0; r < depth_; ++r) {
    const std::uint64_t h = (key ^ salts_[r]) * 0x9e3779b97f4a7c15ULL;
    Bucket& b = buckets_[r * width_ + static_cast<std::size_t>((h >> 17) % width_)];
    if (b.count == 0) {
      b = {key, 1};
    } else if (b.key == key) {
      ++b.count;
    } else {
      const double p = b.count < decay_.size() ? decay_[b.count] : 0.0;
      if (coin(rng_) < p && --b.count == 0) b = {key, 1};
    }
    if (b.key == key) best = std::max<std::uint64_t>(best, b.count);
  }
  return best;
}

std::uint64_t HeavyKeeper::estimate(std::uint64_t key) const noexcept {
  std::uint64_t best = 0;
  for (std::size_t r = 0; r < depth_; ++r) {
    const std::uint64_t h = (key ^ salts_[r]) * 0x9e3779b97f4a7c15ULL;
    const Bucket& b = buckets_[r * width_ + static_cast<std::size_t>((h >> 17) % width_)];
    if (b.key == key && b.count > 0) best = std::max<std::uint64_t>(best, b.count);
  }
  return best;
}

std::vector<SampledEntry> substring_hk_mine(std::string_view text, std::uint64_t k,
                                            const SubstringHkOptions& options) {
  if (k == 0) throw_usage("K must be at least 1");
  if (!(options.extension_base > 1.0)) throw_usage("extension base must exceed 1");
  const std::size_t n = text.size();
  const Fingerprinter fpr(options.seed);
  HeavyKeeper sketch(options.depth, options.width, options.decay_base, options.seed + 1);
  std::mt19937_64 rng(options.seed + 2);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  struct Item {
    PatternKey key;
    std::uint32_t witness = 0;
  };
  IndexedMinHeap<Item> summary;
  std::unordered_map<PatternKey, IndexedMinHeap<Item>::Handle, PatternKeyHash> where;
  where.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(k, n)) * 2);

  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t fp = 0;
    double extend_p = 1.0;
    for (std::size_t len = 1; i + len <= n; ++len) {
      fp = fpr.extend(fp, static_cast<unsigned char>(text[i + len - 1]));
      const PatternKey key{fp, len};
      const std::uint64_t est = sketch.insert(key_hash(key));
      // Only a substring that was already summarized may be extended; one
      // that enters on this arrival has no evidence of being frequent yet.
      bool known = false;
      if (const auto it = where.find(key); it != where.end()) {
        summary.update(it->second, std::max(summary.priority(it->second), est));
        known = true;
      } else if (summary.size() < k) {
        where.emplace(key, summary.push(est, Item{key, static_cast<std::uint32_t>(i)}));
      } else if (est > summary.priority(summary.top())) {
        where.erase(summary.pop().key);
        where.emplace(key, summary.push(est, Item{key, static_cast<std::uint32_t>(i)}));
      }
      if (!known) break;
      extend_p /= options.extension_base;
      if (coin(rng) >= extend_p) break;
    }
  }

  std::vector<SampledEntry> out;
  out.reserve(summary.size());
  while (!summary.empty()) {
    const auto h = summary.top();
    const std::uint64_t est = summary.priority(h);
    const Item item = summary.pop();
    const std::uint64_t cap = n - item.key.length + 1;
    out.push_back({item.witness, static_cast<std::uint32_t>(item.key.length), std::min(est, cap)});
  }
  std::sort(out.begin(), out.end(), by_estimate);
  return out;
}

std::vector<SampledEntry> topk_trie_mine(std::string_view text, std::uint64_t k) {
  if (k == 0) throw_usage("K must be at least 1");
  const std::size_t n = text.size();
  struct Node {
    std::uint32_t parent = 0;
    std::uint32_t depth = 0;
    std::uint32_t witness = 0;
    unsigned char symbol = 0;
    bool live = false;
    std::uint64_t count = 0;
  };
  // Node 0 is the root and carries no counter.
  std::vector<Node> nodes(1);
  std::vector<std::uint32_t> free_nodes;
  std::unordered_map<std::uint64_t, std::uint32_t> children;
  const std::size_t budget = static_cast<std::size_t>(std::min<std::uint64_t>(k, n * 2 + 1));
  children.reserve(budget * 2);
  std::size_t live = 0;
  const auto edge = [](std::uint32_t parent, unsigned char c) {
    return (std::uint64_t{parent} << 8) | c;
  };

  // Positions are visited from right to left, so the path matched at i
  // extends the paths created at i + 1, i + 2, ...
  for (std::size_t i = n; i-- > 0;) {
    std::uint32_t v = 0;
    std::size_t d = 0;
    while (i + d < n) {
      const auto it = children.find(edge(v, static_cast<unsigned char>(text[i + d])));
      if (it == children.end()) break;
      v = it->second;
      ++nodes[v].count;
      ++d;
    }
    if (i + d == n) continue;
    if (live < budget) {
      std::uint32_t id;
      if (!free_nodes.empty()) {
        id = free_nodes.back();
        free_nodes.pop_back();
      } else {
        id = static_cast<std::uint32_t>(nodes.size());
        nodes.emplace_back();
      }
      const auto c = static_cast<unsigned char>(text[i + d]);
      nodes[id] = Node{v, static_cast<std::uint32_t>(d + 1), static_cast<std::uint32_t>(i), c, true, 1};
      children.emplace(edge(v, c), id);
      ++live;
      continue;
    }
    // Budget exhausted: decrement every counter (the new candidate is
    // dropped) and prune nodes that reach zero. Counters never exceed their
    // parent's, so pruned nodes form whole subtrees.
    for (std::size_t id = 1; id < nodes.size(); ++id) {
      Node& x = nodes[id];
      if (!x.live) continue;
      if (--x.count == 0) {
        x.live = false;
        children.erase(edge(x.parent, x.symbol));
        free_nodes.push_back(static_cast<std::uint32_t>(id));
        --live;
      }
    }
  }

  std::vector<SampledEntry> out;
  out.reserve(live);
  for (std::size_t id = 1; id < nodes.size(); ++id) {
    if (nodes[id].live) out.push_back({nodes[id].witness, nodes[id].depth, nodes[id].count});
  }
  std::sort(out.begin(), out.end(), by_estimate);
  return out;
}

}  // namespace usi
