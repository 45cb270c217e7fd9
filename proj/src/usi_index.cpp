// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/usi_index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "binary_io.hpp"
#include "usi/error.hpp"

namespace usi {

namespace {

void accumulate(GlobalOp op, double& raw, std::uint64_t& count, double local) noexcept {
  if (count == 0) {
    raw = local;
  } else {
    switch (op) {
      case GlobalOp::sum:
      case GlobalOp::avg: raw += local; break;
      case GlobalOp::min: raw = std::min(raw, local); break;
      case GlobalOp::max: raw = std::max(raw, local); break;
    }
  }
  ++count;
}

std::uint64_t mix(std::uint64_t fp, std::uint32_t length) noexcept {
  std::uint64_t x = fp ^ (std::uint64_t{length} * 0x9e3779b97f4a7c15ULL);
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 29;
  return x;
}

constexpr char kMagic[4] = {'U', 'S', 'I', '1'};
constexpr std::uint64_t kFormatVersion = 1;

std::uint64_t spec_tag(const UtilitySpec& spec) noexcept {
  return static_cast<std::uint64_t>(spec.local) * 16 + static_cast<std::uint64_t>(spec.global);
}

UtilitySpec spec_from_tag(std::uint64_t tag) {
  const std::uint64_t local = tag / 16, global = tag % 16;
  if (local > 1 || global > 3) throw_data("unknown utility tag " + std::to_string(tag));
  return {static_cast<LocalOp>(local), static_cast<GlobalOp>(global)};
}

}  // namespace

std::shared_ptr<const TextIndex> TextIndex::build(WeightedText wt, const UtilitySpec& spec) {
  auto out = std::make_shared<TextIndex>();
  out->spec = spec;
  out->psw = build_prefix_utility(wt, spec);
  out->text = std::move(wt).release_text();
  out->sa = build_suffix_index(out->text);
  return out;
}

std::optional<double> TextIndex::fallback_query(std::string_view pattern,
                                                std::uint64_t* occurrences) const {
  const auto range = pattern_interval(sa.sa, text, pattern);
  double raw = 0.0;
  std::uint64_t count = 0;
  if (range) {
    const std::size_t m = pattern.size();
    for (std::size_t r = range->lb; r <= range->rb; ++r)
      accumulate(spec.global, raw, count, psw.local_utility_unchecked(sa.sa[r], m));
  }
  if (occurrences) *occurrences = count;
  return UtilityAccumulator::finish(spec.global, raw, count);
}

std::uint64_t TextIndex::frequency(std::string_view pattern) const {
  const auto range = pattern_interval(sa.sa, text, pattern);
  return range ? range->count() : 0;
}

UtilityTable::UtilityTable(std::size_t expected_entries) {
  std::size_t cap = 16;
  while (cap * 7 < expected_entries * 10) cap *= 2;
  slots_.resize(cap);
  mask_ = cap - 1;
}

std::size_t UtilityTable::slot_of(std::uint64_t fp, std::uint32_t length) const noexcept {
  std::size_t i = mix(fp, length) & mask_;
  while (slots_[i].length != 0 && (slots_[i].fp != fp || slots_[i].length != length))
    i = (i + 1) & mask_;
  return i;
}

const UtilityTable::Entry* UtilityTable::find(std::uint64_t fp,
                                              std::uint32_t length) const noexcept {
  const Entry& e = slots_[slot_of(fp, length)];
  return e.length == 0 ? nullptr : &e;
}

UtilityTable::Entry& UtilityTable::upsert(std::uint64_t fp, std::uint32_t length,
                                          std::uint32_t witness, bool& created) {
  if (length == 0) throw_internal("zero-length table key");
  if ((size_ + 1) * 10 > slots_.size() * 7) grow();
  Entry& e = slots_[slot_of(fp, length)];
  created = e.length == 0;
  if (created) {
    e = Entry{fp, length, witness, 0, 0.0};
    ++size_;
  }
  return e;
}

void UtilityTable::grow() {
  std::vector<Entry> old = std::move(slots_);
  slots_.assign(old.size() * 2, Entry{});
  mask_ = slots_.size() - 1;
  for (const Entry& e : old) {
    if (e.length != 0) slots_[slot_of(e.fp, e.length)] = e;
  }
}

std::string to_string(MinerKind kind) { return kind == MinerKind::exact ? "exact" : "approx"; }

UsiIndex::UsiIndex(std::shared_ptr<const TextIndex> base, UsiMeta meta, VerifyMode verify)
    : base_(std::move(base)), meta_(meta), fpr_(meta.seed), verify_(verify) {
  if (!base_) throw_usage("missing text index");
}

UsiIndex UsiIndex::from_triples(std::shared_ptr<const TextIndex> base,
                                std::span<const TopKTriple> triples, UsiMeta meta,
                                VerifyMode verify) {
  UsiIndex out(std::move(base), meta, verify);
  const std::size_t n = out.base_->size();
  std::vector<Group> groups;
  groups.reserve(triples.size());
  for (const TopKTriple& t : triples) {
    if (t.lcp == 0 || t.lb > t.rb || t.rb >= n || out.base_->sa.sa[t.lb] + std::size_t{t.lcp} > n)
      throw_usage("top-K triple out of range");
    groups.push_back({t.lcp, t.lb, t.rb});
  }
  out.fill(std::move(groups));
  return out;
}

UsiIndex UsiIndex::from_entries(std::shared_ptr<const TextIndex> base,
                                std::span<const SampledEntry> entries, UsiMeta meta,
                                VerifyMode verify) {
  UsiIndex out(std::move(base), meta, verify);
  const TextIndex& b = *out.base_;
  std::vector<Group> groups;
  groups.reserve(entries.size());
  for (const SampledEntry& e : entries) {
    if (e.length == 0 || std::size_t{e.j} + e.length > b.size())
      throw_usage("mined entry out of range");
    const auto range =
        pattern_interval(b.sa.sa, b.text, std::string_view(b.text).substr(e.j, e.length));
    if (!range) throw_internal("witness does not occur in its own text");
    groups.push_back({e.length, static_cast<std::uint32_t>(range->lb),
                      static_cast<std::uint32_t>(range->rb)});
  }
  out.fill(std::move(groups));
  return out;
}

void UsiIndex::fill(std::vector<Group> groups) {
  const TextIndex& b = *base_;
  const std::string_view text = b.text;
  const auto& sa = b.sa.sa;
  table_ = UtilityTable(groups.size());
  std::sort(groups.begin(), groups.end(), [](const Group& x, const Group& y) {
    return x.length != y.length ? x.length < y.length : x.lb < y.lb;
  });

  std::vector<std::uint64_t> bits((text.size() + 63) / 64, 0);
  std::vector<std::size_t> touched;
  std::size_t lengths = 0;
  std::uint64_t tau = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t g = 0; g < groups.size();) {
    const std::uint32_t len = groups[g].length;
    std::size_t lo = text.size(), hi = 0;
    std::size_t end = g;
    for (; end < groups.size() && groups[end].length == len; ++end) {
      for (std::size_t r = groups[end].lb; r <= groups[end].rb; ++r) {
        const std::size_t p = sa[r];
        std::uint64_t& word = bits[p / 64];
        if (word == 0) touched.push_back(p / 64);
        word |= std::uint64_t{1} << (p % 64);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    ++lengths;

    // Slide a window of length len over [lo, hi] and aggregate marked
    // positions.
    std::uint64_t fp = fpr_.fingerprint(text.substr(lo, len));
    const std::uint64_t top = fpr_.power(len - 1);
    for (std::size_t p = lo;; ++p) {
      if (bits[p / 64] >> (p % 64) & 1) {
        bool created = false;
        UtilityTable::Entry& e = table_.upsert(fp, len, static_cast<std::uint32_t>(p), created);
        accumulate(b.spec.global, e.raw, e.count, b.psw.local_utility_unchecked(p, len));
      }
      if (p == hi) break;
      const auto out_c = static_cast<unsigned char>(text[p]);
      const auto in_c = static_cast<unsigned char>(text[p + len]);
      fp = Fingerprinter::add(
          Fingerprinter::mul(
              Fingerprinter::sub(fp, Fingerprinter::mul(Fingerprinter::symbol(out_c), top)),
              fpr_.base()),
          Fingerprinter::symbol(in_c));
    }
    for (std::size_t w : touched) bits[w] = 0;
    touched.clear();
    g = end;
  }
  if (table_.size() != groups.size())
    throw_internal("mined substrings are not distinct (or fingerprints collide)");
  for (const UtilityTable::Entry& e : table_.slots()) {
    if (e.length != 0) tau = std::min(tau, e.count);
  }
  meta_.tau_k = table_.size() == 0 ? 0 : tau;
  meta_.l_k = lengths;
}

UsiIndex UsiIndex::build(std::shared_ptr<const TextIndex> base, const UsiBuildOptions& options) {
  if (!base) throw_usage("missing text index");
  UsiMeta meta;
  meta.k = options.k;
  meta.miner = options.miner;
  meta.seed = options.seed;
  if (options.k == 0) return from_triples(std::move(base), {}, meta, options.verify);
  if (options.miner == MinerKind::exact) {
    std::vector<TopKTriple> triples;
    {
      const TuningTables tables = build_tuning_tables(base->sa, {.leaf_segment = false});
      triples = exact_top_k(tables, base->sa, options.k);
    }
    return from_triples(std::move(base), triples, meta, options.verify);
  }
  const std::size_t s = options.s == 0 ? default_sampling_rate(base->size()) : options.s;
  meta.s = s;
  std::vector<SampledEntry> entries;
  {
    const LceOracle oracle(base->text, options.lce, options.seed);
    entries = approximate_top_k(oracle, options.k, s);
  }
  return from_entries(std::move(base), entries, meta, options.verify);
}

std::optional<double> UsiIndex::query(std::string_view pattern, bool* hit) const {
  if (pattern.empty()) throw_usage("pattern must not be empty");
  if (hit) *hit = false;
  const TextIndex& b = *base_;
  if (pattern.size() <= b.size() && table_.size() != 0 &&
      pattern.size() <= std::numeric_limits<std::uint32_t>::max()) {
    const auto len = static_cast<std::uint32_t>(pattern.size());
    const UtilityTable::Entry* e = table_.find(fpr_.fingerprint(pattern), len);
    if (e != nullptr &&
        (verify_ == VerifyMode::trust ||
         std::memcmp(b.text.data() + e->witness, pattern.data(), pattern.size()) == 0)) {
      if (hit) *hit = true;
      return UtilityAccumulator::finish(b.spec.global, e->raw, e->count);
    }
  }
  return b.fallback_query(pattern);
}

void UsiIndex::save(std::ostream& out) const {
  const TextIndex& b = *base_;
  detail::BinaryWriter w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.u64(kFormatVersion);
  w.u64(b.size());
  w.u64(meta_.k);
  w.u64(meta_.tau_k);
  w.u64(meta_.l_k);
  w.u64(static_cast<std::uint64_t>(meta_.miner));
  w.u64(meta_.s);
  w.u64(meta_.seed);
  w.u64(spec_tag(b.spec));
  w.u64(b.text.size());
  w.bytes(b.text.data(), b.text.size());
  const auto id = [](std::uint32_t v) { return std::uint64_t{v}; };
  w.array(std::span<const std::uint32_t>(b.sa.sa), id);
  w.array(std::span<const std::uint32_t>(b.sa.lcp), id);
  w.array(b.psw.values(), [](double v) { return std::bit_cast<std::uint64_t>(v); });
  // Slot order depends on insertion history; write entries sorted instead.
  std::vector<const UtilityTable::Entry*> live;
  live.reserve(table_.size());
  for (const UtilityTable::Entry& e : table_.slots())
    if (e.length != 0) live.push_back(&e);
  std::sort(live.begin(), live.end(), [](const auto* a, const auto* b) {
    return a->fp != b->fp ? a->fp < b->fp : a->length < b->length;
  });
  w.u64(live.size());
  for (const UtilityTable::Entry* p : live) {
    const UtilityTable::Entry& e = *p;
    w.u64(e.fp);
    w.u64(e.length);
    w.u64(e.witness);
    w.u64(e.count);
    w.f64(e.raw);
  }
  const std::uint64_t sum = w.checksum();
  w.u64(sum);
  if (!out) throw_data("write failed");
}

void UsiIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_data("cannot open " + path + " for writing");
  save(out);
  out.close();
  if (!out) throw_data("cannot write " + path);
}

UsiIndex UsiIndex::load(std::istream& in) {
  detail::BinaryReader r(in);
  char magic[4];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw_data("not a USI index (bad magic)");
  const std::uint64_t version = r.u64();
  if (version != kFormatVersion)
    throw_data("unsupported index format version " + std::to_string(version));
  const std::uint64_t n = r.u64();
  if (n > kMaxTextLength) throw_data("text length out of range");
  UsiMeta meta;
  meta.k = r.u64();
  meta.tau_k = r.u64();
  meta.l_k = r.u64();
  const std::uint64_t miner = r.u64();
  if (miner > 1) throw_data("unknown miner tag");
  meta.miner = static_cast<MinerKind>(miner);
  meta.s = r.u64();
  meta.seed = r.u64();
  auto base = std::make_shared<TextIndex>();
  base->spec = spec_from_tag(r.u64());
  if (r.u64() != n) throw_data("text length mismatch");
  base->text.resize(n);
  r.bytes(base->text.data(), n);
  const auto narrow = [n](std::uint64_t v) {
    if (v > n) throw_data("suffix array value out of range");
    return static_cast<std::uint32_t>(v);
  };
  base->sa.sa = r.array<std::uint32_t>(n, narrow);
  base->sa.lcp = r.array<std::uint32_t>(n, narrow);
  std::vector<double> psw =
      r.array<double>(n, [](std::uint64_t v) { return std::bit_cast<double>(v); });
  if (base->sa.sa.size() != n || base->sa.lcp.size() != n || psw.size() != n)
    throw_data("array length mismatch");
  base->psw = PrefixUtilityArray(std::move(psw), base->spec.local);

  UsiIndex out(std::move(base), meta, VerifyMode::verify);
  const std::uint64_t entries = r.u64();
  if (entries > n * (n + 1) / 2) throw_data("entry count out of range");
  out.table_ = UtilityTable(entries);
  for (std::uint64_t i = 0; i < entries; ++i) {
    const std::uint64_t fp = r.u64();
    const std::uint64_t len = r.u64();
    const std::uint64_t witness = r.u64();
    const std::uint64_t count = r.u64();
    const double raw = r.f64();
    if (len == 0 || witness + len > n) throw_data("table entry out of range");
    bool created = false;
    UtilityTable::Entry& e = out.table_.upsert(fp, static_cast<std::uint32_t>(len),
                                               static_cast<std::uint32_t>(witness), created);
    if (!created) throw_data("duplicate table entry");
    e.count = count;
    e.raw = raw;
  }
  const std::uint64_t expect = r.checksum();
  if (r.u64() != expect) throw_data("index checksum mismatch");
  return out;
}

UsiIndex UsiIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open " + path);
  return load(in);
}

}  // namespace usi
