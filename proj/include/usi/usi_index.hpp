// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usi/approx_topk.hpp"
#include "usi/fingerprint.hpp"
#include "usi/suffix_array.hpp"
#include "usi/tuning.hpp"
#include "usi/weighted_text.hpp"

namespace usi {

// Text, suffix array and prefix utilities: everything needed to answer a
// query without precomputed utilities. Shared by USI and the baselines.
struct TextIndex {
  std::string text;
  SuffixArrayIndex sa;
  PrefixUtilityArray psw;
  UtilitySpec spec;

  static std::shared_ptr<const TextIndex> build(WeightedText wt, const UtilitySpec& spec);

  std::size_t size() const noexcept { return text.size(); }

  // Aggregates the local utilities of all occurrences found in the suffix
  // array. Returns the occurrence count through `occurrences` when given.
  std::optional<double> fallback_query(std::string_view pattern,
                                       std::uint64_t* occurrences = nullptr) const;

  std::uint64_t frequency(std::string_view pattern) const;

  std::size_t size_bytes() const noexcept {
    return text.size() + sa.size_bytes() + psw.size_bytes();
  }
};

// Open-addressing table keyed by (fingerprint, length).
class UtilityTable {
 public:
  struct Entry {
    std::uint64_t fp = 0;
    std::uint32_t length = 0;  // 0 marks an empty slot
    std::uint32_t witness = 0;
    std::uint64_t count = 0;
    double raw = 0.0;  // aggregate state, see UtilityAccumulator::raw
  };

  UtilityTable() : UtilityTable(0) {}
  explicit UtilityTable(std::size_t expected_entries);

  const Entry* find(std::uint64_t fp, std::uint32_t length) const noexcept;
  // Returns the entry for the key, creating it (with the given witness) if
  // absent; `created` reports which.
  Entry& upsert(std::uint64_t fp, std::uint32_t length, std::uint32_t witness, bool& created);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return slots_.size(); }
  std::span<const Entry> slots() const noexcept { return slots_; }
  std::size_t size_bytes() const noexcept { return slots_.size() * sizeof(Entry); }

 private:
  std::size_t slot_of(std::uint64_t fp, std::uint32_t length) const noexcept;
  void grow();

  std::vector<Entry> slots_;
  std::size_t size_ = 0;
  std::size_t mask_ = 0;
};

enum class MinerKind : std::uint8_t { exact = 0, approx = 1 };
enum class VerifyMode : std::uint8_t { verify = 0, trust = 1 };

std::string to_string(MinerKind kind);

struct UsiMeta {
  std::uint64_t k = 0;
  std::uint64_t tau_k = 0;    // smallest count stored in H (0 when H is empty)
  std::uint64_t l_k = 0;      // distinct lengths stored in H
  MinerKind miner = MinerKind::exact;
  std::uint64_t s = 1;
  std::uint64_t seed = kDefaultFingerprintSeed;
};

struct UsiBuildOptions {
  std::uint64_t k = 0;
  MinerKind miner = MinerKind::exact;
  std::size_t s = 0;  // approximate miner only; 0 selects ceil(log2 n)
  LceStrategy lce = LceStrategy::direct_compare;
  std::uint64_t seed = kDefaultFingerprintSeed;
  VerifyMode verify = VerifyMode::verify;
};

class UsiIndex {
 public:
  // Builds H from mined substrings. Exact triples carry their SA interval;
  // approximate entries are located through their witness.
  static UsiIndex from_triples(std::shared_ptr<const TextIndex> base,
                               std::span<const TopKTriple> triples, UsiMeta meta,
                               VerifyMode verify = VerifyMode::verify);
  static UsiIndex from_entries(std::shared_ptr<const TextIndex> base,
                               std::span<const SampledEntry> entries, UsiMeta meta,
                               VerifyMode verify = VerifyMode::verify);

  // Mines the top-K substrings and builds H in one go.
  static UsiIndex build(std::shared_ptr<const TextIndex> base, const UsiBuildOptions& options);

  std::optional<double> query(std::string_view pattern, bool* hit = nullptr) const;

  const UsiMeta& meta() const noexcept { return meta_; }
  const TextIndex& base() const noexcept { return *base_; }
  std::shared_ptr<const TextIndex> shared_base() const noexcept { return base_; }
  const UtilityTable& table() const noexcept { return table_; }
  const Fingerprinter& fingerprinter() const noexcept { return fpr_; }
  VerifyMode verify_mode() const noexcept { return verify_; }
  void set_verify_mode(VerifyMode mode) noexcept { verify_ = mode; }

  std::size_t size_bytes() const noexcept { return base_->size_bytes() + table_.size_bytes(); }

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static UsiIndex load(std::istream& in);
  static UsiIndex load(const std::string& path);

 private:
  struct Group {
    std::uint32_t length;
    std::uint32_t lb;
    std::uint32_t rb;
  };

  UsiIndex(std::shared_ptr<const TextIndex> base, UsiMeta meta, VerifyMode verify);
  void fill(std::vector<Group> groups);

  std::shared_ptr<const TextIndex> base_;
  UsiMeta meta_;
  Fingerprinter fpr_;
  UtilityTable table_;
  VerifyMode verify_ = VerifyMode::verify;
};

}  // namespace usi
