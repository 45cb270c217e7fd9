// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace usi {

// Aggregation of the weights inside one occurrence. Both operators are
// derived from prefix sums, so any fragment's value is O(1) to compute.
enum class LocalOp : std::uint8_t { sum = 0, mean = 1 };

// Aggregation of the local utilities of all occurrences of a pattern.
enum class GlobalOp : std::uint8_t { sum = 0, min = 1, max = 2, avg = 3 };

struct UtilitySpec {
  LocalOp local = LocalOp::sum;
  GlobalOp global = GlobalOp::sum;

  friend bool operator==(const UtilitySpec&, const UtilitySpec&) = default;
};

// "<global>-of-<local>", e.g. "sum-of-sum" for the default sum of sums.
std::string to_string(const UtilitySpec& spec);
UtilitySpec parse_utility_spec(std::string_view tag);

// Maximum supported text length. Suffix structures use 32-bit offsets.
inline constexpr std::size_t kMaxTextLength =
    static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()) - 1;

// A text over the byte alphabet with one finite utility per position.
class WeightedText {
 public:
  WeightedText(std::string text, std::vector<double> weights);

  std::string_view text() const noexcept { return text_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return text_.size(); }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }

  // Releases ownership of the text bytes; the object is left empty.
  std::string release_text() && { return std::move(text_); }

 private:
  std::string text_;
  std::vector<double> weights_;
  std::size_t alphabet_size_ = 0;
};

enum class WeightFormat {
  binary_f64,  // little-endian IEEE-754 binary64, exactly n values
  text_lines,  // one decimal per line
};

WeightFormat parse_weight_format(std::string_view name);

std::vector<double> read_weights(std::istream& in, WeightFormat format);

WeightedText load_weighted_text(std::istream& text, std::istream& weights,
                                WeightFormat format);
WeightedText load_weighted_text(const std::filesystem::path& text_path,
                                const std::filesystem::path& weights_path,
                                WeightFormat format);

// psw[i] = u(0, i + 1). The local operator decides how a fragment is read
// back out of the prefix sums.
class PrefixUtilityArray {
 public:
  PrefixUtilityArray() = default;
  PrefixUtilityArray(std::vector<double> prefix, LocalOp op)
      : psw_(std::move(prefix)), op_(op) {}

  std::size_t size() const noexcept { return psw_.size(); }
  std::span<const double> values() const noexcept { return psw_; }
  LocalOp local_op() const noexcept { return op_; }
  double operator[](std::size_t i) const noexcept { return psw_[i]; }

  // u(i, len): throws on an out-of-range fragment.
  double local_utility(std::size_t i, std::size_t len) const;

  // Hot-path variant; the caller guarantees 1 <= len and i + len <= size().
  double local_utility_unchecked(std::size_t i, std::size_t len) const noexcept {
    const double hi = psw_[i + len - 1];
    const double sum = i == 0 ? hi : hi - psw_[i - 1];
    return op_ == LocalOp::mean ? sum / static_cast<double>(len) : sum;
  }

  std::size_t size_bytes() const noexcept { return psw_.size() * sizeof(double); }

 private:
  std::vector<double> psw_;
  LocalOp op_ = LocalOp::sum;
};

PrefixUtilityArray build_prefix_utility(const WeightedText& wt,
                                        const UtilitySpec& spec);

// Folds local utilities with a global operator. Min and max have no value
// over an empty set; sum and avg report 0.
class UtilityAccumulator {
 public:
  explicit UtilityAccumulator(GlobalOp op) noexcept;

  void add(double local) noexcept;
  std::optional<double> result() const noexcept;

  // Raw state, used to store partial aggregates compactly.
  double raw() const noexcept { return acc_; }
  std::uint64_t count() const noexcept { return count_; }
  static std::optional<double> finish(GlobalOp op, double raw,
                                      std::uint64_t count) noexcept;

 private:
  GlobalOp op_;
  double acc_;
  std::uint64_t count_ = 0;
};

// Reference semantics for every query path: scans all n - m + 1 windows and
// aggregates the weights of each matching window directly.
std::optional<double> global_utility_bruteforce(const WeightedText& wt,
                                                const UtilitySpec& spec,
                                                std::string_view pattern);

}  // namespace usi
