// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/weighted_text.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "usi/error.hpp"

namespace usi {

namespace {

const char* global_name(GlobalOp op) {
  switch (op) {
    case GlobalOp::sum: return "sum";
    case GlobalOp::min: return "min";
    case GlobalOp::max: return "max";
    case GlobalOp::avg: return "avg";
  }
  return "?";
}

const char* local_name(LocalOp op) {
  return op == LocalOp::mean ? "mean" : "sum";
}

std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

std::string to_string(const UtilitySpec& spec) {
  return std::string(global_name(spec.global)) + "-of-" + local_name(spec.local);
}

UtilitySpec parse_utility_spec(std::string_view tag) {
  const auto sep = tag.find("-of-");
  const std::string_view g = tag.substr(0, sep);
  const std::string_view l =
      sep == std::string_view::npos ? std::string_view("sum") : tag.substr(sep + 4);
  UtilitySpec spec;
  if (g == "sum") spec.global = GlobalOp::sum;
  else if (g == "min") spec.global = GlobalOp::min;
  else if (g == "max") spec.global = GlobalOp::max;
  else if (g == "avg") spec.global = GlobalOp::avg;
  else throw_usage("unknown global utility operator '" + std::string(g) + "'");
  if (l == "sum") spec.local = LocalOp::sum;
  else if (l == "mean") spec.local = LocalOp::mean;
  else throw_usage("unknown local utility operator '" + std::string(l) + "'");
  return spec;
}

WeightedText::WeightedText(std::string text, std::vector<double> weights)
    : text_(std::move(text)), weights_(std::move(weights)) {
  if (text_.empty()) throw_data("text is empty");
  if (text_.size() > kMaxTextLength)
    throw_data("text longer than " + std::to_string(kMaxTextLength) + " bytes");
  if (text_.size() != weights_.size())
    throw_data("weight count " + std::to_string(weights_.size()) +
               " does not match text length " + std::to_string(text_.size()));
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]))
      throw_data("weight at position " + std::to_string(i) + " is not finite");
  }
  std::array<bool, 256> seen{};
  for (unsigned char c : text_) seen[c] = true;
  alphabet_size_ = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

WeightFormat parse_weight_format(std::string_view name) {
  if (name == "binary" || name == "f64" || name == "bin") return WeightFormat::binary_f64;
  if (name == "text" || name == "txt" || name == "lines") return WeightFormat::text_lines;
  throw_usage("unknown weight format '" + std::string(name) + "' (expected binary or text)");
}

std::vector<double> read_weights(std::istream& in, WeightFormat format) {
  std::vector<double> out;
  if (format == WeightFormat::binary_f64) {
    const std::string raw = read_all(in);
    if (raw.size() % 8 != 0)
      throw_data("binary weight stream length " + std::to_string(raw.size()) +
                 " is not a multiple of 8");
    out.resize(raw.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b)
        bits = (bits << 8) | static_cast<unsigned char>(raw[i * 8 + static_cast<std::size_t>(b)]);
      out[i] = std::bit_cast<double>(bits);
    }
    return out;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v(line);
    while (!v.empty() && (v.back() == '\r' || v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty()) continue;
    if (v.front() == '+') v.remove_prefix(1);
    double w = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), w);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw_data("cannot parse weight on line " + std::to_string(line_no) + ": '" + line + "'");
    out.push_back(w);
  }
  return out;
}

WeightedText load_weighted_text(std::istream& text, std::istream& weights,
                                WeightFormat format) {
  std::string bytes = read_all(text);
  std::vector<double> w = read_weights(weights, format);
  return WeightedText(std::move(bytes), std::move(w));
}

WeightedText load_weighted_text(const std::filesystem::path& text_path,
                                const std::filesystem::path& weights_path,
                                WeightFormat format) {
  std::ifstream t(text_path, std::ios::binary);
  if (!t) throw_data("cannot open text file " + text_path.string());
  std::ifstream w(weights_path, std::ios::binary);
  if (!w) throw_data("cannot open weights file " + weights_path.string());
  return load_weighted_text(t, w, format);
}

double PrefixUtilityArray::local_utility(std::size_t i, std::size_t len) const {
  if (len == 0 || i >= psw_.size() || len > psw_.size() - i)
    throw_usage("fragment (" + std::to_string(i) + ", " + std::to_string(len) +
                ") is outside a text of length " + std::to_string(psw_.size()));
  return local_utility_unchecked(i, len);
}

PrefixUtilityArray build_prefix_utility(const WeightedText& wt,
                                        const UtilitySpec& spec) {
  const auto w = wt.weights();
  std::vector<double> psw(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    psw[i] = acc;
  }
  return PrefixUtilityArray(std::move(psw), spec.local);
}

UtilityAccumulator::UtilityAccumulator(GlobalOp op) noexcept
    : op_(op),
      acc_(op == GlobalOp::min   ? std::numeric_limits<double>::infinity()
           : op == GlobalOp::max ? -std::numeric_limits<double>::infinity()
                                 : 0.0) {}

void UtilityAccumulator::add(double local) noexcept {
  ++count_;
  switch (op_) {
    case GlobalOp::sum:
    case GlobalOp::avg: acc_ += local; break;
    case GlobalOp::min: acc_ = std::min(acc_, local); break;
    case GlobalOp::max: acc_ = std::max(acc_, local); break;
  }
}

std::optional<double> UtilityAccumulator::result() const noexcept {
  return finish(op_, acc_, count_);
}

std::optional<double> UtilityAccumulator::finish(GlobalOp op, double raw,
                                                 std::uint64_t count) noexcept {
  switch (op) {
    case GlobalOp::sum: return raw;
    case GlobalOp::avg:
      return count == 0 ? 0.0 : raw / static_cast<double>(count);
    case GlobalOp::min:
    case GlobalOp::max:
      if (count == 0) return std::nullopt;
      return raw;
  }
  return std::nullopt;
}

std::optional<double> global_utility_bruteforce(const WeightedText& wt,
                                                const UtilitySpec& spec,
                                                std::string_view pattern) {
  if (pattern.empty()) throw_usage("pattern must not be empty");
  const std::string_view s = wt.text();
  const auto w = wt.weights();
  UtilityAccumulator acc(spec.global);
  if (pattern.size() <= s.size()) {
    for (std::size_t i = 0; i + pattern.size() <= s.size(); ++i) {
      if (std::memcmp(s.data() + i, pattern.data(), pattern.size()) != 0) continue;
      double local = 0.0;
      for (std::size_t k = i; k < i + pattern.size(); ++k) local += w[k];
      if (spec.local == LocalOp::mean) local /= static_cast<double>(pattern.size());
      acc.add(local);
    }
  }
  return acc.result();
}

}  // namespace usi
