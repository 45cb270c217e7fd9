// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "usi/error.hpp"
#include "usi/fingerprint.hpp"
#include "usi/weighted_text.hpp"

namespace {

const std::string kExampleText = "ATACCCCGATAATACCCCAG";
const std::vector<double> kExampleWeights = {0.9, 1, 3, 2, 0.7, 1, 1, 0.6, 0.5, 0.5,
                                             0.5, 0.8, 1, 1, 1, 0.9, 1, 1, 0.8, 1};

usi::ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const usi::Error& e) {
    return e.kind();
  }
  FAIL("no usi::Error thrown");
  return usi::ErrorKind::internal;
}

}  // namespace

TEST_CASE("utility spec tags parse and print") {
  const auto s = usi::parse_utility_spec("max-of-mean");
  CHECK(s.global == usi::GlobalOp::max);
  CHECK(s.local == usi::LocalOp::mean);
  CHECK(usi::to_string(s) == "max-of-mean");
  CHECK(usi::parse_utility_spec("avg") == usi::UtilitySpec{usi::LocalOp::sum, usi::GlobalOp::avg});
  for (const char* tag : {"sum-of-sum", "min-of-sum", "avg-of-mean", "sum-of-mean"})
    CHECK(usi::to_string(usi::parse_utility_spec(tag)) == tag);
  CHECK(kind_of([] { usi::parse_utility_spec("median-of-sum"); }) == usi::ErrorKind::usage);
  CHECK(kind_of([] { usi::parse_utility_spec("sum-of-max"); }) == usi::ErrorKind::usage);
}

TEST_CASE("weighted text validation") {
  CHECK(kind_of([] { usi::WeightedText("", {}); }) == usi::ErrorKind::data);
  CHECK(kind_of([] { usi::WeightedText("abc", {1, 2}); }) == usi::ErrorKind::data);
  CHECK(kind_of([] {
          usi::WeightedText("ab", {1, std::numeric_limits<double>::quiet_NaN()});
        }) == usi::ErrorKind::data);
  usi::WeightedText wt("abca", {1, 2, 3, 4});
  CHECK(wt.size() == 4);
  CHECK(wt.alphabet_size() == 3);
}

TEST_CASE("weights are read in both formats") {
  std::istringstream lines("0.5\n1\n\n-2.25\n");
  const auto w = usi::read_weights(lines, usi::WeightFormat::text_lines);
  REQUIRE(w.size() == 3);
  CHECK(w[2] == -2.25);

  std::string raw;
  for (double x : {1.5, -3.0}) raw.append(reinterpret_cast<const char*>(&x), sizeof x);
  std::istringstream bin(raw);
  const auto b = usi::read_weights(bin, usi::WeightFormat::binary_f64);
  REQUIRE(b.size() == 2);
  CHECK(b[1] == -3.0);

  std::istringstream odd(raw.substr(0, 11));
  CHECK(kind_of([&] { usi::read_weights(odd, usi::WeightFormat::binary_f64); }) ==
        usi::ErrorKind::data);
  std::istringstream junk("1\nabc\n");
  CHECK(kind_of([&] { usi::read_weights(junk, usi::WeightFormat::text_lines); }) ==
        usi::ErrorKind::data);
  CHECK(usi::parse_weight_format("binary") == usi::WeightFormat::binary_f64);
  CHECK(kind_of([] { usi::parse_weight_format("csv"); }) == usi::ErrorKind::usage);
}

TEST_CASE("prefix sums give local utilities") {
  usi::WeightedText wt(kExampleText, kExampleWeights);
  const auto psw = usi::build_prefix_utility(wt, {});
  CHECK(psw.size() == 20);
  CHECK(psw.local_utility(1, 6) == doctest::Approx(8.7));
  CHECK(psw.local_utility(12, 6) == doctest::Approx(5.9));
  CHECK(psw.local_utility(0, 1) == doctest::Approx(0.9));
  const auto mean = usi::build_prefix_utility(wt, {usi::LocalOp::mean, usi::GlobalOp::sum});
  CHECK(mean.local_utility(1, 6) == doctest::Approx(8.7 / 6));
  CHECK(kind_of([&] { (void)psw.local_utility(15, 6); }) == usi::ErrorKind::usage);
}

TEST_CASE("brute-force global utility on the running example") {
  usi::WeightedText wt(kExampleText, kExampleWeights);
  CHECK(*usi::global_utility_bruteforce(wt, {}, "TACCCC") == doctest::Approx(14.6).epsilon(1e-12));
  CHECK(*usi::global_utility_bruteforce(wt, {}, "GG") == 0.0);
  const usi::UtilitySpec mn{usi::LocalOp::sum, usi::GlobalOp::min};
  CHECK_FALSE(usi::global_utility_bruteforce(wt, mn, "GG").has_value());
  CHECK(*usi::global_utility_bruteforce(wt, mn, "TACCCC") == doctest::Approx(5.9));
  const usi::UtilitySpec mx{usi::LocalOp::sum, usi::GlobalOp::max};
  CHECK(*usi::global_utility_bruteforce(wt, mx, "TACCCC") == doctest::Approx(8.7));
  const usi::UtilitySpec avg{usi::LocalOp::sum, usi::GlobalOp::avg};
  CHECK(*usi::global_utility_bruteforce(wt, avg, "TACCCC") == doctest::Approx(7.3));
  CHECK(*usi::global_utility_bruteforce(wt, avg, "GG") == 0.0);
}

TEST_CASE("brute-force utility matches the test oracle for every operator") {
  oracle::Rng rng(11);
  const oracle::Local locals[] = {oracle::Local::sum, oracle::Local::mean};
  const oracle::Global globals[] = {oracle::Global::sum, oracle::Global::min, oracle::Global::max,
                                    oracle::Global::avg};
  for (int t = 0; t < 20; ++t) {
    const std::string text = oracle::random_test_text(rng, 60);
    const auto w = oracle::random_weights(rng, text.size());
    usi::WeightedText wt(text, w);
    for (int li = 0; li < 2; ++li)
      for (int gi = 0; gi < 4; ++gi) {
        const usi::UtilitySpec spec{static_cast<usi::LocalOp>(li), static_cast<usi::GlobalOp>(gi)};
        for (int q = 0; q < 10; ++q) {
          const std::size_t i = rng.below(text.size());
          const std::size_t l = rng.between(1, text.size() - i);
          const std::string p = q % 3 == 0 ? oracle::random_text(rng, l, 3) : text.substr(i, l);
          const auto got = usi::global_utility_bruteforce(wt, spec, p);
          const auto want = oracle::utility(text, w, p, locals[li], globals[gi]);
          REQUIRE(got.has_value() == want.has_value());
          if (want) CHECK(oracle::close(*got, *want));
        }
      }
  }
}

TEST_CASE("accumulator handles empty and non-empty inputs") {
  usi::UtilityAccumulator sum(usi::GlobalOp::sum);
  CHECK(*sum.result() == 0.0);
  sum.add(2.5);
  sum.add(-1.0);
  CHECK(*sum.result() == 1.5);
  CHECK(sum.count() == 2);
  usi::UtilityAccumulator mn(usi::GlobalOp::min);
  CHECK_FALSE(mn.result().has_value());
  mn.add(3);
  mn.add(-4);
  CHECK(*mn.result() == -4);
  CHECK(*usi::UtilityAccumulator::finish(usi::GlobalOp::avg, 6.0, 4) == 1.5);
  CHECK(*usi::UtilityAccumulator::finish(usi::GlobalOp::avg, 0.0, 0) == 0.0);
  CHECK_FALSE(usi::UtilityAccumulator::finish(usi::GlobalOp::max, 0.0, 0).has_value());
}

TEST_CASE("fingerprints agree across direct, rolling and prefix forms") {
  usi::Fingerprinter fpr(42);
  CHECK(fpr.base() >= 2);
  CHECK(fpr.base() < usi::Fingerprinter::kModulus);
  CHECK(usi::Fingerprinter(42).base() == fpr.base());
  CHECK(usi::Fingerprinter(43).base() != fpr.base());

  oracle::Rng rng(3);
  const std::string text = oracle::random_text(rng, 500, 4);
  usi::PrefixFingerprints pre(fpr, text);
  for (std::size_t len : {1U, 2U, 7U, 64U, 500U}) {
    usi::RollingWindow win(fpr, text, len);
    for (; win.valid(); win.advance()) {
      const std::size_t i = win.position();
      const auto direct = fpr.fingerprint(std::string_view(text).substr(i, len));
      REQUIRE(win.value() == direct);
      REQUIRE(pre.fragment(i, len) == direct);
    }
  }
  // Extending one byte at a time equals hashing the whole string.
  std::uint64_t fp = 0;
  for (char c : std::string_view(text).substr(0, 40)) fp = fpr.extend(fp, static_cast<unsigned char>(c));
  CHECK(fp == fpr.fingerprint(std::string_view(text).substr(0, 40)));
  CHECK(fpr.power(0) == 1);
  CHECK(fpr.power(3) == usi::Fingerprinter::mul(fpr.base(), usi::Fingerprinter::mul(fpr.base(), fpr.base())));
}

TEST_CASE("modular arithmetic stays reduced") {
  constexpr auto p = usi::Fingerprinter::kModulus;
  CHECK(usi::Fingerprinter::mul(p - 1, p - 1) == 1);
  CHECK(usi::Fingerprinter::add(p - 1, 1) == 0);
  CHECK(usi::Fingerprinter::sub(0, 1) == p - 1);
  CHECK(usi::Fingerprinter::symbol(0) == 1);
}

TEST_CASE("distinct short strings have distinct fingerprints") {
  usi::Fingerprinter fpr;
  std::set<std::uint64_t> seen;
  std::size_t total = 0;
  for (int len = 1; len <= 3; ++len) {
    std::string s(len, '\0');
    const int count = 1 << (8 * len > 16 ? 16 : 8 * len);
    for (int v = 0; v < count; ++v) {
      for (int b = 0; b < len; ++b) s[b] = static_cast<char>((v >> (8 * (b % 2))) + b);
      seen.insert(fpr.fingerprint(s) ^ (std::uint64_t(len) << 61));
    }
    total += count;
  }
  CHECK(seen.size() == total);
}
