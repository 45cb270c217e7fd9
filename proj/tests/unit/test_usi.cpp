// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "usi/error.hpp"
#include "usi/usi_index.hpp"

namespace {

const std::string kExampleText = "ATACCCCGATAATACCCCAG";
const std::vector<double> kExampleWeights = {0.9, 1, 3, 2, 0.7, 1, 1, 0.6, 0.5, 0.5,
                                             0.5, 0.8, 1, 1, 1, 0.9, 1, 1, 0.8, 1};

std::shared_ptr<const usi::TextIndex> example_base(usi::UtilitySpec spec = {}) {
  return usi::TextIndex::build(usi::WeightedText(kExampleText, kExampleWeights), spec);
}

std::string serialize(const usi::UsiIndex& index) {
  std::ostringstream out;
  index.save(out);
  return out.str();
}

usi::UsiIndex deserialize(const std::string& bytes) {
  std::istringstream in(bytes);
  return usi::UsiIndex::load(in);
}

}  // namespace

TEST_CASE("running example through the hit and the miss path") {
  const auto base = example_base();
  const auto big = usi::UsiIndex::build(base, {.k = 1000});
  const auto none = usi::UsiIndex::build(base, {.k = 0});
  bool hit = false;
  auto v = big.query("TACCCC", &hit);
  CHECK(hit);
  CHECK(*v == doctest::Approx(14.6).epsilon(1e-12));
  v = none.query("TACCCC", &hit);
  CHECK_FALSE(hit);
  CHECK(*v == doctest::Approx(14.6).epsilon(1e-12));
  CHECK(*none.query("GG") == 0.0);
  CHECK(*big.query("GG", &hit) == 0.0);
  CHECK_FALSE(hit);
  CHECK(none.table().size() == 0);
  CHECK(none.meta().tau_k == 0);
  CHECK_THROWS_AS(big.query(""), usi::Error);
}

TEST_CASE("metadata reflects the stored entries") {
  const auto base = example_base();
  const auto idx = usi::UsiIndex::build(base, {.k = 5});
  CHECK(idx.table().size() == 5);
  CHECK(idx.meta().k == 5);
  CHECK(idx.meta().miner == usi::MinerKind::exact);
  // Top-5 of the example: A(7), C(8), ... every stored count is at least tau_k.
  for (const auto& e : idx.table().slots())
    if (e.length != 0) CHECK(e.count >= idx.meta().tau_k);
  CHECK(idx.size_bytes() == base->size_bytes() + idx.table().size_bytes());
  CHECK(idx.table().size() * 10 <= idx.table().capacity() * 7);
}

TEST_CASE("utility table insert and lookup") {
  usi::UtilityTable t(4);
  bool created = false;
  for (std::uint32_t i = 1; i <= 200; ++i) {
    auto& e = t.upsert(i * 7919ULL, i % 5 + 1, i, created);
    CHECK(created);
    e.count = i;
  }
  CHECK(t.size() == 200);
  for (std::uint32_t i = 1; i <= 200; ++i) {
    const auto* e = t.find(i * 7919ULL, i % 5 + 1);
    REQUIRE(e != nullptr);
    CHECK(e->count == i);
    CHECK(t.find(i * 7919ULL, i % 5 + 2) == nullptr);
  }
  t.upsert(7919ULL, 2, 1, created);
  CHECK_FALSE(created);
  CHECK(t.size() == 200);
  CHECK(sizeof(usi::UtilityTable::Entry) == 32);
}

TEST_CASE("every utility operator matches the oracle on both miners") {
  oracle::Rng rng(41);
  for (int t = 0; t < 40; ++t) {
    const std::string s = oracle::random_test_text(rng, 120);
    const auto w = oracle::random_weights(rng, s.size());
    const int li = static_cast<int>(rng.below(2)), gi = static_cast<int>(rng.below(4));
    const usi::UtilitySpec spec{static_cast<usi::LocalOp>(li), static_cast<usi::GlobalOp>(gi)};
    const auto base = usi::TextIndex::build(usi::WeightedText(s, w), spec);
    const auto all = oracle::all_utilities(s, w, static_cast<oracle::Local>(li),
                                           static_cast<oracle::Global>(gi));
    const std::uint64_t k = rng.between(1, all.size());
    const auto exact = usi::UsiIndex::build(base, {.k = k});
    const auto approx = usi::UsiIndex::build(base, {.k = k, .miner = usi::MinerKind::approx, .s = std::min<std::size_t>(3, s.size())});
    CHECK(exact.table().size() == k);
    CHECK(approx.table().size() <= k);
    std::size_t hits = 0;
    for (const auto& [p, want] : all) {
      bool hit = false;
      for (const auto* idx : {&exact, &approx}) {
        const auto got = idx->query(p, &hit);
        REQUIRE(got.has_value());
        REQUIRE(oracle::close(*got, *want));
        hits += hit;
      }
    }
    CHECK(hits >= k);
    const std::string absent = s + "#";
    const auto miss = exact.query(absent);
    const auto want = oracle::utility(s, w, absent, static_cast<oracle::Local>(li),
                                      static_cast<oracle::Global>(gi));
    REQUIRE(miss.has_value() == want.has_value());
  }
}

TEST_CASE("trust mode answers like verify mode on stored patterns") {
  const auto base = example_base();
  auto idx = usi::UsiIndex::build(base, {.k = 50, .verify = usi::VerifyMode::trust});
  CHECK(idx.verify_mode() == usi::VerifyMode::trust);
  const auto v = *idx.query("TACCCC");
  idx.set_verify_mode(usi::VerifyMode::verify);
  CHECK(*idx.query("TACCCC") == v);
}

TEST_CASE("serialization round trip is exact") {
  oracle::Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    const std::string s = oracle::random_test_text(rng, 300);
    const auto w = oracle::random_weights(rng, s.size());
    const usi::UtilitySpec spec{static_cast<usi::LocalOp>(t % 2), static_cast<usi::GlobalOp>(t % 4)};
    const auto base = usi::TextIndex::build(usi::WeightedText(s, w), spec);
    const auto idx = usi::UsiIndex::build(
        base, {.k = rng.between(0, 40), .miner = t % 3 ? usi::MinerKind::exact : usi::MinerKind::approx});
    const std::string bytes = serialize(idx);
    const auto back = deserialize(bytes);
    CHECK(serialize(back) == bytes);
    CHECK(back.meta().k == idx.meta().k);
    CHECK(back.meta().tau_k == idx.meta().tau_k);
    CHECK(back.meta().l_k == idx.meta().l_k);
    CHECK(back.base().spec == spec);
    for (int q = 0; q < 100; ++q) {
      const std::size_t i = rng.below(s.size());
      const std::string p = s.substr(i, rng.between(1, std::min<std::size_t>(8, s.size() - i)));
      bool h1 = false, h2 = false;
      const auto a = idx.query(p, &h1), b = back.query(p, &h2);
      REQUIRE(a.has_value() == b.has_value());
      if (a) CHECK(std::memcmp(&*a, &*b, sizeof(double)) == 0);
      CHECK(h1 == h2);
    }
  }
}

TEST_CASE("damaged index files are rejected") {
  const auto idx = usi::UsiIndex::build(example_base(), {.k = 10});
  const std::string bytes = serialize(idx);
  auto expect_data_error = [](const std::string& b) {
    try {
      deserialize(b);
    } catch (const usi::Error& e) {
      return e.kind() == usi::ErrorKind::data;
    }
    return false;
  };
  CHECK(expect_data_error(bytes.substr(0, bytes.size() / 2)));
  CHECK(expect_data_error("XXXX" + bytes.substr(4)));
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x01;
  CHECK(expect_data_error(flipped));
  std::string version = bytes;
  version[4] = 9;
  CHECK(expect_data_error(version));
  CHECK_THROWS_AS(usi::UsiIndex::load("/nonexistent/dir/x.usi"), usi::Error);
}

TEST_CASE("text index fallback and frequency") {
  const auto base = example_base();
  std::uint64_t occ = 0;
  CHECK(*base->fallback_query("TACCCC", &occ) == doctest::Approx(14.6));
  CHECK(occ == 2);
  CHECK(base->frequency("A") == 7);
  CHECK(base->frequency("GG") == 0);
  CHECK(base->size_bytes() == 20 + 20 * 8 + 20 * 8);
}
