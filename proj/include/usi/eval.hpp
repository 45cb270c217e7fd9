// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usi/approx_topk.hpp"
#include "usi/competitors.hpp"
#include "usi/suffix_array.hpp"
#include "usi/tuning.hpp"

namespace usi {

struct WorkloadConfig {
  std::size_t total_queries = 0;
  double frequent_fraction = 0.9;
  std::size_t pool_divisor = 50;
  std::size_t length_lo = 1;
  std::size_t length_hi = 5000;
  // Share of the non-pool queries that repeat an already selected frequent
  // pattern; the rest are random substrings.
  double reuse_fraction = 0.5;
  std::uint64_t seed = 1;

  // 90% of the queries from the top-n/divisor substrings.
  static WorkloadConfig w1(std::size_t total, std::size_t divisor = 50, std::uint64_t seed = 1);
  // p% of the queries from the top-n/100 substrings.
  static WorkloadConfig w2(std::size_t total, unsigned p, std::uint64_t seed = 1);
};

std::vector<std::string> generate_workload(std::string_view text, const SuffixArrayIndex& idx,
                                           const TuningTables& tables,
                                           const WorkloadConfig& cfg);

// One pattern per line; backslash, bytes outside 0x20..0x7e are written as \xHH.
void write_workload(std::ostream& out, std::span<const std::string> patterns);
std::vector<std::string> read_workload(std::istream& in);
std::string escape_pattern(std::string_view pattern);
std::string unescape_pattern(std::string_view line);

// Substrings as listed by the miners.
std::vector<std::uint64_t> true_frequencies(std::string_view text, const SuffixArrayIndex& idx,
                                            std::span<const SampledEntry> entries);
std::vector<SampledEntry> to_entries(const SuffixArrayIndex& idx,
                                     std::span<const TopKTriple> triples);

struct QualityReport {
  double accuracy_true_freq = 0.0;
  double accuracy_reported_freq = 0.0;
  double relative_error = 0.0;
  double ndcg = 0.0;
};

// Share (in percent) of K matched by the multiset intersection of the two
// frequency lists.
double accuracy(std::span<const std::uint64_t> exact, std::span<const std::uint64_t> estimated);
double relative_error(std::span<const std::uint64_t> exact,
                      std::span<const std::uint64_t> estimated);
// `estimated` holds true frequencies in the estimator's rank order.
double ndcg(std::span<const std::uint64_t> exact, std::span<const std::uint64_t> estimated);

QualityReport evaluate_quality(std::string_view text, const SuffixArrayIndex& idx,
                               std::span<const TopKTriple> exact,
                               std::span<const SampledEntry> estimated);

struct LatencyStats {
  std::size_t queries = 0;
  double mean_ns = 0.0;
  double median_ns = 0.0;
  double p99_ns = 0.0;
  std::size_t hits = 0;  // engine-reported, where known
  double checksum = 0.0;  // sum of finite answers, to compare engines
};

struct NamedWorkload {
  std::string name;
  std::vector<std::string> patterns;
};

struct EngineReport {
  std::string engine;
  std::string workload;
  LatencyStats latency;
  std::size_t index_size_bytes = 0;
};

// Runs every workload `repetitions` times per engine and keeps the
// statistics of the runs after the first.
std::vector<EngineReport> run_benchmark(std::span<QueryEngine* const> engines,
                                        std::span<const NamedWorkload> workloads,
                                        std::size_t repetitions = 3);

struct CsvRow {
  std::string engine;
  std::string workload;
  std::uint64_t k = 0;
  std::uint64_t s = 0;
  std::uint64_t n = 0;
  std::string metric;
  double value = 0.0;
};

void write_report_csv(std::ostream& out, std::span<const CsvRow> rows, bool header = true);

// Peak resident set (bytes) of a child process running argv; also returns
// its exit status through `status` when given.
std::uint64_t measure_child_peak_rss(const std::vector<std::string>& argv, int* status = nullptr);

// Deterministic DNA-like text: a skewed order-2 Markov background with
// mutated copies of repeat families and microsatellites.
std::string generate_dna_like(std::size_t n, std::uint64_t seed);
std::vector<double> generate_weights(std::size_t n, std::uint64_t seed);

}  // namespace usi
