// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/eval.hpp"

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "usi/error.hpp"

namespace usi {

namespace {

// Portable uniform draws on top of mt19937_64 (the standard distributions
// are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(gen_()) * bound) >> 64);
  }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
};

double percentile(std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  const std::size_t k = std::min(v.size() - 1, idx == static_cast<std::size_t>(-1) ? 0 : idx);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

WorkloadConfig WorkloadConfig::w1(std::size_t total, std::size_t divisor, std::uint64_t seed) {
  WorkloadConfig c;
  c.total_queries = total;
  c.frequent_fraction = 0.9;
  c.pool_divisor = divisor;
  c.seed = seed;
  return c;
}

WorkloadConfig WorkloadConfig::w2(std::size_t total, unsigned p, std::uint64_t seed) {
  if (p > 100) throw_usage("p must lie in [0, 100]");
  WorkloadConfig c;
  c.total_queries = total;
  c.frequent_fraction = p / 100.0;
  c.pool_divisor = 100;
  c.seed = seed;
  return c;
}

std::vector<std::string> generate_workload(std::string_view text, const SuffixArrayIndex& idx,
                                           const TuningTables& tables,
                                           const WorkloadConfig& cfg) {
  const std::size_t n = text.size();
  if (cfg.frequent_fraction < 0.0 || cfg.frequent_fraction > 1.0)
    throw_usage("frequent fraction must lie in [0, 1]");
  if (cfg.reuse_fraction < 0.0 || cfg.reuse_fraction > 1.0)
    throw_usage("reuse fraction must lie in [0, 1]");
  if (cfg.pool_divisor == 0) throw_usage("pool divisor must be at least 1");
  if (cfg.length_lo == 0 || cfg.length_lo > cfg.length_hi) throw_usage("bad length range");
  if (cfg.length_lo > n) throw_usage("length range exceeds the text");
  const std::size_t pool_size = n / cfg.pool_divisor;
  const auto frequent =
      static_cast<std::size_t>(std::llround(cfg.frequent_fraction * static_cast<double>(cfg.total_queries)));
  if (pool_size == 0 && (frequent > 0 || cfg.reuse_fraction > 0.0))
    throw_usage("n / pool divisor is below 1");

  std::vector<TopKTriple> pool;
  if (pool_size > 0) pool = exact_top_k(tables, idx, pool_size);
  Rng rng(cfg.seed);
  std::vector<std::string> out;
  out.reserve(cfg.total_queries);
  for (std::size_t q = 0; q < frequent; ++q) {
    const TopKTriple& t = pool[rng.below(pool.size())];
    out.emplace_back(text.substr(idx.sa[t.lb], t.lcp));
  }
  const std::size_t hi = std::min(cfg.length_hi, n);
  for (std::size_t q = frequent; q < cfg.total_queries; ++q) {
    if (frequent > 0 && rng.unit() < cfg.reuse_fraction) {
      out.push_back(out[rng.below(frequent)]);
    } else {
      const std::size_t len = rng.between(cfg.length_lo, hi);
      const std::size_t pos = rng.below(n - len + 1);
      out.emplace_back(text.substr(pos, len));
    }
  }
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
  return out;
}

std::string escape_pattern(std::string_view pattern) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(pattern.size());
  for (char ch : pattern) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x20 && c <= 0x7e && c != '\\') {
      out.push_back(ch);
    } else {
      out += "\\x";
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

std::string unescape_pattern(std::string_view line) {
  const auto hex = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw_data("bad escape in pattern '" + std::string(line) + "'");
  };
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != '\\') {
      out.push_back(line[i]);
      continue;
    }
    if (i + 3 >= line.size() || line[i + 1] != 'x')
      throw_data("bad escape in pattern '" + std::string(line) + "'");
    out.push_back(static_cast<char>(hex(line[i + 2]) * 16 + hex(line[i + 3])));
    i += 3;
  }
  return out;
}

void write_workload(std::ostream& out, std::span<const std::string> patterns) {
  for (const std::string& p : patterns) out << escape_pattern(p) << '\n';
}

std::vector<std::string> read_workload(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(unescape_pattern(line));
  }
  return out;
}

std::vector<std::uint64_t> true_frequencies(std::string_view text, const SuffixArrayIndex& idx,
                                            std::span<const SampledEntry> entries) {
  std::vector<std::uint64_t> out;
  out.reserve(entries.size());
  for (const SampledEntry& e : entries) {
    if (e.length == 0 || std::size_t{e.j} + e.length > text.size())
      throw_usage("entry out of range");
    const auto range = pattern_interval(idx.sa, text, text.substr(e.j, e.length));
    out.push_back(range ? range->count() : 0);
  }
  return out;
}

std::vector<SampledEntry> to_entries(const SuffixArrayIndex& idx,
                                     std::span<const TopKTriple> triples) {
  std::vector<SampledEntry> out;
  out.reserve(triples.size());
  for (const TopKTriple& t : triples) out.push_back({idx.sa[t.lb], t.lcp, t.frequency()});
  return out;
}

double accuracy(std::span<const std::uint64_t> exact, std::span<const std::uint64_t> estimated) {
  if (exact.empty()) return 0.0;
  std::vector<std::uint64_t> a(exact.begin(), exact.end());
  std::vector<std::uint64_t> b(estimated.begin(), estimated.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 100.0 * static_cast<double>(common) / static_cast<double>(exact.size());
}

double relative_error(std::span<const std::uint64_t> exact,
                      std::span<const std::uint64_t> estimated) {
  const auto total = [](std::span<const std::uint64_t> v) {
    return std::accumulate(v.begin(), v.end(), 0.0L);
  };
  const long double denom = total(exact);
  if (denom <= 0) throw_usage("exact frequencies sum to zero");
  return static_cast<double>((denom - total(estimated)) / denom);
}

double ndcg(std::span<const std::uint64_t> exact, std::span<const std::uint64_t> estimated) {
  const std::size_t k = exact.size();
  std::vector<std::uint64_t> ideal(exact.begin(), exact.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0, dcg = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double discount = std::log2(static_cast<double>(i) + 2.0);
    idcg += static_cast<double>(ideal[i]) / discount;
    if (i < estimated.size()) dcg += static_cast<double>(estimated[i]) / discount;
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

QualityReport evaluate_quality(std::string_view text, const SuffixArrayIndex& idx,
                               std::span<const TopKTriple> exact,
                               std::span<const SampledEntry> estimated) {
  std::vector<std::uint64_t> truth;
  truth.reserve(exact.size());
  for (const TopKTriple& t : exact) truth.push_back(t.frequency());
  const std::vector<std::uint64_t> est_true = true_frequencies(text, idx, estimated);
  std::vector<std::uint64_t> est_reported;
  est_reported.reserve(estimated.size());
  for (const SampledEntry& e : estimated) est_reported.push_back(e.f);
  QualityReport r;
  r.accuracy_true_freq = accuracy(truth, est_true);
  r.accuracy_reported_freq = accuracy(truth, est_reported);
  r.relative_error = truth.empty() ? 0.0 : relative_error(truth, est_true);
  r.ndcg = ndcg(truth, est_true);
  return r;
}

std::vector<EngineReport> run_benchmark(std::span<QueryEngine* const> engines,
                                        std::span<const NamedWorkload> workloads,
                                        std::size_t repetitions) {
  using Clock = std::chrono::steady_clock;
  std::vector<EngineReport> out;
  for (QueryEngine* engine : engines) {
    for (const NamedWorkload& w : workloads) {
      EngineReport rep;
      rep.engine = engine->name();
      rep.workload = w.name;
      std::vector<double> samples;
      samples.reserve(w.patterns.size() * (repetitions > 1 ? repetitions - 1 : 1));
      double checksum = 0.0;
      for (std::size_t r = 0; r < std::max<std::size_t>(repetitions, 1); ++r) {
        const bool keep = repetitions <= 1 || r > 0;
        engine->reset();  // every run sees the workload as a fresh stream
        double sum = 0.0;
        for (const std::string& p : w.patterns) {
          const auto t0 = Clock::now();
          const std::optional<double> v = engine->query(p);
          const auto t1 = Clock::now();
          if (v) sum += *v;
          if (keep) samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
        }
        checksum = sum;
      }
      LatencyStats& s = rep.latency;
      s.queries = w.patterns.size();
      s.checksum = checksum;
      if (!samples.empty()) {
        s.mean_ns = std::accumulate(samples.begin(), samples.end(), 0.0) /
                    static_cast<double>(samples.size());
        s.median_ns = percentile(samples, 0.5);
        s.p99_ns = percentile(samples, 0.99);
      }
      rep.index_size_bytes = engine->size_bytes();
      out.push_back(std::move(rep));
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, std::span<const CsvRow> rows, bool header) {
  if (header) out << "engine,workload,K,s,n,metric,value\n";
  for (const CsvRow& r : rows) {
    out << r.engine << ',' << r.workload << ',' << r.k << ',' << r.s << ',' << r.n << ','
        << r.metric << ',' << format_value(r.value) << '\n';
  }
}

std::uint64_t measure_child_peak_rss(const std::vector<std::string>& argv, int* status) {
  if (argv.empty()) throw_usage("empty command");
  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const pid_t pid = fork();
  if (pid < 0) throw_internal("fork failed");
  if (pid == 0) {
    execvp(args[0], args.data());
    _exit(127);
  }
  int st = 0;
  rusage ru{};
  if (wait4(pid, &st, 0, &ru) < 0) throw_internal("wait4 failed");
  if (status) *status = st;
  return static_cast<std::uint64_t>(ru.ru_maxrss) * 1024;
}

std::string generate_dna_like(std::size_t n, std::uint64_t seed) {
  static constexpr char kBases[] = "ACGT";
  Rng rng(seed);
  // Order-2 background: a skewed distribution per context.
  std::array<std::array<double, 4>, 16> cdf{};
  for (auto& row : cdf) {
    std::array<double, 4> w{};
    double total = 0.0;
    for (double& x : w) {
      x = std::pow(-std::log(1.0 - rng.unit()), 1.5) + 0.05;
      total += x;
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      acc += w[c] / total;
      row[c] = acc;
    }
    row[3] = 1.0;
  }
  auto background = [&](std::size_t ctx) {
    const double u = rng.unit();
    std::size_t c = 0;
    while (u >= cdf[ctx][c]) ++c;
    return c;
  };

  constexpr std::size_t kFamilies = 200;
  std::vector<std::string> families(kFamilies);
  for (std::string& f : families) {
    const auto len = static_cast<std::size_t>(200.0 * std::pow(20.0, rng.unit()));
    for (std::size_t i = 0; i < len; ++i) f.push_back(kBases[rng.below(4)]);
  }

  std::string out;
  out.reserve(n);
  std::size_t ctx = 0;
  auto push = [&](char c) {
    out.push_back(c);
    const std::size_t code = c == 'A' ? 0 : c == 'C' ? 1 : c == 'G' ? 2 : 3;
    ctx = (ctx * 4 + code) & 15;
  };
  while (out.size() < n) {
    const double u = rng.unit();
    if (u < 0.0002) {
      // Mutated copy of a repeat family; low indices are more common.
      const double v = rng.unit();
      const std::string& f = families[static_cast<std::size_t>(v * v * kFamilies)];
      const double rate = 0.01 + 0.14 * rng.unit();
      for (std::size_t i = 0; i < f.size() && out.size() < n; ++i)
        push(rng.unit() < rate ? kBases[rng.below(4)] : f[i]);
    } else if (u < 0.0007) {
      std::string unit;
      const std::size_t len = rng.between(1, 6);
      for (std::size_t i = 0; i < len; ++i) unit.push_back(kBases[rng.below(4)]);
      const std::size_t reps = rng.between(5, 40);
      for (std::size_t r = 0; r < reps && out.size() < n; ++r)
        for (char c : unit) {
          if (out.size() < n) push(c);
        }
    } else {
      push(kBases[background(ctx)]);
    }
  }
  return out;
}

std::vector<double> generate_weights(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n);
  for (double& x : w) x = rng.unit();
  return w;
}

}  // namespace usi
