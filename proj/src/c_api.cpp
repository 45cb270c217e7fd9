// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include "usi/usi.h"

#include <sys/wait.h>

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "usi/approx_topk.hpp"
#include "usi/competitors.hpp"
#include "usi/error.hpp"
#include "usi/eval.hpp"
#include "usi/tuning.hpp"
#include "usi/usi_index.hpp"
#include "usi/weighted_text.hpp"

struct usi_index {
  std::shared_ptr<usi::UsiIndex> index;
};

struct usi_engine {
  std::unique_ptr<usi::QueryEngine> engine;
};

struct usi_tuner {
  usi::TuningTables tables;
};

struct usi_mined_list {
  std::string text;
  std::vector<usi::SampledEntry> entries;
};

namespace {

thread_local std::string g_last_error;

usi_status fail(usi_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

template <class F>
usi_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return USI_OK;
  } catch (const usi::Error& e) {
    switch (e.kind()) {
      case usi::ErrorKind::usage: return fail(USI_ERR_USAGE, e.what());
      case usi::ErrorKind::data: return fail(USI_ERR_DATA, e.what());
      case usi::ErrorKind::internal: return fail(USI_ERR_INTERNAL, e.what());
    }
    return fail(USI_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(USI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(USI_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) usi::throw_usage(std::string(what) + " must not be null");
}

std::string_view or_default(const char* s, std::string_view fallback) {
  return s != nullptr && *s != '\0' ? std::string_view(s) : fallback;
}

std::string read_file(const char* path) {
  require(path, "path");
  std::ifstream in(path, std::ios::binary);
  if (!in) usi::throw_data(std::string("cannot open ") + path);
  std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) usi::throw_data(std::string("cannot read ") + path);
  return out;
}

usi::MinerKind parse_miner(std::string_view name) {
  if (name == "exact") return usi::MinerKind::exact;
  if (name == "approx") return usi::MinerKind::approx;
  usi::throw_usage("unknown miner '" + std::string(name) + "'");
}

usi::UsiBuildOptions to_options(const usi_build_params& p) {
  usi::UsiBuildOptions o;
  o.k = p.k;
  o.miner = parse_miner(or_default(p.miner, "exact"));
  o.s = static_cast<std::size_t>(p.s);
  o.lce = usi::parse_lce_strategy(or_default(p.lce, "direct"));
  o.seed = p.seed != 0 ? p.seed : usi::kDefaultFingerprintSeed;
  o.verify = p.trust != 0 ? usi::VerifyMode::trust : usi::VerifyMode::verify;
  return o;
}

void build_into(usi::WeightedText wt, const usi_build_params* params, usi_index** out) {
  usi_build_params defaults;
  usi_build_params_init(&defaults);
  const usi_build_params& p = params != nullptr ? *params : defaults;
  const usi::UtilitySpec spec = usi::parse_utility_spec(or_default(p.utility, "sum-of-sum"));
  const usi::UsiBuildOptions options = to_options(p);
  auto base = usi::TextIndex::build(std::move(wt), spec);
  auto index = std::make_shared<usi::UsiIndex>(usi::UsiIndex::build(std::move(base), options));
  *out = new usi_index{std::move(index)};
}

std::vector<usi::SampledEntry> mine_entries(std::string_view text, const usi_mine_params& p) {
  const std::string_view engine = or_default(p.engine, "exact");
  if (text.empty()) usi::throw_usage("text must not be empty");
  if (p.k == 0) usi::throw_usage("K must be at least 1");
  const std::uint64_t seed = p.seed != 0 ? p.seed : usi::kDefaultFingerprintSeed;
  if (engine == "exact") {
    const usi::SuffixArrayIndex idx = usi::build_suffix_index(text);
    std::vector<usi::TopKTriple> triples;
    {
      const usi::TuningTables tables = usi::build_tuning_tables(idx, {.leaf_segment = false});
      triples = usi::exact_top_k(tables, idx, p.k);
    }
    return usi::to_entries(idx, triples);
  }
  if (engine == "approx") {
    usi::ApproxOptions o;
    o.s = static_cast<std::size_t>(p.s);
    o.oversampling = p.oversampling > 0.0 ? p.oversampling : 1.0;
    o.strategy = usi::parse_lce_strategy(or_default(p.lce, "direct"));
    o.seed = seed;
    return usi::approximate_top_k(text, p.k, o);
  }
  if (engine == "shk") {
    usi::SubstringHkOptions o;
    o.seed = seed;
    return usi::substring_hk_mine(text, p.k, o);
  }
  if (engine == "tktrie") return usi::topk_trie_mine(text, p.k);
  usi::throw_usage("unknown mining engine '" + std::string(engine) + "'");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void answer(const std::optional<double>& v, double* value, int* found) {
  if (found != nullptr) *found = v.has_value() ? 1 : 0;
  if (value != nullptr) *value = v.value_or(0.0);
}

}  // namespace

extern "C" {

const char* usi_version(void) { return "1.0.0"; }

const char* usi_last_error(void) { return g_last_error.c_str(); }

void usi_string_free(char* s) { std::free(s); }

void usi_build_params_init(usi_build_params* params) {
  if (params == nullptr) return;
  *params = usi_build_params{};
  params->miner = "exact";
  params->utility = "sum-of-sum";
  params->weight_format = "text";
  params->lce = "direct";
}

usi_status usi_index_build(const char* text_path, const char* weights_path,
                           const usi_build_params* params, usi_index** out) {
  return guarded([&] {
    require(text_path, "text path");
    require(weights_path, "weights path");
    require(out, "out");
    const usi::WeightFormat format = usi::parse_weight_format(
        or_default(params != nullptr ? params->weight_format : nullptr, "text"));
    build_into(usi::load_weighted_text(text_path, weights_path, format), params, out);
  });
}

usi_status usi_index_build_from_memory(const char* text, size_t n, const double* weights,
                                       const usi_build_params* params, usi_index** out) {
  return guarded([&] {
    require(text, "text");
    require(weights, "weights");
    require(out, "out");
    build_into(usi::WeightedText(std::string(text, n), std::vector<double>(weights, weights + n)),
               params, out);
  });
}

usi_status usi_index_save(const usi_index* index, const char* path) {
  return guarded([&] {
    require(index, "index");
    require(path, "path");
    index->index->save(std::string(path));
  });
}

usi_status usi_index_load(const char* path, usi_index** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new usi_index{std::make_shared<usi::UsiIndex>(usi::UsiIndex::load(std::string(path)))};
  });
}

void usi_index_free(usi_index* index) { delete index; }

usi_status usi_index_query(const usi_index* index, const char* pattern, size_t length,
                           double* value, int* found, int* hit) {
  return guarded([&] {
    require(index, "index");
    require(pattern, "pattern");
    bool h = false;
    answer(index->index->query(std::string_view(pattern, length), &h), value, found);
    if (hit != nullptr) *hit = h ? 1 : 0;
  });
}

usi_status usi_index_set_trust(usi_index* index, int trust) {
  return guarded([&] {
    require(index, "index");
    index->index->set_verify_mode(trust != 0 ? usi::VerifyMode::trust : usi::VerifyMode::verify);
  });
}

usi_status usi_index_info_get(const usi_index* index, usi_index_info* info) {
  return guarded([&] {
    require(index, "index");
    require(info, "info");
    const usi::UsiIndex& x = *index->index;
    *info = usi_index_info{};
    info->n = x.base().size();
    info->k = x.meta().k;
    info->tau_k = x.meta().tau_k;
    info->l_k = x.meta().l_k;
    info->s = x.meta().s;
    info->seed = x.meta().seed;
    info->table_entries = x.table().size();
    info->size_bytes = x.size_bytes();
    info->base_size_bytes = x.base().size_bytes();
    std::snprintf(info->miner, sizeof info->miner, "%s", usi::to_string(x.meta().miner).c_str());
    std::snprintf(info->utility, sizeof info->utility, "%s",
                  usi::to_string(x.base().spec).c_str());
  });
}

usi_status usi_engine_open(const usi_index* index, const char* name, uint64_t capacity,
                           usi_engine** out) {
  return guarded([&] {
    require(index, "index");
    require(out, "out");
    const std::string_view engine = or_default(name, "usi");
    const std::uint64_t cap = capacity != 0 ? capacity : index->index->meta().k;
    auto e = std::make_unique<usi_engine>();
    if (engine == "usi") e->engine = std::make_unique<usi::UsiEngine>(index->index);
    else e->engine = usi::make_baseline(engine, index->index->shared_base(), cap);
    *out = e.release();
  });
}

usi_status usi_engine_query(usi_engine* engine, const char* pattern, size_t length, double* value,
                            int* found) {
  return guarded([&] {
    require(engine, "engine");
    require(pattern, "pattern");
    answer(engine->engine->query(std::string_view(pattern, length)), value, found);
  });
}

uint64_t usi_engine_size_bytes(const usi_engine* engine) {
  return engine != nullptr ? engine->engine->size_bytes() : 0;
}

void usi_engine_free(usi_engine* engine) { delete engine; }

usi_status usi_tuner_open(const usi_index* index, usi_tuner** out) {
  return guarded([&] {
    require(index, "index");
    require(out, "out");
    *out = new usi_tuner{usi::build_tuning_tables(index->index->base().sa)};
  });
}

usi_status usi_tune_by_k(const usi_tuner* tuner, uint64_t k, uint64_t* tau_k, uint64_t* l_k) {
  return guarded([&] {
    require(tuner, "tuner");
    const usi::TuneByK r = usi::tune_by_k(tuner->tables, k);
    if (tau_k != nullptr) *tau_k = r.tau;
    if (l_k != nullptr) *l_k = r.lengths;
  });
}

usi_status usi_tune_by_tau(const usi_tuner* tuner, uint64_t tau, uint64_t* k_tau,
                           uint64_t* l_tau) {
  return guarded([&] {
    require(tuner, "tuner");
    const usi::TuneByTau r = usi::tune_by_tau(tuner->tables, tau);
    if (k_tau != nullptr) *k_tau = r.k;
    if (l_tau != nullptr) *l_tau = r.lengths;
  });
}

void usi_tuner_free(usi_tuner* tuner) { delete tuner; }

void usi_mine_params_init(usi_mine_params* params) {
  if (params == nullptr) return;
  *params = usi_mine_params{};
  params->engine = "exact";
  params->oversampling = 1.0;
  params->lce = "direct";
}

usi_status usi_mine_from_memory(const char* text, size_t n, const usi_mine_params* params,
                                usi_mined_list** out) {
  return guarded([&] {
    require(text, "text");
    require(params, "params");
    require(out, "out");
    auto list = std::make_unique<usi_mined_list>();
    list->text.assign(text, n);
    list->entries = mine_entries(list->text, *params);
    *out = list.release();
  });
}

usi_status usi_mine(const char* text_path, const usi_mine_params* params, usi_mined_list** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    auto list = std::make_unique<usi_mined_list>();
    list->text = read_file(text_path);
    list->entries = mine_entries(list->text, *params);
    *out = list.release();
  });
}

size_t usi_mined_list_size(const usi_mined_list* list) {
  return list != nullptr ? list->entries.size() : 0;
}

usi_status usi_mined_list_get(const usi_mined_list* list, size_t i, usi_mined* out,
                              const char** substring) {
  return guarded([&] {
    require(list, "list");
    if (i >= list->entries.size()) usi::throw_usage("entry index out of range");
    const usi::SampledEntry& e = list->entries[i];
    if (out != nullptr) *out = usi_mined{e.j, e.length, e.f};
    if (substring != nullptr) *substring = list->text.data() + e.j;
  });
}

void usi_mined_list_free(usi_mined_list* list) { delete list; }

usi_status usi_evaluate(const char* text_path, const usi_mine_params* params, usi_quality* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    using Clock = std::chrono::steady_clock;
    const std::string text = read_file(text_path);
    if (text.empty()) usi::throw_usage("text must not be empty");
    if (params->k == 0) usi::throw_usage("K must be at least 1");
    const auto t0 = Clock::now();
    const usi::SuffixArrayIndex idx = usi::build_suffix_index(text);
    std::vector<usi::TopKTriple> exact;
    {
      const usi::TuningTables tables = usi::build_tuning_tables(idx, {.leaf_segment = false});
      exact = usi::exact_top_k(tables, idx, params->k);
    }
    const auto t1 = Clock::now();
    const std::vector<usi::SampledEntry> estimated = mine_entries(text, *params);
    const auto t2 = Clock::now();
    const usi::QualityReport q = usi::evaluate_quality(text, idx, exact, estimated);
    *out = usi_quality{q.accuracy_true_freq,
                       q.accuracy_reported_freq,
                       q.relative_error,
                       q.ndcg,
                       std::chrono::duration<double>(t1 - t0).count(),
                       std::chrono::duration<double>(t2 - t1).count()};
  });
}

void usi_workload_params_init(usi_workload_params* params) {
  if (params == nullptr) return;
  const usi::WorkloadConfig c = usi::WorkloadConfig::w1(1000);
  *params = usi_workload_params{c.total_queries, c.frequent_fraction, c.pool_divisor,
                                c.length_lo,     c.length_hi,         c.reuse_fraction,
                                c.seed};
}

usi_status usi_workload_generate(const usi_index* index, const usi_workload_params* params,
                                 const char* out_path) {
  return guarded([&] {
    require(index, "index");
    require(params, "params");
    require(out_path, "output path");
    usi::WorkloadConfig c;
    c.total_queries = static_cast<std::size_t>(params->total);
    c.frequent_fraction = params->frequent_fraction;
    c.pool_divisor = static_cast<std::size_t>(params->pool_divisor);
    c.length_lo = static_cast<std::size_t>(params->length_lo);
    c.length_hi = static_cast<std::size_t>(params->length_hi);
    c.reuse_fraction = params->reuse_fraction;
    c.seed = params->seed;
    const usi::TextIndex& base = index->index->base();
    std::vector<std::string> patterns;
    {
      const usi::TuningTables tables = usi::build_tuning_tables(base.sa, {.leaf_segment = false});
      patterns = usi::generate_workload(base.text, base.sa, tables, c);
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) usi::throw_data(std::string("cannot open ") + out_path + " for writing");
    usi::write_workload(out, patterns);
    out.close();
    if (!out) usi::throw_data(std::string("cannot write ") + out_path);
  });
}

void usi_bench_params_init(usi_bench_params* params) {
  if (params == nullptr) return;
  *params = usi_bench_params{};
  params->engines = "usi,bsl1,bsl2,bsl3,bsl4";
  params->workload_name = "workload";
  params->repetitions = 3;
}

usi_status usi_bench(const usi_index* index, const char* workload_path,
                     const usi_bench_params* params, char** csv) {
  return guarded([&] {
    require(index, "index");
    require(workload_path, "workload path");
    require(csv, "csv");
    usi_bench_params defaults;
    usi_bench_params_init(&defaults);
    const usi_bench_params& p = params != nullptr ? *params : defaults;
    std::ifstream in(workload_path, std::ios::binary);
    if (!in) usi::throw_data(std::string("cannot open ") + workload_path);
    std::vector<usi::NamedWorkload> workloads(1);
    workloads[0].name = std::string(or_default(p.workload_name, "workload"));
    workloads[0].patterns = usi::read_workload(in);

    const usi::UsiIndex& x = *index->index;
    const std::uint64_t cap = p.capacity != 0 ? p.capacity : x.meta().k;
    std::vector<std::unique_ptr<usi::QueryEngine>> owned;
    std::stringstream names{std::string(or_default(p.engines, defaults.engines))};
    for (std::string name; std::getline(names, name, ',');) {
      if (name.empty()) continue;
      if (name == "usi") owned.push_back(std::make_unique<usi::UsiEngine>(index->index));
      else owned.push_back(usi::make_baseline(name, x.shared_base(), cap));
    }
    std::vector<usi::QueryEngine*> engines;
    for (auto& e : owned) engines.push_back(e.get());
    const auto reports = usi::run_benchmark(engines, workloads,
                                            p.repetitions != 0 ? p.repetitions : 3);
    std::vector<usi::CsvRow> rows;
    for (const usi::EngineReport& r : reports) {
      const auto row = [&](const char* metric, double value) {
        rows.push_back({r.engine, r.workload, x.meta().k, x.meta().s, x.base().size(), metric, value});
      };
      row("queries", static_cast<double>(r.latency.queries));
      row("mean_ns", r.latency.mean_ns);
      row("median_ns", r.latency.median_ns);
      row("p99_ns", r.latency.p99_ns);
      row("index_size_bytes", static_cast<double>(r.index_size_bytes));
      row("checksum", r.latency.checksum);
    }
    std::ostringstream out;
    usi::write_report_csv(out, rows);
    *csv = copy_string(out.str());
  });
}

usi_status usi_measure_peak_rss(const char* const* argv, uint64_t* peak_bytes, int* exit_code) {
  return guarded([&] {
    require(argv, "argv");
    std::vector<std::string> args;
    for (const char* const* a = argv; *a != nullptr; ++a) args.emplace_back(*a);
    int status = 0;
    const std::uint64_t peak = usi::measure_child_peak_rss(args, &status);
    if (peak_bytes != nullptr) *peak_bytes = peak;
    if (exit_code != nullptr) *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  });
}

usi_status usi_generate_corpus(uint64_t n, uint64_t seed, const char* text_path,
                               const char* weights_path, int binary_weights) {
  return guarded([&] {
    require(text_path, "text path");
    if (n == 0 || n > usi::kMaxTextLength) usi::throw_usage("corpus length out of range");
    {
      const std::string text = usi::generate_dna_like(static_cast<std::size_t>(n), seed);
      std::ofstream out(text_path, std::ios::binary | std::ios::trunc);
      out.write(text.data(), static_cast<std::streamsize>(text.size()));
      if (!out) usi::throw_data(std::string("cannot write ") + text_path);
    }
    if (weights_path != nullptr) {
      const std::vector<double> w = usi::generate_weights(static_cast<std::size_t>(n), seed + 1);
      std::ofstream out(weights_path, std::ios::binary | std::ios::trunc);
      char buf[32];
      for (double v : w) {
        if (binary_weights != 0) {
          const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
          for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>(bits >> (8 * b));
          out.write(buf, 8);
        } else {
          const int len = std::snprintf(buf, sizeof buf, "%.6f\n", v);
          out.write(buf, len);
        }
      }
      if (!out) usi::throw_data(std::string("cannot write ") + weights_path);
    }
  });
}

}  // extern "C"
