// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library through the C API only.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "usi/usi.h"

namespace {

using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

// Thrown to unwind with a library status.
struct Failure {
  int code;
  std::string message;
};

void check(usi_status st) {
  if (st != USI_OK) throw Failure{static_cast<int>(st), usi_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};
using IndexPtr = std::unique_ptr<usi_index, Deleter<usi_index, usi_index_free>>;
using EnginePtr = std::unique_ptr<usi_engine, Deleter<usi_engine, usi_engine_free>>;
using TunerPtr = std::unique_ptr<usi_tuner, Deleter<usi_tuner, usi_tuner_free>>;
using ListPtr = std::unique_ptr<usi_mined_list, Deleter<usi_mined_list, usi_mined_list_free>>;

IndexPtr load_index(const std::string& path) {
  usi_index* raw = nullptr;
  check(usi_index_load(path.c_str(), &raw));
  return IndexPtr(raw);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string escape(std::string_view s, std::size_t cap) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  const bool cut = s.size() > cap;
  for (char ch : s.substr(0, cap)) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x20 && c <= 0x7e && c != '\\' && c != ',' && c != '"') {
      out.push_back(ch);
    } else {
      out += "\\x";
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  if (cut) out += "...";
  return out;
}

std::string unescape(std::string_view line) {
  std::string out;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 3 < line.size() && line[i + 1] == 'x') {
      unsigned v = 0;
      const auto r = std::from_chars(line.data() + i + 2, line.data() + i + 4, v, 16);
      if (r.ec != std::errc() || r.ptr != line.data() + i + 4)
        throw Failure{kData, "bad escape in pattern"};
      out.push_back(static_cast<char>(v));
      i += 3;
    } else if (line[i] == '\\') {
      throw Failure{kData, "bad escape in pattern"};
    } else {
      out.push_back(line[i]);
    }
  }
  return out;
}

void print_scalar_record(const json& record, const std::string& format) {
  if (format == "csv") {
    bool first = true;
    for (const auto& [key, value] : record.items()) {
      std::cout << (first ? "" : ",") << key;
      first = false;
    }
    std::cout << '\n';
    first = true;
    for (const auto& [key, value] : record.items()) {
      std::cout << (first ? "" : ",") << value.dump();
      first = false;
    }
    std::cout << '\n';
  } else {
    std::cout << record.dump() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Useful-substring index: build, query, mine, tune and benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(usi_version()));

  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--seed", seed, "Seed for randomized components (0: library default)")
      ->envname("USI_SEED");
  app.add_option("--threads", threads, "Worker threads (operations are single threaded)")
      ->envname("USI_THREADS");

  // build
  auto* build = app.add_subcommand("build", "Build an index over a weighted text");
  std::string text_path, weights_path, out_path, weight_format = "text", utility = "sum-of-sum",
                                                  lce = "direct";
  std::uint64_t k = 0, s = 0;
  bool approx = false, trust = false;
  build->add_option("--text", text_path, "Text file (raw bytes)")->required();
  build->add_option("--weights", weights_path, "Weights file")->required();
  build->add_option("--k", k, "Number of top-K substrings stored in H")->required();
  build->add_flag("--approx", approx, "Mine with Approximate-Top-K");
  build->add_option("--s", s, "Sampling rounds for --approx (default ceil(log2 n))");
  build->add_option("--weight-format", weight_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}));
  build->add_option("--utility", utility, "Utility function, e.g. sum-of-sum, min-of-mean");
  build->add_option("--lce", lce, "LCE strategy for --approx: direct or fingerprint")
      ->check(CLI::IsMember({"direct", "fingerprint"}));
  build->add_flag("--trust", trust, "Skip witness verification on table hits");
  build->add_option("--out", out_path, "Index file to write")->required();

  // query
  auto* query = app.add_subcommand("query", "Answer utility queries");
  std::string index_path, pattern, patterns_file, engine = "usi", format;
  std::uint64_t capacity = 0;
  bool show_hit = false;
  query->add_option("--index", index_path, "Index file")->required();
  auto* pat_opt = query->add_option("--pattern", pattern, "A single pattern");
  auto* file_opt = query->add_option("--patterns-file", patterns_file,
                                     "One pattern per line (\\xHH escapes)");
  pat_opt->excludes(file_opt);
  query->add_option("--engine", engine, "usi, bsl1, bsl2, bsl3 or bsl4")
      ->check(CLI::IsMember({"usi", "bsl1", "bsl2", "bsl3", "bsl4"}));
  query->add_option("--capacity", capacity, "Cache capacity for bsl2-4 (default: K)");
  query->add_flag("--trust", trust, "Skip witness verification on table hits");
  query->add_flag("--show-hit", show_hit, "Also report whether H answered (usi only)");
  query->add_option("--format", format, "text (default), json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  // mine
  auto* mine = app.add_subcommand("mine", "List the (approximate) top-K frequent substrings");
  std::string mine_engine = "exact";
  double oversampling = 1.0;
  bool no_substring = false;
  mine->add_option("--text", text_path, "Text file")->required();
  mine->add_option("--k", k, "K")->required();
  mine->add_option("--engine", mine_engine, "exact, approx, shk or tktrie")
      ->check(CLI::IsMember({"exact", "approx", "shk", "tktrie"}));
  mine->add_flag("--approx", approx, "Same as --engine approx");
  mine->add_option("--s", s, "Sampling rounds (default ceil(log2 n))");
  mine->add_option("--oversampling", oversampling, "Per-round list size factor (>= 1)");
  mine->add_option("--lce", lce, "direct or fingerprint")
      ->check(CLI::IsMember({"direct", "fingerprint"}));
  mine->add_flag("--no-substring", no_substring, "Omit the substring column");
  mine->add_option("--format", format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // tune
  auto* tune = app.add_subcommand("tune", "Relate K, tau and the number of lengths");
  std::uint64_t tau = 0;
  tune->add_option("--index", index_path, "Index file")->required();
  auto* k_opt = tune->add_option("--k", k, "Report tau_K and L_K");
  auto* tau_opt = tune->add_option("--tau", tau, "Report K_tau and L_tau");
  k_opt->excludes(tau_opt);
  tune->add_option("--format", format, "json (default) or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // gen-workload
  auto* genw = app.add_subcommand("gen-workload", "Generate a query workload");
  std::string kind = "w1";
  std::uint64_t total = 1000, divisor = 0, lo = 1, hi = 5000;
  unsigned p = 50;
  double reuse = 0.5;
  genw->add_option("--index", index_path, "Index file")->required();
  genw->add_option("--out", out_path, "Workload file to write")->required();
  genw->add_option("--queries", total, "Number of queries");
  genw->add_option("--kind", kind, "w1 or w2")->check(CLI::IsMember({"w1", "w2"}));
  genw->add_option("--p", p, "Percentage of pool queries for w2")->check(CLI::Range(0, 100));
  genw->add_option("--divisor", divisor, "Pool = top-(n / divisor) substrings");
  genw->add_option("--min-length", lo, "Shortest random pattern");
  genw->add_option("--max-length", hi, "Longest random pattern");
  genw->add_option("--reuse", reuse, "Share of non-pool queries repeating pool picks");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare a miner against the exact top-K");
  std::string eval_engine = "approx";
  eval->add_option("--text", text_path, "Text file")->required();
  eval->add_option("--k", k, "K")->required();
  eval->add_option("--engine", eval_engine, "exact, approx, shk or tktrie")
      ->check(CLI::IsMember({"exact", "approx", "shk", "tktrie"}));
  eval->add_option("--s", s, "Sampling rounds for approx");
  eval->add_option("--oversampling", oversampling, "Per-round list size factor (>= 1)");
  eval->add_option("--format", format, "json (default) or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // bench
  auto* bench = app.add_subcommand("bench", "Measure query latency of the engines");
  std::string workload_path, engines = "usi,bsl1,bsl2,bsl3,bsl4", workload_name = "workload";
  std::uint64_t repetitions = 3;
  bench->add_option("--index", index_path, "Index file")->required();
  bench->add_option("--workload", workload_path, "Workload file")->required();
  bench->add_option("--engines", engines, "Comma-separated engines");
  bench->add_option("--name", workload_name, "Workload label in the report");
  bench->add_option("--capacity", capacity, "Cache capacity for bsl2-4 (default: K)");
  bench->add_option("--repetitions", repetitions, "Runs per workload; the first is discarded");
  bench->add_option("--out", out_path, "Write the CSV here instead of stdout");

  // gen-corpus
  auto* genc = app.add_subcommand("gen-corpus", "Write a synthetic DNA-like weighted text");
  std::uint64_t length = 0;
  bool binary_weights = false;
  genc->add_option("--n", length, "Text length in bytes")->required();
  genc->add_option("--text-out", text_path, "Text file to write")->required();
  genc->add_option("--weights-out", weights_path, "Weights file to write");
  genc->add_flag("--binary-weights", binary_weights, "Write weights as binary64");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*build) {
      usi_build_params params;
      usi_build_params_init(&params);
      params.k = k;
      params.miner = approx ? "approx" : "exact";
      params.s = s;
      params.utility = utility.c_str();
      params.weight_format = weight_format.c_str();
      params.lce = lce.c_str();
      params.seed = seed;
      params.trust = trust ? 1 : 0;
      usi_index* raw = nullptr;
      check(usi_index_build(text_path.c_str(), weights_path.c_str(), &params, &raw));
      IndexPtr index(raw);
      check(usi_index_save(index.get(), out_path.c_str()));
      usi_index_info info;
      check(usi_index_info_get(index.get(), &info));
      json out;
      out["n"] = info.n;
      out["k"] = info.k;
      out["tau_k"] = info.tau_k;
      out["l_k"] = info.l_k;
      out["miner"] = info.miner;
      out["s"] = info.s;
      out["table_entries"] = info.table_entries;
      out["size_bytes"] = info.size_bytes;
      std::cout << out.dump() << '\n';
    } else if (*query) {
      if (pattern.empty() && patterns_file.empty())
        throw Failure{kUsage, "one of --pattern or --patterns-file is required"};
      IndexPtr index = load_index(index_path);
      if (trust) check(usi_index_set_trust(index.get(), 1));
      usi_engine* raw = nullptr;
      check(usi_engine_open(index.get(), engine.c_str(), capacity, &raw));
      EnginePtr eng(raw);
      std::vector<std::string> patterns;
      if (!pattern.empty()) {
        patterns.push_back(pattern);
      } else {
        std::ifstream in(patterns_file, std::ios::binary);
        if (!in) throw Failure{kData, "cannot open " + patterns_file};
        for (std::string line; std::getline(in, line);) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (!line.empty()) patterns.push_back(unescape(line));
        }
      }
      const std::string fmt = format.empty() ? "text" : format;
      if (fmt == "csv") std::cout << "pattern,value" << (show_hit ? ",hit" : "") << '\n';
      json arr = json::array();
      for (const std::string& pat : patterns) {
        double value = 0.0;
        int found = 0, hit = 0;
        if (engine == "usi") {
          check(usi_index_query(index.get(), pat.data(), pat.size(), &value, &found, &hit));
        } else {
          check(usi_engine_query(eng.get(), pat.data(), pat.size(), &value, &found));
        }
        const std::string v = found ? format_double(value) : "null";
        if (fmt == "text") {
          std::cout << v;
          if (show_hit) std::cout << ' ' << (hit ? "hit" : "miss");
          std::cout << '\n';
        } else if (fmt == "csv") {
          std::cout << escape(pat, pat.size()) << ',' << v;
          if (show_hit) std::cout << ',' << hit;
          std::cout << '\n';
        } else {
          json rec;
          rec["pattern"] = escape(pat, pat.size());
          rec["value"] = found ? json(value) : json(nullptr);
          if (show_hit) rec["hit"] = hit != 0;
          arr.push_back(rec);
        }
      }
      if (fmt == "json") std::cout << (patterns.size() == 1 ? arr[0] : arr).dump() << '\n';
    } else if (*mine) {
      usi_mine_params params;
      usi_mine_params_init(&params);
      params.k = k;
      params.engine = approx ? "approx" : mine_engine.c_str();
      params.s = s;
      params.oversampling = oversampling;
      params.lce = lce.c_str();
      params.seed = seed;
      usi_mined_list* raw = nullptr;
      check(usi_mine(text_path.c_str(), &params, &raw));
      ListPtr list(raw);
      const std::size_t count = usi_mined_list_size(list.get());
      const std::string fmt = format.empty() ? "csv" : format;
      json arr = json::array();
      if (fmt == "csv")
        std::cout << "witness_pos,length,est_freq" << (no_substring ? "" : ",substring") << '\n';
      for (std::size_t i = 0; i < count; ++i) {
        usi_mined e;
        const char* sub = nullptr;
        check(usi_mined_list_get(list.get(), i, &e, &sub));
        const std::string shown = escape(std::string_view(sub, e.length), 64);
        if (fmt == "csv") {
          std::cout << e.witness << ',' << e.length << ',' << e.freq;
          if (!no_substring) std::cout << ',' << shown;
          std::cout << '\n';
        } else {
          json rec;
          rec["witness_pos"] = e.witness;
          rec["length"] = e.length;
          rec["est_freq"] = e.freq;
          if (!no_substring) rec["substring"] = shown;
          arr.push_back(rec);
        }
      }
      if (fmt == "json") std::cout << arr.dump() << '\n';
    } else if (*tune) {
      if (k_opt->count() == 0 && tau_opt->count() == 0)
        throw Failure{kUsage, "one of --k or --tau is required"};
      IndexPtr index = load_index(index_path);
      usi_tuner* raw = nullptr;
      check(usi_tuner_open(index.get(), &raw));
      TunerPtr tuner(raw);
      json out;
      if (k_opt->count() > 0) {
        std::uint64_t t = 0, l = 0;
        check(usi_tune_by_k(tuner.get(), k, &t, &l));
        out["tau_k"] = t;
        out["l_k"] = l;
      } else {
        std::uint64_t kk = 0, l = 0;
        check(usi_tune_by_tau(tuner.get(), tau, &kk, &l));
        out["k_tau"] = kk;
        out["l_tau"] = l;
      }
      print_scalar_record(out, format.empty() ? "json" : format);
    } else if (*genw) {
      IndexPtr index = load_index(index_path);
      usi_workload_params params;
      usi_workload_params_init(&params);
      params.total = total;
      if (kind == "w2") {
        params.frequent_fraction = p / 100.0;
        params.pool_divisor = 100;
      }
      if (divisor != 0) params.pool_divisor = divisor;
      params.length_lo = lo;
      params.length_hi = hi;
      params.reuse_fraction = reuse;
      if (seed != 0) params.seed = seed;
      check(usi_workload_generate(index.get(), &params, out_path.c_str()));
    } else if (*eval) {
      usi_mine_params params;
      usi_mine_params_init(&params);
      params.k = k;
      params.engine = eval_engine.c_str();
      params.s = s;
      params.oversampling = oversampling;
      params.seed = seed;
      usi_quality q;
      check(usi_evaluate(text_path.c_str(), &params, &q));
      json out;
      out["engine"] = eval_engine;
      out["k"] = k;
      out["accuracy_true_freq"] = q.accuracy_true_freq;
      out["accuracy_reported_freq"] = q.accuracy_reported_freq;
      out["relative_error"] = q.relative_error;
      out["ndcg"] = q.ndcg;
      out["exact_seconds"] = q.exact_seconds;
      out["estimate_seconds"] = q.estimate_seconds;
      print_scalar_record(out, format.empty() ? "json" : format);
    } else if (*bench) {
      IndexPtr index = load_index(index_path);
      usi_bench_params params;
      usi_bench_params_init(&params);
      params.engines = engines.c_str();
      params.workload_name = workload_name.c_str();
      params.capacity = capacity;
      params.repetitions = repetitions;
      char* csv = nullptr;
      check(usi_bench(index.get(), workload_path.c_str(), &params, &csv));
      const std::string text(csv);
      usi_string_free(csv);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw Failure{kData, "cannot write " + out_path};
      }
    } else if (*genc) {
      check(usi_generate_corpus(length, seed == 0 ? 1 : seed, text_path.c_str(),
                                weights_path.empty() ? nullptr : weights_path.c_str(),
                                binary_weights ? 1 : 0));
    }
  } catch (const Failure& f) {
    std::cerr << "usi: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "usi: " << e.what() << '\n';
    return kInternal;
  }
  std::cout.flush();
  return std::cout ? kOk : kInternal;
}
