/* Copyright 2026 The USI Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the USI library. All handles are opaque; every function
 * that can fail returns a usi_status and leaves a message retrievable with
 * usi_last_error() on the calling thread.
 */

#ifndef USI_USI_H_
#define USI_USI_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define USI_API __declspec(dllexport)
#else
#define USI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum usi_status {
  USI_OK = 0,
  USI_ERR_USAGE = 1,    /* invalid argument */
  USI_ERR_DATA = 2,     /* malformed or inconsistent input */
  USI_ERR_INTERNAL = 3, /* library invariant violated */
} usi_status;

typedef struct usi_index usi_index;
typedef struct usi_engine usi_engine;
typedef struct usi_tuner usi_tuner;
typedef struct usi_mined_list usi_mined_list;

USI_API const char* usi_version(void);
/* Message of the last failed call on this thread ("" if none). */
USI_API const char* usi_last_error(void);
/* Releases strings returned by this library. */
USI_API void usi_string_free(char* s);

typedef struct usi_build_params {
  uint64_t k;
  const char* miner;         /* "exact" (default) or "approx" */
  uint64_t s;                /* approx only; 0 selects ceil(log2 n) */
  const char* utility;       /* e.g. "sum-of-sum" (default) */
  const char* weight_format; /* "text" (default) or "binary" */
  const char* lce;           /* "direct" (default) or "fingerprint" */
  uint64_t seed;             /* 0 selects the library default */
  int trust;                 /* nonzero skips witness verification on hits */
} usi_build_params;

USI_API void usi_build_params_init(usi_build_params* params);

USI_API usi_status usi_index_build(const char* text_path, const char* weights_path,
                                   const usi_build_params* params, usi_index** out);
USI_API usi_status usi_index_build_from_memory(const char* text, size_t n, const double* weights,
                                               const usi_build_params* params, usi_index** out);
USI_API usi_status usi_index_save(const usi_index* index, const char* path);
USI_API usi_status usi_index_load(const char* path, usi_index** out);
USI_API void usi_index_free(usi_index* index);

/* *found is 0 when the utility is undefined (no occurrence under min/max). */
USI_API usi_status usi_index_query(const usi_index* index, const char* pattern, size_t length,
                                   double* value, int* found, int* hit);
USI_API usi_status usi_index_set_trust(usi_index* index, int trust);

typedef struct usi_index_info {
  uint64_t n;
  uint64_t k;
  uint64_t tau_k;
  uint64_t l_k;
  uint64_t s;
  uint64_t seed;
  uint64_t table_entries;
  uint64_t size_bytes;      /* text, suffix array, lcp, PSW and H */
  uint64_t base_size_bytes; /* the same without H */
  char miner[8];
  char utility[24];
} usi_index_info;

USI_API usi_status usi_index_info_get(const usi_index* index, usi_index_info* info);

/* Query engines over the text structures of an index: "usi", "bsl1",
 * "bsl2" (LRU cache), "bsl3" (least frequently queried), "bsl4" (count-min).
 * Cache capacity defaults to the index's K when 0. */
USI_API usi_status usi_engine_open(const usi_index* index, const char* name, uint64_t capacity,
                                   usi_engine** out);
USI_API usi_status usi_engine_query(usi_engine* engine, const char* pattern, size_t length,
                                    double* value, int* found);
USI_API uint64_t usi_engine_size_bytes(const usi_engine* engine);
USI_API void usi_engine_free(usi_engine* engine);

USI_API usi_status usi_tuner_open(const usi_index* index, usi_tuner** out);
USI_API usi_status usi_tune_by_k(const usi_tuner* tuner, uint64_t k, uint64_t* tau_k,
                                 uint64_t* l_k);
USI_API usi_status usi_tune_by_tau(const usi_tuner* tuner, uint64_t tau, uint64_t* k_tau,
                                   uint64_t* l_tau);
USI_API void usi_tuner_free(usi_tuner* tuner);

typedef struct usi_mine_params {
  uint64_t k;
  const char* engine; /* "exact" (default), "approx", "shk" or "tktrie" */
  uint64_t s;         /* approx only; 0 selects ceil(log2 n) */
  double oversampling;
  const char* lce;
  uint64_t seed;
} usi_mine_params;

typedef struct usi_mined {
  uint64_t witness;
  uint64_t length;
  uint64_t freq;
} usi_mined;

USI_API void usi_mine_params_init(usi_mine_params* params);
USI_API usi_status usi_mine(const char* text_path, const usi_mine_params* params,
                            usi_mined_list** out);
USI_API usi_status usi_mine_from_memory(const char* text, size_t n, const usi_mine_params* params,
                                        usi_mined_list** out);
USI_API size_t usi_mined_list_size(const usi_mined_list* list);
USI_API usi_status usi_mined_list_get(const usi_mined_list* list, size_t i, usi_mined* out,
                                      const char** substring);
USI_API void usi_mined_list_free(usi_mined_list* list);

typedef struct usi_quality {
  double accuracy_true_freq;
  double accuracy_reported_freq;
  double relative_error;
  double ndcg;
  double exact_seconds;
  double estimate_seconds;
} usi_quality;

/* Mines with params->engine and compares against the exact top-K. */
USI_API usi_status usi_evaluate(const char* text_path, const usi_mine_params* params,
                                usi_quality* out);

typedef struct usi_workload_params {
  uint64_t total;
  double frequent_fraction;
  uint64_t pool_divisor;
  uint64_t length_lo;
  uint64_t length_hi;
  double reuse_fraction;
  uint64_t seed;
} usi_workload_params;

/* W1 defaults: 90% from the top-n/50 substrings, lengths in [1, 5000]. */
USI_API void usi_workload_params_init(usi_workload_params* params);
USI_API usi_status usi_workload_generate(const usi_index* index, const usi_workload_params* params,
                                         const char* out_path);

typedef struct usi_bench_params {
  const char* engines; /* comma separated, default "usi,bsl1,bsl2,bsl3,bsl4" */
  const char* workload_name;
  uint64_t capacity;    /* 0: the index's K */
  uint64_t repetitions; /* default 3; the first run is discarded */
} usi_bench_params;

USI_API void usi_bench_params_init(usi_bench_params* params);
/* Writes the report as CSV (engine,workload,K,s,n,metric,value) into a new
 * string released with usi_string_free. */
USI_API usi_status usi_bench(const usi_index* index, const char* workload_path,
                             const usi_bench_params* params, char** csv);

/* Runs argv (NULL terminated) as a child process and reports its peak
 * resident set size in bytes and its exit code. */
USI_API usi_status usi_measure_peak_rss(const char* const* argv, uint64_t* peak_bytes,
                                        int* exit_code);

/* Deterministic DNA-like text; weights (optional) uniform in [0, 1),
 * written as little-endian binary64 when binary_weights is nonzero and as
 * decimal lines otherwise. */
USI_API usi_status usi_generate_corpus(uint64_t n, uint64_t seed, const char* text_path,
                                       const char* weights_path, int binary_weights);

#ifdef __cplusplus
}
#endif

#endif /* USI_USI_H_ */
