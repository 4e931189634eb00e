/* C interface to the hcrp library.  Every function returns a status code;
 * on failure hcrp_last_error() describes the problem (per thread).  Handles
 * are opaque and owned by the caller, who releases them with the matching
 * destroy function. */
#ifndef HCRP_H
#define HCRP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define HCRP_API __attribute__((visibility("default")))
#else
#define HCRP_API
#endif

typedef enum hcrp_status {
  HCRP_OK = 0,
  HCRP_INVALID_ARGUMENT = 1,
  HCRP_REMOVE_FROM_EMPTY = 2,
  HCRP_PROPOSAL_OUTSIDE_RESTRICTION = 3,
  HCRP_ZERO_LIKELIHOOD_BLOCK = 4,
  HCRP_LENGTH_MISMATCH = 5,
  HCRP_ZERO_VARIANCE = 6,
  HCRP_ZERO_LIKELIHOOD = 7,
  HCRP_EMPTY_CORPUS = 8,
  HCRP_ALL_ZERO_WEIGHTS = 9,
  HCRP_PARSE = 10,
  HCRP_IO = 11,
  HCRP_AUDIT_FAILURE = 12,
  HCRP_OUT_OF_MEMORY = 100,
  HCRP_INTERNAL = 101
} hcrp_status;

/* Label of a dish never served before. */
#define HCRP_NEW_DISH UINT32_MAX

HCRP_API const char* hcrp_last_error(void);
HCRP_API const char* hcrp_status_name(hcrp_status status);
HCRP_API void hcrp_free_string(char* s);

/* random numbers */
typedef struct hcrp_rng hcrp_rng;
HCRP_API hcrp_status hcrp_rng_create(uint64_t seed, uint64_t stream, hcrp_rng** out);
HCRP_API void hcrp_rng_destroy(hcrp_rng* rng);
HCRP_API hcrp_status hcrp_rng_uniform(hcrp_rng* rng, double* out);

/* Chinese restaurant franchise; base_size 0 is a non-atomic base */
typedef struct hcrp_franchise hcrp_franchise;
HCRP_API hcrp_status hcrp_franchise_create(double alpha, double gamma, size_t base_size, hcrp_franchise** out);
HCRP_API void hcrp_franchise_destroy(hcrp_franchise* f);
HCRP_API hcrp_status hcrp_franchise_add_customer(hcrp_franchise* f, uint32_t restaurant, uint32_t dish, hcrp_rng* rng,
                                                 double* log_table_prob);
HCRP_API hcrp_status hcrp_franchise_remove_customer(hcrp_franchise* f, uint32_t restaurant, uint32_t dish,
                                                    hcrp_rng* rng);
HCRP_API hcrp_status hcrp_franchise_prob(const hcrp_franchise* f, uint32_t restaurant, uint32_t dish, double* out);
HCRP_API hcrp_status hcrp_franchise_dish_count(const hcrp_franchise* f, int* out);
HCRP_API hcrp_status hcrp_franchise_seating_log_prob(const hcrp_franchise* f, double* out);
HCRP_API hcrp_status hcrp_franchise_audit(const hcrp_franchise* f);

/* HCRP hidden Markov model over observations 0..alphabet-1, initialized by a
 * particle filter with `particles` particles */
typedef struct hcrp_hmm hcrp_hmm;
HCRP_API hcrp_status hcrp_hmm_create(const uint32_t* y, size_t length, size_t alphabet, size_t particles,
                                     hcrp_rng* rng, hcrp_hmm** out);
HCRP_API void hcrp_hmm_destroy(hcrp_hmm* h);
/* sampler: "sgibbs", "sslice", "bgibbs" or "beam", optionally "+SM<n>" */
HCRP_API hcrp_status hcrp_hmm_sweep(hcrp_hmm* h, const char* sampler, size_t block_size, hcrp_rng* rng,
                                    long* accepts, long* trials);
HCRP_API hcrp_status hcrp_hmm_num_states(const hcrp_hmm* h, int* out);
/* writes the hidden states of positions 1..length */
HCRP_API hcrp_status hcrp_hmm_states(const hcrp_hmm* h, uint32_t* out, size_t length);
HCRP_API hcrp_status hcrp_hmm_joint_log_prob(const hcrp_hmm* h, double* out);

/* diagnostics */
HCRP_API hcrp_status hcrp_mutual_information(const uint32_t* x, const uint32_t* h, size_t n, double* out);
HCRP_API hcrp_status hcrp_entropy(const uint32_t* h, size_t n, double* out);
HCRP_API hcrp_status hcrp_autocorrelation_time(const double* series, size_t n, size_t max_lag, double* out);
HCRP_API hcrp_status hcrp_perplexity(const double* likelihoods, size_t n, double* out);

/* data */
HCRP_API hcrp_status hcrp_generate_sequence1(size_t length, uint32_t* y, uint32_t* h);
/* reads a text file and writes a corpus file; counts may be NULL */
HCRP_API hcrp_status hcrp_ingest(const char* text_path, size_t test_tail, size_t max_tokens, const char* out_path,
                                 size_t* train_tokens, size_t* test_tokens, size_t* vocab_size);

/* experiments; seed and out_path may be NULL to keep the config's values */
HCRP_API hcrp_status hcrp_run_experiment(const char* config_path, const uint64_t* seed, const char* out_path);
/* summary table (or #states histogram) of run-record files; free the result
 * with hcrp_free_string */
HCRP_API hcrp_status hcrp_summarize_csv(const char* const* paths, size_t count, int histogram, char** out);

#ifdef __cplusplus
}
#endif

#endif
