/* C interface to the mixprobe simulator. All functions return an mxp_status;
 * on failure mxp_last_error() describes the problem (thread-local). */
#ifndef MIXPROBE_H
#define MIXPROBE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MIXPROBE_BUILDING_LIBRARY)
#    define MXP_API __declspec(dllexport)
#  else
#    define MXP_API __declspec(dllimport)
#  endif
#else
#  define MXP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mxp_status {
  MXP_OK = 0,
  MXP_ERR_ARGUMENT = 1, /* null pointer, bad buffer, invalid numeric input */
  MXP_ERR_CONFIG = 2,   /* unknown key, malformed value, failed validation */
  MXP_ERR_RUNTIME = 3   /* I/O and simulation failures */
} mxp_status;

typedef struct mxp_config mxp_config;

MXP_API const char* mxp_version(void);
MXP_API const char* mxp_last_error(void);

/* Configuration handle, initialised with defaults. */
MXP_API mxp_status mxp_config_create(mxp_config** out);
MXP_API void mxp_config_destroy(mxp_config* config);
MXP_API mxp_status mxp_config_load_file(mxp_config* config, const char* path);
/* Loads the config recorded in a dataset directory's manifest. */
MXP_API mxp_status mxp_config_load_dataset(mxp_config* config, const char* dataset_dir);
MXP_API mxp_status mxp_config_set(mxp_config* config, const char* key, const char* value);
MXP_API mxp_status mxp_config_validate(const mxp_config* config);
/* 16 hex digits plus terminator; buf_len must be at least 17. */
MXP_API mxp_status mxp_config_hash(const mxp_config* config, char* buf, size_t buf_len);
/* Canonical text form. Writes at most buf_len bytes including the
 * terminator; *needed receives the full size including the terminator. */
MXP_API mxp_status mxp_config_canonical(const mxp_config* config, char* buf, size_t buf_len,
                                        size_t* needed);

MXP_API mxp_status mxp_run_simulate(const mxp_config* config, const char* out_dir);
MXP_API mxp_status mxp_run_gen_dataset(const mxp_config* config, const char* out_dir);
MXP_API mxp_status mxp_run_metrics(const mxp_config* config, const char* dataset_dir,
                                   const char* out_dir);
MXP_API mxp_status mxp_run_sweep(const mxp_config* config, const char* out_dir);

/* Shannon entropy in bits of a normalised distribution. */
MXP_API mxp_status mxp_entropy(const double* probabilities, size_t count, double* out_bits);
/* |ln(p0 / p1)| with both floored at 1e-6. *defined is 0 (and *out untouched)
 * when p0 = p1 = 0. */
MXP_API mxp_status mxp_likelihood_diff(double p0, double p1, double* out, int* defined);

typedef struct mxp_round_summary {
  uint64_t seed;
  uint32_t suspects[2];
  uint32_t recipient;
  int bit;
  int guess;            /* baseline attacker on the full observation */
  size_t deliveries;    /* deliveries to the recipient seen by the attacker */
  size_t messages_from_true_sender;
} mxp_round_summary;

/* Plays one game round with the config's game settings. When tokens is not
 * null it receives min(tokens_len, length) tokens. */
MXP_API mxp_status mxp_play_round(const mxp_config* config, uint64_t seed,
                                  mxp_round_summary* summary, uint32_t* tokens,
                                  size_t tokens_len);

#ifdef __cplusplus
}
#endif

#endif /* MIXPROBE_H */
