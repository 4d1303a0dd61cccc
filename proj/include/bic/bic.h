/* SPDX-License-Identifier: Apache-2.0
 *
 * bicwave - spatio-spectral MIMO radar waveform design
 * Copyright (c) 2026 bicwave contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * C API of the bicwave solver library. All functions return a bic_status;
 * on failure bic_last_error() gives a human-readable message for the
 * calling thread. Handles are opaque and freed with their *_free function.
 */

#ifndef BICWAVE_BIC_H
#define BICWAVE_BIC_H

#include <stddef.h>

#if defined(_WIN32)
#define BIC_API __declspec(dllexport)
#else
#define BIC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bic_status {
  BIC_OK = 0,
  BIC_ERR_INVALID_ARG = 1,  /* null pointer, bad index, bad value */
  BIC_ERR_PARSE = 2,        /* config file/string is not valid JSON or schema */
  BIC_ERR_VALIDATION = 3,   /* config parsed but violates scenario invariants */
  BIC_ERR_NUMERICAL = 4,    /* factorization or iteration failure */
  BIC_ERR_INFEASIBLE = 5,   /* degenerate constraint system in a subproblem */
  BIC_ERR_IO = 6,           /* file system failure */
  BIC_ERR_INTERNAL = 7
} bic_status;

typedef struct bic_config bic_config;
typedef struct bic_result bic_result;

/* Per-sub-run scalar results. `converged` is 1 when the configured stopping
 * threshold was reached before the iteration caps. `cost` is the phase-free
 * beampattern mismatch of the output waveform; `cost_db` is 10*log10(cost). */
typedef struct bic_run_metrics {
  double er;
  double cost;
  double cost_db;
  double modulus_deviation;      /* max | |x_l| - 1 | before projection */
  double spectral_error;         /* ||template - x*||^2 */
  double matched_spectral_error; /* phase-matched spectral error of x* */
  int inner_iterations;
  int outer_iterations;
  int converged;
  int failed; /* 1 when this sub-run errored; see bic_result_error */
} bic_run_metrics;

BIC_API const char* bic_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
BIC_API const char* bic_last_error(void);

BIC_API bic_status bic_config_load(const char* path, bic_config** out);
BIC_API bic_status bic_config_parse(const char* json_text, bic_config** out);
BIC_API void bic_config_free(bic_config* config);

/* Re-check all scenario invariants (useful after the setters below). */
BIC_API bic_status bic_config_validate(const bic_config* config);

BIC_API bic_status bic_config_set_seed(bic_config* config, unsigned long long seed);
BIC_API bic_status bic_config_set_output_dir(bic_config* config, const char* dir);
/* Pass 0 to keep a cap unchanged. */
BIC_API bic_status bic_config_set_max_iterations(bic_config* config, int inner, int outer);
BIC_API bic_status bic_config_set_er_values(bic_config* config, const double* values, size_t count);
/* Disable to run without writing any files (library use). */
BIC_API bic_status bic_config_set_export_enabled(bic_config* config, int enabled);

/* Executes the configured solve; one sub-run per E_R value (concurrently for
 * sweeps). Individual sub-run failures are recorded in the result rather
 * than failing the call. */
BIC_API bic_status bic_run(const bic_config* config, bic_result** out);
BIC_API void bic_result_free(bic_result* result);

BIC_API size_t bic_result_subrun_count(const bic_result* result);
BIC_API bic_status bic_result_metrics(const bic_result* result, size_t index,
                                      bic_run_metrics* out);
/* Error message of a failed sub-run ("" when it succeeded). */
BIC_API bic_status bic_result_error(const bic_result* result, size_t index, const char** out);
/* Directory the sub-run exported to ("" when exporting was disabled). */
BIC_API bic_status bic_result_output_dir(const bic_result* result, size_t index, const char** out);

BIC_API bic_status bic_result_waveform_length(const bic_result* result, size_t index, size_t* out);
/* Copies the output waveform x* (unit modulus) into caller buffers of
 * capacity `cap` elements each. */
BIC_API bic_status bic_result_waveform(const bic_result* result, size_t index, double* re,
                                       double* im, size_t cap);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BICWAVE_BIC_H */
