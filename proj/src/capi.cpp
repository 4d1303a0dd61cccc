// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "bic/bic.h"

#include <cmath>
#include <cstring>
#include <string>

#include "scenario.hpp"

struct bic_config {
  bic::ScenarioConfig cfg;
};

struct bic_result {
  bic::RunResult result;
  bic::ScenarioMode mode;
};

namespace {

thread_local std::string g_last_error;

bic_status fail(bic_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
bic_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const bic::ConfigError& e) {
    return fail(BIC_ERR_VALIDATION, e.what());
  } catch (const bic::InvalidInput& e) {
    return fail(BIC_ERR_INVALID_ARG, e.what());
  } catch (const bic::InfeasibleError& e) {
    return fail(BIC_ERR_INFEASIBLE, e.what());
  } catch (const bic::NumericalError& e) {
    return fail(BIC_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BIC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BIC_ERR_INTERNAL, e.what());
  }
}

bic_status check_subrun(const bic_result* result, size_t index) {
  if (result == nullptr) return fail(BIC_ERR_INVALID_ARG, "result handle is null");
  if (index >= result->result.subruns.size()) {
    return fail(BIC_ERR_INVALID_ARG, "sub-run index out of range");
  }
  return BIC_OK;
}

}  // namespace

extern "C" {

const char* bic_version(void) { return bic::kVersion; }

const char* bic_last_error(void) { return g_last_error.c_str(); }

bic_status bic_config_load(const char* path, bic_config** out) {
  if (path == nullptr || out == nullptr) return fail(BIC_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    try {
      auto cfg = new bic_config{bic::load_config(path)};
      *out = cfg;
      return BIC_OK;
    } catch (const bic::ConfigError& e) {
      const std::string what = e.what();
      if (what.find("cannot open") != std::string::npos) return fail(BIC_ERR_IO, what);
      if (what.find("parse error") != std::string::npos) return fail(BIC_ERR_PARSE, what);
      return fail(BIC_ERR_VALIDATION, what);
    }
  });
}

bic_status bic_config_parse(const char* json_text, bic_config** out) {
  if (json_text == nullptr || out == nullptr) return fail(BIC_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    try {
      auto cfg = new bic_config{bic::parse_config(json_text)};
      *out = cfg;
      return BIC_OK;
    } catch (const bic::ConfigError& e) {
      const std::string what = e.what();
      if (what.find("parse error") != std::string::npos) return fail(BIC_ERR_PARSE, what);
      return fail(BIC_ERR_VALIDATION, what);
    }
  });
}

void bic_config_free(bic_config* config) { delete config; }

bic_status bic_config_validate(const bic_config* config) {
  if (config == nullptr) return fail(BIC_ERR_INVALID_ARG, "config handle is null");
  return guarded([&]() {
    config->cfg.validate();
    return BIC_OK;
  });
}

bic_status bic_config_set_seed(bic_config* config, unsigned long long seed) {
  if (config == nullptr) return fail(BIC_ERR_INVALID_ARG, "config handle is null");
  config->cfg.solver.seed = seed;
  return BIC_OK;
}

bic_status bic_config_set_output_dir(bic_config* config, const char* dir) {
  if (config == nullptr || dir == nullptr) return fail(BIC_ERR_INVALID_ARG, "null argument");
  config->cfg.output_dir = dir;
  return BIC_OK;
}

bic_status bic_config_set_max_iterations(bic_config* config, int inner, int outer) {
  if (config == nullptr) return fail(BIC_ERR_INVALID_ARG, "config handle is null");
  if (inner < 0 || outer < 0) return fail(BIC_ERR_INVALID_ARG, "iteration caps must be positive");
  if (inner > 0) config->cfg.solver.max_inner_iters = inner;
  if (outer > 0) config->cfg.solver.max_outer_iters = outer;
  return BIC_OK;
}

bic_status bic_config_set_er_values(bic_config* config, const double* values, size_t count) {
  if (config == nullptr || values == nullptr || count == 0) {
    return fail(BIC_ERR_INVALID_ARG, "null argument or empty E_R list");
  }
  config->cfg.er_values.assign(values, values + count);
  return BIC_OK;
}

bic_status bic_config_set_export_enabled(bic_config* config, int enabled) {
  if (config == nullptr) return fail(BIC_ERR_INVALID_ARG, "config handle is null");
  config->cfg.export_enabled = enabled != 0;
  return BIC_OK;
}

bic_status bic_run(const bic_config* config, bic_result** out) {
  if (config == nullptr || out == nullptr) return fail(BIC_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto res = new bic_result{bic::run(config->cfg), config->cfg.mode};
    *out = res;
    return BIC_OK;
  });
}

void bic_result_free(bic_result* result) { delete result; }

size_t bic_result_subrun_count(const bic_result* result) {
  return result == nullptr ? 0 : result->result.subruns.size();
}

bic_status bic_result_metrics(const bic_result* result, size_t index, bic_run_metrics* out) {
  const bic_status st = check_subrun(result, index);
  if (st != BIC_OK) return st;
  if (out == nullptr) return fail(BIC_ERR_INVALID_ARG, "metrics output pointer is null");
  const bic::SubRunResult& sub = result->result.subruns[index];
  std::memset(out, 0, sizeof(*out));
  out->er = sub.er;
  out->failed = sub.error.empty() ? 0 : 1;
  if (out->failed) return BIC_OK;
  const bic::SolveReport& r = sub.report;
  out->cost = r.cost_post_projection;
  out->cost_db = r.cost_post_projection > 0.0 ? 10.0 * std::log10(r.cost_post_projection)
                                              : bic::kDbFloor;
  out->modulus_deviation = r.final_modulus_dev;
  out->spectral_error = r.spectral_error_post;
  out->matched_spectral_error = r.matched_spectral_error_post;
  out->inner_iterations = r.inner_iterations_total;
  out->outer_iterations = r.outer_iterations;
  out->converged = result->mode == bic::ScenarioMode::Nullform ? (r.inner_converged ? 1 : 0)
                                                               : (r.outer_converged ? 1 : 0);
  return BIC_OK;
}

bic_status bic_result_error(const bic_result* result, size_t index, const char** out) {
  const bic_status st = check_subrun(result, index);
  if (st != BIC_OK) return st;
  if (out == nullptr) return fail(BIC_ERR_INVALID_ARG, "output pointer is null");
  *out = result->result.subruns[index].error.c_str();
  return BIC_OK;
}

bic_status bic_result_output_dir(const bic_result* result, size_t index, const char** out) {
  const bic_status st = check_subrun(result, index);
  if (st != BIC_OK) return st;
  if (out == nullptr) return fail(BIC_ERR_INVALID_ARG, "output pointer is null");
  *out = result->result.subruns[index].out_dir.c_str();
  return BIC_OK;
}

bic_status bic_result_waveform_length(const bic_result* result, size_t index, size_t* out) {
  const bic_status st = check_subrun(result, index);
  if (st != BIC_OK) return st;
  if (out == nullptr) return fail(BIC_ERR_INVALID_ARG, "output pointer is null");
  *out = static_cast<size_t>(result->result.subruns[index].report.x_star.size());
  return BIC_OK;
}

bic_status bic_result_waveform(const bic_result* result, size_t index, double* re, double* im,
                               size_t cap) {
  const bic_status st = check_subrun(result, index);
  if (st != BIC_OK) return st;
  if (re == nullptr || im == nullptr) return fail(BIC_ERR_INVALID_ARG, "output buffer is null");
  const bic::VectorXcd& x = result->result.subruns[index].report.x_star;
  if (cap < static_cast<size_t>(x.size())) {
    return fail(BIC_ERR_INVALID_ARG, "waveform buffer too small");
  }
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    re[l] = x(l).real();
    im[l] = x(l).imag();
  }
  return BIC_OK;
}

}  // extern "C"
