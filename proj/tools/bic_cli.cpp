// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Command-line front end. Talks to the solver exclusively through the
// shared-library C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bic/bic.h"

namespace {

struct ConfigDeleter {
  void operator()(bic_config* c) const { bic_config_free(c); }
};
struct ResultDeleter {
  void operator()(bic_result* r) const { bic_result_free(r); }
};
using ConfigPtr = std::unique_ptr<bic_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<bic_result, ResultDeleter>;

void print_json_escaped(FILE* f, const std::string& s) {
  for (char c : s) {
    switch (c) {
      case '"': std::fputs("\\\"", f); break;
      case '\\': std::fputs("\\\\", f); break;
      case '\n': std::fputs("\\n", f); break;
      case '\t': std::fputs("\\t", f); break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          std::fprintf(f, "\\u%04x", c);
        } else {
          std::fputc(c, f);
        }
    }
  }
}

// machine-readable error contract: one JSON object on stderr, nonzero exit
int emit_error(bic_status status, const std::string& message) {
  std::fputs("{\"error\":{\"code\":", stderr);
  std::fprintf(stderr, "%d,\"message\":\"", static_cast<int>(status));
  print_json_escaped(stderr, message);
  std::fputs("\"}}\n", stderr);
  return status == BIC_OK ? 1 : static_cast<int>(status);
}

int load_with_overrides(const std::string& path, unsigned long long seed, bool seed_set,
                        const std::string& out_dir, int max_iters, int max_outer,
                        const std::vector<double>& er, ConfigPtr& config) {
  bic_config* raw = nullptr;
  bic_status st = bic_config_load(path.c_str(), &raw);
  if (st != BIC_OK) return emit_error(st, bic_last_error());
  config.reset(raw);
  if (seed_set) bic_config_set_seed(config.get(), seed);
  if (!out_dir.empty()) bic_config_set_output_dir(config.get(), out_dir.c_str());
  if (max_iters > 0 || max_outer > 0) {
    bic_config_set_max_iterations(config.get(), max_iters, max_outer);
  }
  if (!er.empty()) bic_config_set_er_values(config.get(), er.data(), er.size());
  st = bic_config_validate(config.get());
  if (st != BIC_OK) return emit_error(st, bic_last_error());
  return 0;
}

int report_result(const bic_result* result) {
  const size_t n = bic_result_subrun_count(result);
  std::printf("%-10s %-14s %-10s %-14s %-16s %-6s %s\n", "E_R", "cost", "cost_dB",
              "modulus_dev", "spectral_error", "conv", "output");
  bool any_failed = false;
  for (size_t i = 0; i < n; ++i) {
    bic_run_metrics m;
    if (bic_result_metrics(result, i, &m) != BIC_OK) continue;
    if (m.failed) {
      const char* err = "";
      bic_result_error(result, i, &err);
      std::printf("%-10g FAILED: %s\n", m.er, err);
      any_failed = true;
      continue;
    }
    const char* dir = "";
    bic_result_output_dir(result, i, &dir);
    std::printf("%-10g %-14.6g %-10.4f %-14.3e %-16.6g %-6s %s\n", m.er, m.cost, m.cost_db,
                m.modulus_deviation, m.spectral_error, m.converged ? "yes" : "no", dir);
  }
  return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("bicwave ") + bic_version() +
               " - constant-modulus MIMO radar waveform design with spectral notching"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned long long seed = 0;
  bool seed_set = false;
  int max_iters = 0;
  int max_outer = 0;
  std::vector<double> er_list;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "scenario config file (JSON)")->required();
    cmd->add_option("--seed", seed, "override the RNG seed")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--out-dir", out_dir, "override the output directory");
    cmd->add_option("--max-iters", max_iters, "override the inner iteration cap");
    cmd->add_option("--max-outer-iters", max_outer, "override the outer iteration cap");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the configured scenario and export results");
  add_common(solve);

  CLI::App* validate = app.add_subcommand("validate", "load and validate a config, then exit");
  validate->add_option("config", config_path, "scenario config file (JSON)")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run one sub-run per E_R value");
  add_common(sweep);
  sweep->add_option("--er", er_list, "E_R values (overrides the config list)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    bic_config* raw = nullptr;
    const bic_status st = bic_config_load(config_path.c_str(), &raw);
    if (st != BIC_OK) return emit_error(st, bic_last_error());
    bic_config_free(raw);
    std::printf("config is valid: %s\n", config_path.c_str());
    return 0;
  }

  ConfigPtr config;
  const int rc = load_with_overrides(config_path, seed, seed_set, out_dir, max_iters, max_outer,
                                     sweep->parsed() ? er_list : std::vector<double>{}, config);
  if (rc != 0) return rc;

  bic_result* raw_result = nullptr;
  const bic_status st = bic_run(config.get(), &raw_result);
  if (st != BIC_OK) return emit_error(st, bic_last_error());
  ResultPtr result(raw_result);
  return report_result(result.get());
}
