// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solver.hpp"

namespace bic {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigFormatVersion = 1;

/// Config parse/validation failure; message lists every violated invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioMode { Nullform, Beampattern };

/// Rectangle of the desired beampattern d(theta, f).
struct DesiredBox {
  double theta_lo_deg = 0.0;
  double theta_hi_deg = 0.0;
  double f_lo = 0.0;  ///< [Hz]
  double f_hi = 0.0;  ///< [Hz]
  double level = 1.0;
};

/// Scenario description as read from a JSON config file. See README for the
/// schema; `format_version` is echoed into every run manifest.
struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::Nullform;
  ArrayScenario array;
  std::vector<double> null_angles_deg;     // nullform
  double desired_default_level = 0.0;      // beampattern
  std::vector<DesiredBox> desired_boxes;   // beampattern
  BandSpec protected_bands;
  std::vector<double> er_values;           // one entry = single run, more = sweep
  SolverParams solver;
  std::string output_dir = "bic_out";
  bool export_enabled = true;

  /// d(k, p) sampled on the scenario grid: boxes applied in order (later
  /// boxes override) over the default level, closed-interval inclusion.
  MatrixXd desired_grid() const;

  void validate() const;  ///< throws ConfigError listing all violations
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);
std::string config_to_json(const ScenarioConfig& config);

struct SubRunResult {
  double er = 0.0;
  std::string out_dir;      // empty when exporting is disabled
  std::string error;        // non-empty if this sub-run failed
  SolveReport report;
};

struct RunResult {
  std::vector<SubRunResult> subruns;  // ordered by er
  std::string summary_path;           // empty when exporting is disabled
};

/// Executes the configured solve (or one sub-run per E_R value, concurrent)
/// and writes the export bundle of each sub-run plus a sweep summary table.
/// Sub-run failures are recorded without aborting the siblings.
RunResult run(const ScenarioConfig& config);

/// Export helpers (also used by the bundle writer). All emit delimited text
/// with a one-line header naming columns and units.
void export_beampattern(const std::string& dir, const ArrayScenario& sc,
                        const SteeringSet& eval_grid, const VectorXcd& x);
void export_spectrum(const std::string& dir, const ArrayScenario& sc, const VectorXcd& x);
void export_waveform(const std::string& dir, const ArrayScenario& sc, const VectorXcd& x);
void export_trace(const std::string& dir, const std::vector<TraceRow>& trace);
void write_manifest(const std::string& dir, const ScenarioConfig& config, double er,
                    const SolveReport& report);

/// dB floor used by all exports.
inline constexpr double kDbFloor = -350.0;

}  // namespace bic
