// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace bic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_compact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double to_db(double power, double reference) {
  if (!(power > 0.0) || !(reference > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(power / reference));
}

std::string db_str(double db) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", db);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << body;
}

}  // namespace

MatrixXd ScenarioConfig::desired_grid() const {
  MatrixXd d = MatrixXd::Constant(array.K, array.N, desired_default_level);
  for (int k = 0; k < array.K; ++k) {
    const double theta = array.theta_deg(k);
    for (int p = array.bin_min(); p <= array.bin_max(); ++p) {
      const double f = array.bin_frequency(p);
      for (const DesiredBox& box : desired_boxes) {
        if (theta >= box.theta_lo_deg && theta <= box.theta_hi_deg && f >= box.f_lo &&
            f <= box.f_hi) {
          d(k, p + array.N / 2) = box.level;
        }
      }
    }
  }
  return d;
}

void ScenarioConfig::validate() const {
  std::vector<std::string> errors;
  try {
    array.validate();
  } catch (const InvalidInput& e) {
    errors.push_back(e.what());
  }
  const double f_lo_lim = array.f_c - array.B / 2.0;
  const double f_hi_lim = array.f_c + array.B / 2.0;

  if (mode == ScenarioMode::Nullform) {
    if (null_angles_deg.empty()) errors.push_back("nullform mode requires null_angles_deg");
    for (double a : null_angles_deg) {
      if (a < 0.0 || a > 180.0) {
        errors.push_back("null angle " + fmt(a) + " deg outside [0, 180]");
      }
    }
  }
  for (size_t i = 0; i < desired_boxes.size(); ++i) {
    const DesiredBox& b = desired_boxes[i];
    std::string tag = "desired box #" + std::to_string(i + 1);
    if (b.theta_lo_deg > b.theta_hi_deg) errors.push_back(tag + ": theta_lo > theta_hi");
    if (b.theta_lo_deg < 0.0 || b.theta_hi_deg > 180.0) {
      errors.push_back(tag + ": angles outside [0, 180] deg");
    }
    if (b.f_lo > b.f_hi) errors.push_back(tag + ": f_lo > f_hi");
    if (b.f_lo < f_lo_lim || b.f_hi > f_hi_lim) {
      errors.push_back(tag + ": frequencies outside [f_c - B/2, f_c + B/2]");
    }
    if (b.level < 0.0) errors.push_back(tag + ": level must be >= 0");
  }
  if (desired_default_level < 0.0) errors.push_back("desired default level must be >= 0");

  for (size_t i = 0; i < protected_bands.size(); ++i) {
    const Band& b = protected_bands[i];
    std::string tag = "protected band #" + std::to_string(i + 1) + " [" + fmt(b.f_lo) + ", " +
                      fmt(b.f_hi) + "] Hz";
    if (b.f_lo > b.f_hi) errors.push_back(tag + ": f_lo > f_hi");
    if (b.f_lo < f_lo_lim || b.f_hi > f_hi_lim) {
      errors.push_back(tag + ": outside [f_c - B/2, f_c + B/2]");
    }
    if (b.level < 0.0) errors.push_back(tag + ": level must be >= 0");
  }
  if (er_values.empty()) errors.push_back("at least one E_R value is required");
  for (double er : er_values) {
    if (er < 0.0) errors.push_back("E_R = " + fmt(er) + " is negative");
  }
  try {
    solver.validate();
  } catch (const InvalidInput& e) {
    errors.push_back(e.what());
  }
  if (output_dir.empty() && export_enabled) errors.push_back("output_dir must not be empty");

  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid scenario config (" << errors.size() << " problem"
       << (errors.size() > 1 ? "s" : "") << "):";
    for (const std::string& e : errors) os << "\n  - " << e;
    throw ConfigError(os.str());
  }
}

namespace {

double require_number(const json& j, const std::string& key, std::vector<std::string>& errors) {
  if (!j.contains(key) || !j[key].is_number()) {
    errors.push_back("missing or non-numeric field: " + key);
    return 0.0;
  }
  return j[key].get<double>();
}

ScenarioConfig config_from_json(const json& j) {
  std::vector<std::string> errors;
  ScenarioConfig cfg;

  if (j.contains("format_version") && j["format_version"].is_number_integer()) {
    if (j["format_version"].get<int>() != kConfigFormatVersion) {
      errors.push_back("unsupported format_version (expected " +
                       std::to_string(kConfigFormatVersion) + ")");
    }
  }

  const std::string mode = j.value("mode", "");
  if (mode == "nullform") {
    cfg.mode = ScenarioMode::Nullform;
  } else if (mode == "beampattern") {
    cfg.mode = ScenarioMode::Beampattern;
  } else {
    errors.push_back("mode must be \"nullform\" or \"beampattern\"");
  }

  if (!j.contains("array") || !j["array"].is_object()) {
    errors.push_back("missing array block");
  } else {
    const json& a = j["array"];
    cfg.array.M = static_cast<int>(require_number(a, "M", errors));
    cfg.array.N = static_cast<int>(require_number(a, "N", errors));
    cfg.array.f_c = require_number(a, "f_c_hz", errors);
    cfg.array.B = require_number(a, "B_hz", errors);
    cfg.array.K = static_cast<int>(require_number(a, "K", errors));
    cfg.array.c = a.value("c_mps", 299792458.0);
    if (a.contains("d_meters")) {
      cfg.array.d = a["d_meters"].get<double>();
    } else if (a.contains("d_over_half_wavelength") && cfg.array.f_c > 0.0) {
      cfg.array.d =
          a["d_over_half_wavelength"].get<double>() * cfg.array.c / (2.0 * cfg.array.f_c);
    } else {
      errors.push_back("array needs d_meters or d_over_half_wavelength");
    }
  }

  if (j.contains("null_angles_deg")) {
    for (const json& v : j["null_angles_deg"]) cfg.null_angles_deg.push_back(v.get<double>());
  }
  if (j.contains("desired") && j["desired"].is_object()) {
    const json& d = j["desired"];
    cfg.desired_default_level = d.value("default_level", 0.0);
    if (d.contains("boxes")) {
      for (const json& b : d["boxes"]) {
        DesiredBox box;
        box.theta_lo_deg = b.value("theta_lo_deg", 0.0);
        box.theta_hi_deg = b.value("theta_hi_deg", 0.0);
        box.f_lo = b.value("f_lo_hz", 0.0);
        box.f_hi = b.value("f_hi_hz", 0.0);
        box.level = b.value("level", 1.0);
        cfg.desired_boxes.push_back(box);
      }
    }
  }
  if (!j.contains("spectral") || !j["spectral"].is_object()) {
    errors.push_back("missing spectral block");
  } else {
    const json& s = j["spectral"];
    if (s.contains("protected_bands")) {
      for (const json& b : s["protected_bands"]) {
        Band band;
        band.f_lo = b.value("f_lo_hz", 0.0);
        band.f_hi = b.value("f_hi_hz", 0.0);
        band.level = b.value("level", 0.0);
        cfg.protected_bands.push_back(band);
      }
    }
    if (s.contains("E_R")) {
      if (s["E_R"].is_array()) {
        for (const json& v : s["E_R"]) cfg.er_values.push_back(v.get<double>());
      } else if (s["E_R"].is_number()) {
        cfg.er_values.push_back(s["E_R"].get<double>());
      } else {
        errors.push_back("spectral.E_R must be a number or an array of numbers");
      }
    } else {
      errors.push_back("spectral.E_R is required");
    }
  }
  if (j.contains("solver") && j["solver"].is_object()) {
    const json& s = j["solver"];
    if (s.contains("lambda") && !s["lambda"].is_null()) {
      cfg.solver.lambda = s["lambda"].get<double>();
    }
    cfg.solver.zeta_inner = s.value("zeta_inner", 1e-5);
    cfg.solver.zeta_outer = s.value("zeta_outer", 1e-5);
    cfg.solver.max_inner_iters = s.value("max_inner_iters", 500);
    cfg.solver.max_outer_iters = s.value("max_outer_iters", 100);
    cfg.solver.seed = s.value("seed", 1ULL);
    const std::string rot = s.value("rotation", "spectrum_phase");
    if (rot == "spectrum_phase") {
      cfg.solver.rotation = SpectralRotation::SpectrumPhase;
    } else if (rot == "template_phase") {
      cfg.solver.rotation = SpectralRotation::TemplatePhase;
    } else {
      errors.push_back("solver.rotation must be \"spectrum_phase\" or \"template_phase\"");
    }
  }
  cfg.output_dir = j.value("output_dir", "bic_out");

  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid scenario config (" << errors.size() << " problem"
       << (errors.size() > 1 ? "s" : "") << "):";
    for (const std::string& e : errors) os << "\n  - " << e;
    throw ConfigError(os.str());
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["format_version"] = kConfigFormatVersion;
  j["mode"] = cfg.mode == ScenarioMode::Nullform ? "nullform" : "beampattern";
  j["array"] = {{"M", cfg.array.M},       {"N", cfg.array.N}, {"d_meters", cfg.array.d},
                {"f_c_hz", cfg.array.f_c}, {"B_hz", cfg.array.B}, {"K", cfg.array.K},
                {"c_mps", cfg.array.c}};
  if (!cfg.null_angles_deg.empty()) j["null_angles_deg"] = cfg.null_angles_deg;
  json boxes = json::array();
  for (const DesiredBox& b : cfg.desired_boxes) {
    boxes.push_back({{"theta_lo_deg", b.theta_lo_deg},
                     {"theta_hi_deg", b.theta_hi_deg},
                     {"f_lo_hz", b.f_lo},
                     {"f_hi_hz", b.f_hi},
                     {"level", b.level}});
  }
  j["desired"] = {{"default_level", cfg.desired_default_level}, {"boxes", boxes}};
  json bands = json::array();
  for (const Band& b : cfg.protected_bands) {
    bands.push_back({{"f_lo_hz", b.f_lo}, {"f_hi_hz", b.f_hi}, {"level", b.level}});
  }
  j["spectral"] = {{"protected_bands", bands},
                   {"E_R", cfg.er_values.size() == 1 ? json(cfg.er_values[0]) : json(cfg.er_values)}};
  json solver;
  if (cfg.solver.lambda) {
    solver["lambda"] = *cfg.solver.lambda;
  } else {
    solver["lambda"] = nullptr;
  }
  solver["zeta_inner"] = cfg.solver.zeta_inner;
  solver["zeta_outer"] = cfg.solver.zeta_outer;
  solver["max_inner_iters"] = cfg.solver.max_inner_iters;
  solver["max_outer_iters"] = cfg.solver.max_outer_iters;
  solver["seed"] = cfg.solver.seed;
  solver["rotation"] = cfg.solver.rotation == SpectralRotation::SpectrumPhase
                           ? "spectrum_phase"
                           : "template_phase";
  j["solver"] = solver;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

void export_beampattern(const std::string& dir, const ArrayScenario& sc,
                        const SteeringSet& eval_grid, const VectorXcd& x) {
  const MatrixXd P = beampattern(sc, eval_grid, x);
  const double peak = P.maxCoeff();

  std::ostringstream grid;
  grid << "theta_deg,freq_hz,power_db\n";
  for (int k = 0; k < eval_grid.num_angles(); ++k) {
    for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
      grid << fmt(eval_grid.theta_deg[k]) << ',' << fmt(sc.bin_frequency(p)) << ','
           << db_str(to_db(P(k, p + sc.N / 2), peak)) << '\n';
    }
  }
  write_text(dir + "/beampattern.csv", grid.str());

  const VectorXd marginal = P.rowwise().sum();
  const double mpeak = marginal.maxCoeff();
  std::ostringstream ang;
  ang << "theta_deg,power_db\n";
  for (int k = 0; k < eval_grid.num_angles(); ++k) {
    ang << fmt(eval_grid.theta_deg[k]) << ',' << db_str(to_db(marginal(k), mpeak)) << '\n';
  }
  write_text(dir + "/beampattern_angle.csv", ang.str());
}

void export_spectrum(const std::string& dir, const ArrayScenario& sc, const VectorXcd& x) {
  const MatrixXcd Y = dft_spectrum(sc, x);
  const MatrixXd Pw = Y.cwiseAbs2();
  const VectorXd mean = Pw.colwise().mean();
  const double ref = mean.maxCoeff();

  std::ostringstream os;
  os << "freq_hz,antenna,power,power_db\n";
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    const int ip = p + sc.N / 2;
    os << fmt(sc.bin_frequency(p)) << ",-1," << fmt(mean(ip)) << ','
       << db_str(to_db(mean(ip), ref)) << '\n';
  }
  for (int m = 0; m < sc.M; ++m) {
    for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
      const int ip = p + sc.N / 2;
      os << fmt(sc.bin_frequency(p)) << ',' << m << ',' << fmt(Pw(m, ip)) << ','
         << db_str(to_db(Pw(m, ip), ref)) << '\n';
    }
  }
  write_text(dir + "/spectrum.csv", os.str());
}

void export_waveform(const std::string& dir, const ArrayScenario& sc, const VectorXcd& x) {
  std::ostringstream os;
  os << "antenna,sample,re,im\n";
  for (int m = 0; m < sc.M; ++m) {
    for (int n = 0; n < sc.N; ++n) {
      const cxd v = x(m * sc.N + n);
      os << m << ',' << n << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
    }
  }
  write_text(dir + "/waveform.csv", os.str());
}

void export_trace(const std::string& dir, const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "outer,inner,level,cost_g,cost_f,fprime,modulus_dev,spectral_error,"
        "matched_spectral_error,linear_slack,containment_primal,containment_slack,"
        "kkt_stationarity,kkt_primal,kkt_complementarity,branch,mu,alpha\n";
  for (const TraceRow& r : trace) {
    os << r.outer << ',' << r.inner << ',' << (r.is_outer_row ? "outer" : "inner") << ','
       << fmt(r.cost_g) << ',' << fmt(r.cost_f) << ',' << fmt(r.fprime) << ','
       << fmt(r.modulus_dev) << ',' << fmt(r.spectral_static) << ',' << fmt(r.spectral_matched)
       << ',' << fmt(r.linear_slack) << ',' << fmt(r.containment_primal) << ','
       << fmt(r.containment_slack) << ',' << fmt(r.kkt_stationarity) << ',' << fmt(r.kkt_primal)
       << ',' << fmt(r.kkt_complementarity) << ','
       << (r.branch < 0 ? "na" : (r.branch == 1 ? "active" : "inactive")) << ',' << fmt(r.mu)
       << ',' << fmt(r.alpha) << '\n';
  }
  write_text(dir + "/trace.csv", os.str());
}

void write_manifest(const std::string& dir, const ScenarioConfig& config, double er,
                    const SolveReport& report) {
  json j;
  j["generator"] = std::string("bicwave ") + kVersion;
  j["format_version"] = kConfigFormatVersion;
  j["config"] = json::parse(config_to_json(config));
  j["er"] = er;
  j["seed"] = report.seed;
  j["lambda_used"] = report.lambda_used;
  j["metrics"] = {{"cost_pre_projection", report.cost_pre_projection},
                  {"cost_post_projection", report.cost_post_projection},
                  {"final_modulus_dev", report.final_modulus_dev},
                  {"spectral_error_pre", report.spectral_error_pre},
                  {"spectral_error_post", report.spectral_error_post},
                  {"matched_spectral_error_post", report.matched_spectral_error_post},
                  {"inner_iterations_total", report.inner_iterations_total},
                  {"outer_iterations", report.outer_iterations},
                  {"inner_converged", report.inner_converged},
                  {"outer_converged", report.outer_converged}};
  if (!report.null_depth_db.empty()) {
    j["metrics"]["null_depth_db"] = report.null_depth_db;
    j["metrics"]["notch_depth_db"] = report.notch_depth_db;
  }
  j["warnings"] = report.warnings;
  write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

namespace {

SolveReport execute_subrun(const ScenarioConfig& config, double er) {
  SolverParams params = config.solver;
  params.E_R = er;
  const SpectralMask mask = build_mask(config.array, config.protected_bands, er);
  if (config.mode == ScenarioMode::Nullform) {
    return solve_nullform(config.array, config.null_angles_deg, mask, params);
  }
  const SteeringSet steering = make_steering_grid(config.array);
  DesiredBeampattern desired;
  desired.d = config.desired_grid();
  return solve_beampattern(config.array, steering, desired, mask, params);
}

std::string er_dir_name(double er) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "er_%g", er);
  return buf;
}

}  // namespace

RunResult run(const ScenarioConfig& config) {
  config.validate();
  RunResult result;
  result.subruns.resize(config.er_values.size());

  std::vector<double> ers = config.er_values;
  std::sort(ers.begin(), ers.end());

  const bool sweep = ers.size() > 1;
  if (config.export_enabled) fs::create_directories(config.output_dir);

  auto worker = [&](size_t i) {
    SubRunResult& sub = result.subruns[i];
    sub.er = ers[i];
    try {
      sub.report = execute_subrun(config, ers[i]);
      if (config.export_enabled) {
        const std::string dir =
            sweep ? config.output_dir + "/" + er_dir_name(ers[i]) : config.output_dir;
        fs::create_directories(dir);
        sub.out_dir = dir;
        const SteeringSet eval_grid = make_steering_grid(config.array);
        export_beampattern(dir, config.array, eval_grid, sub.report.x_star);
        export_spectrum(dir, config.array, sub.report.x_star);
        export_waveform(dir, config.array, sub.report.x_star);
        export_trace(dir, sub.report.trace);
        write_manifest(dir, config, ers[i], sub.report);
      }
    } catch (const std::exception& e) {
      sub.error = e.what();
    }
  };

  if (sweep) {
    std::vector<std::thread> threads;
    threads.reserve(ers.size());
    for (size_t i = 0; i < ers.size(); ++i) threads.emplace_back(worker, i);
    for (std::thread& t : threads) t.join();
  } else {
    worker(0);
  }

  if (config.export_enabled) {
    std::ostringstream os;
    os << "er,cost,cost_db,modulus_dev,spectral_error,matched_spectral_error,"
          "inner_iterations,outer_iterations,converged,error\n";
    for (const SubRunResult& sub : result.subruns) {
      if (sub.error.empty()) {
        const double cost = sub.report.cost_post_projection;
        const double cost_db = cost > 0.0 ? 10.0 * std::log10(cost) : kDbFloor;
        const bool conv = config.mode == ScenarioMode::Nullform ? sub.report.inner_converged
                                                                : sub.report.outer_converged;
        os << fmt_compact(sub.er) << ',' << fmt(cost) << ',' << db_str(cost_db) << ','
           << fmt(sub.report.final_modulus_dev) << ',' << fmt(sub.report.spectral_error_post)
           << ',' << fmt(sub.report.matched_spectral_error_post) << ','
           << sub.report.inner_iterations_total << ',' << sub.report.outer_iterations << ','
           << (conv ? 1 : 0) << ",\n";
      } else {
        std::string msg = sub.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        os << fmt_compact(sub.er) << ",,,,,,,,," << msg << '\n';
      }
    }
    result.summary_path = config.output_dir + "/summary.csv";
    write_text(result.summary_path, os.str());
  }
  return result;
}

}  // namespace bic
