// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bic {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kModulusTol = 1e-3;

double modulus_deviation(const VectorXcd& x) {
  double dev = 0.0;
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    dev = std::max(dev, std::abs(std::abs(x(l)) - 1.0));
  }
  return dev;
}

VectorXcd project_unimodular(const VectorXcd& x) {
  VectorXcd out(x.size());
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    out(l) = x(l) == cxd(0.0, 0.0) ? cxd(1.0, 0.0) : std::polar(1.0, std::arg(x(l)));
  }
  return out;
}

VectorXd initial_gamma(const VectorXcd& x0) {
  VectorXd g(x0.size());
  for (Eigen::Index l = 0; l < x0.size(); ++l) {
    g(l) = x0(l) == cxd(0.0, 0.0) ? 0.0 : std::arg(x0(l));
  }
  return g;
}

VectorXd constraint_vector(const SpectralMask& mask, const VectorXcd& x_prev,
                           SpectralRotation rotation, bool augmented) {
  return rotation == SpectralRotation::SpectrumPhase
             ? spectrum_matched_constraint_vector(mask, x_prev, augmented)
             : linear_constraint_vector(mask, x_prev, augmented);
}
}  // namespace

void SolverParams::validate() const {
  if (lambda && !(*lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (!(zeta_inner > 0.0)) throw InvalidInput("zeta_inner must be positive");
  if (!(zeta_outer > 0.0)) throw InvalidInput("zeta_outer must be positive");
  if (max_inner_iters < 1) throw InvalidInput("max_inner_iters must be >= 1");
  if (max_outer_iters < 1) throw InvalidInput("max_outer_iters must be >= 1");
  if (E_R && *E_R < 0.0) throw InvalidInput("E_R must be nonnegative");
}

InnerResult inner_loop(const LiftedQP& qp, const SpectralMask& mask, const VectorXcd& x0,
                       const SolverParams& params, int outer_index,
                       const std::optional<VectorXd>& gamma0) {
  params.validate();
  const int L = qp.L;
  if (x0.size() != L) throw InvalidInput("x0 length must equal L");
  if (mask.L() != L) throw InvalidInput("mask scenario does not match the lifting dimension");
  const bool augmented = qp.mode == QpMode::Full;
  const double er = params.E_R ? *params.E_R : mask.E_R;
  const double threshold = (1.0 - er / 2.0) * L;

  CpWorkspace ws(qp);

  InnerResult result;
  VectorXcd x = x0;
  VectorXd gamma = gamma0 ? *gamma0 : initial_gamma(x0);
  if (gamma.size() != L) throw InvalidInput("gamma0 length must equal L");
  VectorXd s_prev = state_from_waveform(x, qp.mode);
  double f_prev = qp.cost(s_prev);
  double g_prev = qp.objective(s_prev);

  TraceRow row0;
  row0.outer = outer_index;
  row0.inner = 0;
  row0.cost_g = g_prev;
  row0.cost_f = f_prev;
  row0.fprime = kNaN;
  row0.modulus_dev = modulus_deviation(x);
  row0.spectral_static = spectral_error(mask, x);
  row0.spectral_matched = matched_spectral_error(mask, x);
  row0.linear_slack = kNaN;
  row0.containment_primal = kNaN;
  row0.containment_slack = kNaN;
  row0.kkt_stationarity = kNaN;
  row0.kkt_primal = kNaN;
  row0.kkt_complementarity = kNaN;
  result.trace.push_back(row0);

  for (int n = 1; n <= params.max_inner_iters; ++n) {
    const TangentSet tangents = tangent_update(x, gamma);
    gamma = tangents.gamma;
    const VectorXd s_bar = constraint_vector(mask, x, params.rotation, augmented);

    // feasibility containment of the previous iterate under the new constraints
    const VectorXd Bs_prev = apply_tangents(tangents, qp.mode, s_prev);
    const double containment_primal = (Bs_prev.array() - 1.0).abs().maxCoeff();
    const double containment_slack = s_bar.dot(s_prev) - threshold;

    const KktSolution sol = ws.solve_with_inequality(tangents, s_bar, threshold);
    const KktResiduals res = ws.residuals(tangents, s_bar, threshold, sol);

    x = waveform_from_state(sol.s, L);
    const double f_new = qp.cost(sol.s);
    const double g_new = qp.objective(sol.s);

    TraceRow row;
    row.outer = outer_index;
    row.inner = n;
    row.cost_g = g_new;
    row.cost_f = f_new;
    row.fprime = kNaN;
    row.modulus_dev = modulus_deviation(x);
    row.spectral_static = spectral_error(mask, x);
    row.spectral_matched = matched_spectral_error(mask, x);
    row.linear_slack = res.inequality_slack;
    row.containment_primal = containment_primal;
    row.containment_slack = containment_slack;
    row.kkt_stationarity = res.stationarity;
    row.kkt_primal = res.primal;
    row.kkt_complementarity = res.complementarity;
    row.branch = sol.active ? 1 : 0;
    row.mu = sol.mu;
    row.alpha = sol.active ? sol.alpha : kNaN;
    result.trace.push_back(row);

    // The descent guarantee starts once the previous iterate is itself the
    // solution of a subproblem (n >= 2); the initial point may be infeasible.
    if (n >= 2 && params.abort_on_ascent && g_new > g_prev + 1e-9 * (1.0 + std::abs(g_prev))) {
      std::ostringstream os;
      os << "inner cost ascended at iteration " << n << ": g went from " << g_prev << " to "
         << g_new << " (outer " << outer_index << "); aborting with diagnostics";
      throw NumericalError(os.str());
    }

    result.iterations = n;
    s_prev = sol.s;
    // Stop once the improvement is smaller than the threshold in magnitude
    // (a signed test would also fire on the ascent an infeasible start can
    // cause). The monotone objective g must have stalled as well: the cost
    // f can plateau while the ridge term is still pulling the iterates onto
    // the unit circle, and a g-stall is what certifies the fixed point.
    const bool f_stalled = std::abs(f_prev - f_new) < params.zeta_inner;
    const bool g_stalled = std::abs(g_prev - g_new) < params.zeta_inner;
    g_prev = g_new;
    f_prev = f_new;
    if (f_stalled && g_stalled) {
      result.converged = true;
      break;
    }
  }

  result.x_final = x;
  result.gamma_final = gamma;
  return result;
}

MatrixXd phase_update(const SteeringSet& steering, const VectorXcd& x) {
  const ArrayScenario& sc = steering.scenario;
  const MatrixXcd Y = dft_spectrum(sc, x);
  MatrixXd phases(steering.num_angles(), sc.N);
  // inner products that vanish up to roundoff (relative to the M*N scale)
  // take the zero-phase convention
  const double zero_tol = 1e-12 * sc.L();
  for (int ip = 0; ip < sc.N; ++ip) {
    const VectorXcd v = steering.A[ip] * Y.col(ip);
    for (int k = 0; k < steering.num_angles(); ++k) {
      phases(k, ip) = std::abs(v(k)) <= zero_tol ? 0.0 : std::arg(v(k));
    }
  }
  return phases;
}

namespace {
void finalize_report(SolveReport& report, const SteeringSet& steering,
                     const DesiredBeampattern& desired, const SpectralMask& mask,
                     const VectorXcd& x_raw) {
  report.x_raw = x_raw;
  report.x_star = project_unimodular(x_raw);
  report.final_modulus_dev = modulus_deviation(x_raw);
  report.cost_pre_projection = magnitude_mismatch_cost(steering, desired, x_raw);
  report.cost_post_projection = magnitude_mismatch_cost(steering, desired, report.x_star);
  report.spectral_error_pre = spectral_error(mask, x_raw);
  report.spectral_error_post = spectral_error(mask, report.x_star);
  report.matched_spectral_error_post = matched_spectral_error(mask, report.x_star);
  if (report.final_modulus_dev > kModulusTol) {
    std::ostringstream os;
    os << "converged modulus deviation " << report.final_modulus_dev
       << " exceeds " << kModulusTol << "; consider increasing lambda (used "
       << report.lambda_used << ") or the iteration caps";
    report.warnings.push_back(os.str());
  }
}
}  // namespace

SolveReport solve_beampattern(const ArrayScenario& scenario, const SteeringSet& steering,
                              const DesiredBeampattern& desired, const SpectralMask& mask,
                              const SolverParams& params) {
  scenario.validate();
  params.validate();
  SolveReport report;
  report.seed = params.seed;
  for (const std::string& w : mask.warnings) report.warnings.push_back(w);

  VectorXcd x = random_unimodular(scenario.L(), params.seed);

  // Build the lifting once to size the default ridge; the quadratic block of
  // R depends only on the steering set, so the ridge stays fixed across
  // phase updates.
  MatrixXd phases = phase_update(steering, x);
  LiftedQP qp = assemble_full(steering, desired, phases, 1.0);
  const double lambda = params.lambda ? *params.lambda : default_ridge(qp.R);
  qp.lambda = lambda;
  report.lambda_used = lambda;
  SolverParams inner_params = params;
  inner_params.lambda = lambda;

  double fprime_prev = magnitude_mismatch_cost(steering, desired, x);
  std::optional<VectorXd> gamma_carry;
  for (int m = 1; m <= params.max_outer_iters; ++m) {
    if (m > 1) {
      phases = phase_update(steering, x);
      qp = assemble_full(steering, desired, phases, lambda);
    }
    // carrying the tangent state keeps the previous sweep's final iterate
    // exactly feasible for the first subproblem of this sweep
    InnerResult inner = inner_loop(qp, mask, x, inner_params, m, gamma_carry);
    x = inner.x_final;
    gamma_carry = inner.gamma_final;
    report.inner_converged = inner.converged;
    report.inner_iterations_total += inner.iterations;
    for (TraceRow& row : inner.trace) report.trace.push_back(row);

    const double fprime = magnitude_mismatch_cost(steering, desired, x);
    TraceRow orow;
    orow.outer = m;
    orow.inner = inner.iterations;
    orow.is_outer_row = true;
    orow.cost_g = kNaN;
    orow.cost_f = beampattern_cost(steering, desired, phases, x);
    orow.fprime = fprime;
    orow.modulus_dev = modulus_deviation(x);
    orow.spectral_static = spectral_error(mask, x);
    orow.spectral_matched = matched_spectral_error(mask, x);
    orow.linear_slack = kNaN;
    orow.containment_primal = kNaN;
    orow.containment_slack = kNaN;
    orow.kkt_stationarity = kNaN;
    orow.kkt_primal = kNaN;
    orow.kkt_complementarity = kNaN;
    report.trace.push_back(orow);

    report.outer_iterations = m;
    if (std::abs(fprime_prev - fprime) < params.zeta_outer) {
      report.outer_converged = true;
      break;
    }
    fprime_prev = fprime;
  }

  finalize_report(report, steering, desired, mask, x);
  return report;
}

SolveReport solve_nullform(const ArrayScenario& scenario,
                           const std::vector<double>& null_angles_deg, const SpectralMask& mask,
                           const SolverParams& params) {
  scenario.validate();
  params.validate();
  if (null_angles_deg.empty()) throw InvalidInput("null-forming requires at least one angle");

  const SteeringSet steering = make_steering_set(scenario, null_angles_deg);
  LiftedQP qp = assemble_nullform(steering, 1.0);
  const double lambda = params.lambda ? *params.lambda : default_ridge(qp.R);
  qp.lambda = lambda;

  SolveReport report;
  report.seed = params.seed;
  report.lambda_used = lambda;
  for (const std::string& w : mask.warnings) report.warnings.push_back(w);

  SolverParams inner_params = params;
  inner_params.lambda = lambda;
  const VectorXcd x0 = random_unimodular(scenario.L(), params.seed);
  InnerResult inner = inner_loop(qp, mask, x0, inner_params, 0);
  report.inner_converged = inner.converged;
  report.inner_iterations_total = inner.iterations;
  report.outer_iterations = 0;
  report.outer_converged = inner.converged;
  report.trace = std::move(inner.trace);

  // null-forming cost has no phase term, so f' coincides with s^T R s
  DesiredBeampattern zero;
  zero.d = MatrixXd::Zero(steering.num_angles(), scenario.N);
  finalize_report(report, steering, zero, mask, inner.x_final);

  // achieved suppression, measured on the scenario's evaluation grid
  const SteeringSet eval_grid = make_steering_grid(scenario);
  const MatrixXd P = beampattern(scenario, eval_grid, report.x_star);
  const VectorXd marginal = P.rowwise().sum();
  const double mean_level = marginal.mean();
  for (double angle : null_angles_deg) {
    int k_best = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < eval_grid.num_angles(); ++k) {
      const double dist = std::abs(eval_grid.theta_deg[k] - angle);
      if (dist < best) {
        best = dist;
        k_best = k;
      }
    }
    report.null_depth_db.push_back(10.0 * std::log10(marginal(k_best) / mean_level));
  }
  const MatrixXcd Y = dft_spectrum(scenario, report.x_star);
  const VectorXd prof = Y.cwiseAbs2().colwise().mean();
  double stop_mean = 0.0, pass_mean = 0.0;
  int n_stop = 0, n_pass = 0;
  for (int p = scenario.bin_min(); p <= scenario.bin_max(); ++p) {
    if (mask.is_stop_bin(p)) {
      stop_mean += prof(p + scenario.N / 2);
      ++n_stop;
    } else {
      pass_mean += prof(p + scenario.N / 2);
      ++n_pass;
    }
  }
  report.notch_depth_db = n_stop == 0 ? 0.0
                                      : 10.0 * std::log10((stop_mean / n_stop) /
                                                          (pass_mean / n_pass));
  return report;
}

}  // namespace bic
