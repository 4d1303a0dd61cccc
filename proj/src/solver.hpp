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

#include "qp_engine.hpp"
#include "spectral_mask.hpp"

namespace bic {

/// Which phases the spectral constraint vector borrows from the previous
/// iterate. SpectrumPhase rotates the desired spectrum per frequency bin
/// (constrains the spectrum magnitude profile toward the mask shape) and is
/// the default. TemplatePhase rotates the time-domain template per element.
enum class SpectralRotation { SpectrumPhase, TemplatePhase };

struct SolverParams {
  std::optional<double> lambda;  ///< ridge; default 10*trace(R)/D
  double zeta_inner = 1e-5;      ///< stop when the cost decrease falls below this
  double zeta_outer = 1e-5;
  int max_inner_iters = 500;
  int max_outer_iters = 100;
  std::optional<double> E_R;     ///< overrides the mask's E_R when set
  unsigned long long seed = 1;
  SpectralRotation rotation = SpectralRotation::SpectrumPhase;
  bool abort_on_ascent = true;   ///< abort with diagnostics if the inner cost rises

  void validate() const;
};

/// One row of the per-iteration diagnostics; doubles not applicable to a row
/// hold NaN. The export schema mirrors these fields.
struct TraceRow {
  int outer = 0;
  int inner = 0;
  bool is_outer_row = false;
  double cost_g = 0.0;              ///< s^T (R + lambda I) s
  double cost_f = 0.0;              ///< s^T R s
  double fprime = 0.0;              ///< phase-free cost (outer rows)
  double modulus_dev = 0.0;         ///< max | |x_l| - 1 |
  double spectral_static = 0.0;     ///< ||template - x||^2
  double spectral_matched = 0.0;    ///< phase-matched spectral error
  double linear_slack = 0.0;        ///< s_bar^(n)T s^(n) - threshold
  double containment_primal = 0.0;  ///< ||B^(n) s^(n-1) - 1||_inf
  double containment_slack = 0.0;   ///< s_bar^(n)T s^(n-1) - threshold
  double kkt_stationarity = 0.0;
  double kkt_primal = 0.0;
  double kkt_complementarity = 0.0;
  int branch = -1;                  ///< 1 active, 0 inactive, -1 n/a
  double mu = 0.0;
  double alpha = 0.0;
};

struct SolveReport {
  VectorXcd x_star;                 ///< output waveform, |x_l| = 1 exactly
  VectorXcd x_raw;                  ///< final iterate before projection
  std::vector<TraceRow> trace;
  bool inner_converged = false;     ///< last inner sweep hit its threshold
  bool outer_converged = false;
  int inner_iterations_total = 0;
  int outer_iterations = 0;
  double lambda_used = 0.0;
  unsigned long long seed = 0;
  double cost_pre_projection = 0.0;   ///< f' at x_raw
  double cost_post_projection = 0.0;  ///< f' at x_star
  double final_modulus_dev = 0.0;     ///< of x_raw
  double spectral_error_pre = 0.0;    ///< static template error at x_raw
  double spectral_error_post = 0.0;   ///< static template error at x_star
  double matched_spectral_error_post = 0.0;
  /// Null-forming solves also report the suppression achieved: marginal
  /// beampattern power at each requested null angle relative to the angular
  /// mean, and the stop-bin mean relative to the passband mean (both dB).
  std::vector<double> null_depth_db;
  double notch_depth_db = 0.0;
  std::vector<std::string> warnings;
};

struct InnerResult {
  VectorXcd x_final;
  VectorXd gamma_final;  ///< tangent angles after the last update
  std::vector<TraceRow> trace;
  bool converged = false;
  int iterations = 0;
};

/// One sweep of tangent updates and closed-form KKT solves for a fixed
/// lifting. Stops when the cost improvement between successive iterates
/// falls below zeta_inner in magnitude or the iteration cap is hit.
/// `gamma0` carries the tangent state across warm starts (pass the previous
/// sweep's gamma_final so the feasibility chain continues exactly); by
/// default the tangents start at the phases of x0.
InnerResult inner_loop(const LiftedQP& qp, const SpectralMask& mask, const VectorXcd& x0,
                       const SolverParams& params, int outer_index = 0,
                       const std::optional<VectorXd>& gamma0 = std::nullopt);

/// phi(k, p) = arg(a_kp^H W_p x); zero inner products map to phase 0.
MatrixXd phase_update(const SteeringSet& steering, const VectorXcd& x);

/// Full alternating solve: phase update, lifting refresh, warm-started inner
/// sweeps, until the phase-free cost improvement drops below zeta_outer.
SolveReport solve_beampattern(const ArrayScenario& scenario, const SteeringSet& steering,
                              const DesiredBeampattern& desired, const SpectralMask& mask,
                              const SolverParams& params);

/// Null-forming: a single inner sweep on the 2L-dimensional lifting built
/// from the null directions.
SolveReport solve_nullform(const ArrayScenario& scenario, const std::vector<double>& null_angles_deg,
                           const SpectralMask& mask, const SolverParams& params);

}  // namespace bic
