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

#include <Eigen/Cholesky>

#include "signal_model.hpp"
#include "types.hpp"

namespace bic {

/// Desired beampattern magnitudes d(k, p) >= 0 on the angle-frequency grid
/// (column index p + N/2), with optional positive weights summing to 1.
struct DesiredBeampattern {
  MatrixXd d;
  std::optional<MatrixXd> weights;
};

/// Complex quadratic x^H P x - q^H x - x^H q + r equal to
/// sum_p ||d_p - A_p W_p x||^2 with d_p(k) = d(k,p) e^{j phi(k,p)}.
struct QuadraticForm {
  MatrixXcd P;
  VectorXcd q;
  double r = 0.0;
};

enum class QpMode { Full, Nullform };

/// Real symmetric lifting of the quadratic cost. Full mode works on
/// s = [Re x; Im x; 1] (dimension 2L+1); null-forming mode drops the
/// augmentation and works on s = [Re x; Im x] (dimension 2L).
struct LiftedQP {
  MatrixXd R;
  double lambda = 0.0;
  QpMode mode = QpMode::Full;
  int L = 0;

  int D() const { return mode == QpMode::Full ? 2 * L + 1 : 2 * L; }

  /// s^T R s; equals the complex cost at x = s[0:L] + j s[L:2L] when the
  /// trailing coordinate (full mode) is 1.
  double cost(const VectorXd& s) const { return s.dot(R * s); }
  /// s^T (R + lambda I) s, the objective of each subproblem.
  double objective(const VectorXd& s) const { return cost(s) + lambda * s.squaredNorm(); }
};

QuadraticForm assemble_quadratic_form(const SteeringSet& steering, const DesiredBeampattern& desired,
                                      const MatrixXd& phases);

/// Full-mode lifting from (P, q, r); weights are folded in by scaling row k of
/// A_p and entry k of d_p by sqrt(w_kp).
LiftedQP assemble_full(const SteeringSet& steering, const DesiredBeampattern& desired,
                       const MatrixXd& phases, double lambda);

/// Null-forming lifting from V = sum_p W_p^H A_p^H A_p W_p with the steering
/// set restricted to the null directions.
LiftedQP assemble_nullform(const SteeringSet& steering, double lambda);

/// Ridge default: 10 * trace(R)/D, floored at 1 for degenerate all-zero data.
double default_ridge(const MatrixXd& R);

/// Direct evaluation of sum_p ||d_p - A_p W_p x||^2 (weighted).
double beampattern_cost(const SteeringSet& steering, const DesiredBeampattern& desired,
                        const MatrixXd& phases, const VectorXcd& x);

/// Phase-free cost f'(x) = sum_kp w_kp (d_kp - |a_kp^H W_p x|)^2.
double magnitude_mismatch_cost(const SteeringSet& steering, const DesiredBeampattern& desired,
                               const VectorXcd& x);

/// Tangent angles gamma_l defining the constraint rows b_l with
/// b_l(l) = cos(gamma_l), b_l(l + L) = sin(gamma_l); full mode appends the
/// row pinning the trailing coordinate to 1. Rows are orthonormal.
struct TangentSet {
  VectorXd gamma;

  int L() const { return static_cast<int>(gamma.size()); }
  int rows(QpMode mode) const { return mode == QpMode::Full ? L() + 1 : L(); }
};

/// gamma_l^(n) = 2 arg(x_prev(l)) - gamma_prev(l); arg(0) := 0.
TangentSet tangent_update(const VectorXcd& x_prev, const VectorXd& gamma_prev);

/// B v for the implied sparse tangent matrix.
VectorXd apply_tangents(const TangentSet& t, QpMode mode, const VectorXd& v);
/// B^T w.
VectorXd apply_tangents_adjoint(const TangentSet& t, QpMode mode, const VectorXd& w, int D);

struct KktSolution {
  VectorXd s;
  double mu = 0.0;
  double alpha = 0.0;  ///< Schur-complement scalar; meaningful on the active branch
  bool active = false;
};

struct KktResiduals {
  double stationarity = 0.0;   ///< inf-norm of Rbar s + B^T v - mu s_bar
  double primal = 0.0;         ///< inf-norm of B s - 1
  double inequality_slack = 0.0;  ///< s_bar^T s - threshold
  double complementarity = 0.0;   ///< |mu * slack|
};

/// Closed-form solver for one subproblem family: factors Rbar = 2(R+lambda I)
/// once and solves each tangent update in O(L^3) via the dense inverse.
class CpWorkspace {
 public:
  explicit CpWorkspace(const LiftedQP& qp);

  const LiftedQP& qp() const { return qp_; }

  /// Minimizer of s^T Rbar s subject to B s = 1.
  VectorXd solve_equality(const TangentSet& tangents) const;

  /// Adds the inequality s_bar^T s >= threshold; returns the KKT solution of
  /// whichever complementarity branch is consistent.
  KktSolution solve_with_inequality(const TangentSet& tangents, const VectorXd& s_bar,
                                    double threshold) const;

  KktResiduals residuals(const TangentSet& tangents, const VectorXd& s_bar, double threshold,
                         const KktSolution& sol) const;

 private:
  struct EqualityParts;
  EqualityParts equality_parts(const TangentSet& tangents) const;

  LiftedQP qp_;
  MatrixXd Qinv_;  // (2(R + lambda I))^{-1}
};

/// One-shot wrappers around CpWorkspace matching the per-operation contracts.
VectorXd solve_equality(const LiftedQP& qp, const TangentSet& tangents);
KktSolution solve_with_inequality(const LiftedQP& qp, const TangentSet& tangents,
                                  const VectorXd& s_bar, double threshold);
KktResiduals kkt_residuals(const LiftedQP& qp, const TangentSet& tangents, const VectorXd& s_bar,
                           double threshold, const KktSolution& sol);

/// x_l = s_l + j s_{l+L}.
VectorXcd waveform_from_state(const VectorXd& s, int L);
/// [Re x; Im x; 1] (full) or [Re x; Im x] (nullform).
VectorXd state_from_waveform(const VectorXcd& x, QpMode mode);

}  // namespace bic
