// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "qp_engine.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bic {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_desired(const SteeringSet& steering, const DesiredBeampattern& desired) {
  const int K = steering.num_angles();
  const int N = steering.scenario.N;
  if (desired.d.rows() != K || desired.d.cols() != N) {
    std::ostringstream os;
    os << "desired grid is " << desired.d.rows() << "x" << desired.d.cols() << ", expected " << K
       << "x" << N;
    throw InvalidInput(os.str());
  }
  if ((desired.d.array() < 0.0).any()) throw InvalidInput("desired magnitudes must be >= 0");
  if (desired.weights) {
    if (desired.weights->rows() != K || desired.weights->cols() != N) {
      throw InvalidInput("weight grid dimensions must match the desired grid");
    }
    if ((desired.weights->array() <= 0.0).any()) throw InvalidInput("weights must be positive");
    const double sum = desired.weights->sum();
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "weights must sum to 1 (got " << sum << ")";
      throw InvalidInput(os.str());
    }
  }
}

// Accumulates P = sum_p Wp^H Ap^H Ap Wp through the per-antenna-pair Toeplitz
// structure: block (m,m') has entries h_{mm'}(n-n') with
// h_{mm'}(delta) = sum_p C_p(m,m') e^{j 2 pi p delta / N}.
MatrixXcd accumulate_P(const SteeringSet& steering, const MatrixXd* weights) {
  const ArrayScenario& sc = steering.scenario;
  const int M = sc.M, N = sc.N, K = steering.num_angles();
  (void)K;
  std::vector<MatrixXcd> C(N);
  for (int ip = 0; ip < N; ++ip) {
    const MatrixXcd& Ap = steering.A[ip];
    if (weights) {
      const VectorXcd sw = weights->col(ip).cwiseSqrt().cast<cxd>();
      MatrixXcd Aw = sw.asDiagonal() * Ap;
      C[ip] = Aw.adjoint() * Aw;
    } else {
      C[ip] = Ap.adjoint() * Ap;
    }
  }
  MatrixXcd P = MatrixXcd::Zero(M * N, M * N);
  VectorXcd h(2 * N - 1);  // h(delta + N - 1), delta = -(N-1)..N-1
  for (int m = 0; m < M; ++m) {
    for (int mp = 0; mp < M; ++mp) {
      for (int delta = -(N - 1); delta <= N - 1; ++delta) {
        cxd acc = 0.0;
        for (int ip = 0; ip < N; ++ip) {
          const int p = ip - N / 2;
          acc += C[ip](m, mp) * std::polar(1.0, kTwoPi * p * delta / N);
        }
        h(delta + N - 1) = acc;
      }
      for (int n = 0; n < N; ++n) {
        for (int np = 0; np < N; ++np) {
          P(m * N + n, mp * N + np) = h(n - np + N - 1);
        }
      }
    }
  }
  return P;
}
}  // namespace

QuadraticForm assemble_quadratic_form(const SteeringSet& steering,
                                      const DesiredBeampattern& desired, const MatrixXd& phases) {
  check_desired(steering, desired);
  const ArrayScenario& sc = steering.scenario;
  const int K = steering.num_angles(), N = sc.N;
  if (phases.rows() != K || phases.cols() != N) {
    throw InvalidInput("phase grid dimensions must match the desired grid");
  }

  QuadraticForm form;
  form.P = accumulate_P(steering, desired.weights ? &*desired.weights : nullptr);

  form.q = VectorXcd::Zero(sc.L());
  form.r = 0.0;
  for (int ip = 0; ip < N; ++ip) {
    const int p = ip - N / 2;
    VectorXcd dp(K);
    for (int k = 0; k < K; ++k) {
      double scale = desired.weights ? std::sqrt((*desired.weights)(k, ip)) : 1.0;
      dp(k) = std::polar(scale * desired.d(k, ip), phases(k, ip));
    }
    VectorXcd u;
    if (desired.weights) {
      // q uses the weighted rows of A_p as well
      const VectorXcd sw = desired.weights->col(ip).cwiseSqrt().cast<cxd>();
      u = (sw.asDiagonal() * steering.A[ip]).adjoint() * dp;
    } else {
      u = steering.A[ip].adjoint() * dp;
    }
    for (int m = 0; m < sc.M; ++m) {
      for (int n = 0; n < N; ++n) {
        form.q(m * N + n) += u(m) * std::polar(1.0, kTwoPi * n * p / N);
      }
    }
    form.r += dp.squaredNorm();
  }
  return form;
}

namespace {
void fill_complex_blocks(MatrixXd& R, const MatrixXcd& P) {
  const int L = static_cast<int>(P.rows());
  R.topLeftCorner(L, L) = P.real();
  R.block(0, L, L, L) = -P.imag();
  R.block(L, 0, L, L) = P.imag();
  R.block(L, L, L, L) = P.real();
}
}  // namespace

LiftedQP assemble_full(const SteeringSet& steering, const DesiredBeampattern& desired,
                       const MatrixXd& phases, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  const QuadraticForm form = assemble_quadratic_form(steering, desired, phases);
  const int L = static_cast<int>(form.P.rows());

  LiftedQP qp;
  qp.mode = QpMode::Full;
  qp.L = L;
  qp.lambda = lambda;
  qp.R = MatrixXd::Zero(2 * L + 1, 2 * L + 1);
  fill_complex_blocks(qp.R, form.P);
  VectorXd t(2 * L);
  t.head(L) = form.q.real();
  t.tail(L) = form.q.imag();
  qp.R.block(0, 2 * L, 2 * L, 1) = -t;
  qp.R.block(2 * L, 0, 1, 2 * L) = -t.transpose();
  qp.R(2 * L, 2 * L) = form.r;
  return qp;
}

LiftedQP assemble_nullform(const SteeringSet& steering, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (steering.num_angles() == 0) throw InvalidInput("null direction set must not be empty");
  const MatrixXcd V = accumulate_P(steering, nullptr);
  const int L = static_cast<int>(V.rows());

  LiftedQP qp;
  qp.mode = QpMode::Nullform;
  qp.L = L;
  qp.lambda = lambda;
  qp.R = MatrixXd::Zero(2 * L, 2 * L);
  fill_complex_blocks(qp.R, V);
  return qp;
}

double default_ridge(const MatrixXd& R) {
  const double t = 10.0 * R.trace() / static_cast<double>(R.rows());
  return t > 0.0 ? t : 1.0;
}

double beampattern_cost(const SteeringSet& steering, const DesiredBeampattern& desired,
                        const MatrixXd& phases, const VectorXcd& x) {
  check_desired(steering, desired);
  const ArrayScenario& sc = steering.scenario;
  const MatrixXcd Y = dft_spectrum(sc, x);
  double total = 0.0;
  for (int ip = 0; ip < sc.N; ++ip) {
    const VectorXcd v = steering.A[ip] * Y.col(ip);
    for (int k = 0; k < steering.num_angles(); ++k) {
      const double w = desired.weights ? (*desired.weights)(k, ip) : 1.0;
      total += w * std::norm(std::polar(desired.d(k, ip), phases(k, ip)) - v(k));
    }
  }
  return total;
}

double magnitude_mismatch_cost(const SteeringSet& steering, const DesiredBeampattern& desired,
                               const VectorXcd& x) {
  check_desired(steering, desired);
  const ArrayScenario& sc = steering.scenario;
  const MatrixXcd Y = dft_spectrum(sc, x);
  double total = 0.0;
  for (int ip = 0; ip < sc.N; ++ip) {
    const VectorXcd v = steering.A[ip] * Y.col(ip);
    for (int k = 0; k < steering.num_angles(); ++k) {
      const double w = desired.weights ? (*desired.weights)(k, ip) : 1.0;
      const double diff = desired.d(k, ip) - std::abs(v(k));
      total += w * diff * diff;
    }
  }
  return total;
}

TangentSet tangent_update(const VectorXcd& x_prev, const VectorXd& gamma_prev) {
  if (x_prev.size() != gamma_prev.size()) {
    throw InvalidInput("x_prev and gamma_prev must have equal length");
  }
  TangentSet t;
  t.gamma.resize(x_prev.size());
  for (Eigen::Index l = 0; l < x_prev.size(); ++l) {
    const double psi = x_prev(l) == cxd(0.0, 0.0) ? 0.0 : std::arg(x_prev(l));
    t.gamma(l) = 2.0 * psi - gamma_prev(l);
  }
  return t;
}

VectorXd apply_tangents(const TangentSet& t, QpMode mode, const VectorXd& v) {
  const int L = t.L();
  VectorXd out(t.rows(mode));
  for (int l = 0; l < L; ++l) {
    out(l) = std::cos(t.gamma(l)) * v(l) + std::sin(t.gamma(l)) * v(l + L);
  }
  if (mode == QpMode::Full) out(L) = v(2 * L);
  return out;
}

VectorXd apply_tangents_adjoint(const TangentSet& t, QpMode mode, const VectorXd& w, int D) {
  const int L = t.L();
  VectorXd out = VectorXd::Zero(D);
  for (int l = 0; l < L; ++l) {
    out(l) = std::cos(t.gamma(l)) * w(l);
    out(l + L) = std::sin(t.gamma(l)) * w(l);
  }
  if (mode == QpMode::Full) out(2 * L) = w(L);
  return out;
}

struct CpWorkspace::EqualityParts {
  MatrixXd U;                 // B * Qinv, rows x D
  Eigen::LLT<MatrixXd> Sllt;  // B Qinv B^T
  VectorXd s_hat;
};

CpWorkspace::CpWorkspace(const LiftedQP& qp) : qp_(qp) {
  if (!(qp.lambda > 0.0)) throw InvalidInput("lambda must be positive");
  const int D = qp.D();
  MatrixXd Rbar = 2.0 * qp.R;
  Rbar.diagonal().array() += 2.0 * qp.lambda;
  Eigen::LLT<MatrixXd> llt(Rbar);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("factorization of 2(R + lambda I) failed; R is expected PSD");
  }
  Qinv_ = llt.solve(MatrixXd::Identity(D, D));
}

CpWorkspace::EqualityParts CpWorkspace::equality_parts(const TangentSet& tangents) const {
  const int L = qp_.L;
  const int D = qp_.D();
  if (tangents.L() != L) throw InvalidInput("tangent set length must equal L");
  const int rows = tangents.rows(qp_.mode);

  EqualityParts parts;
  parts.U.resize(rows, D);
  for (int l = 0; l < L; ++l) {
    parts.U.row(l) =
        std::cos(tangents.gamma(l)) * Qinv_.row(l) + std::sin(tangents.gamma(l)) * Qinv_.row(l + L);
  }
  if (qp_.mode == QpMode::Full) parts.U.row(L) = Qinv_.row(2 * L);

  MatrixXd S(rows, rows);
  for (int col = 0; col < L; ++col) {
    S.col(col) = std::cos(tangents.gamma(col)) * parts.U.col(col) +
                 std::sin(tangents.gamma(col)) * parts.U.col(col + L);
  }
  if (qp_.mode == QpMode::Full) S.col(L) = parts.U.col(2 * L);

  parts.Sllt.compute(S);
  if (parts.Sllt.info() != Eigen::Success) {
    throw NumericalError("factorization of B Rbar^{-1} B^T failed");
  }
  parts.s_hat = parts.U.transpose() * parts.Sllt.solve(VectorXd::Ones(rows));
  return parts;
}

VectorXd CpWorkspace::solve_equality(const TangentSet& tangents) const {
  return equality_parts(tangents).s_hat;
}

KktSolution CpWorkspace::solve_with_inequality(const TangentSet& tangents, const VectorXd& s_bar,
                                               double threshold) const {
  const int D = qp_.D();
  if (s_bar.size() != D) throw InvalidInput("s_bar dimension must match the lifted state");
  const EqualityParts parts = equality_parts(tangents);

  KktSolution sol;
  const double value = s_bar.dot(parts.s_hat);
  if (value >= threshold) {
    sol.s = parts.s_hat;
    sol.mu = 0.0;
    sol.alpha = 0.0;
    sol.active = false;
    return sol;
  }

  const VectorXd w = Qinv_ * s_bar;
  const VectorXd h = apply_tangents(tangents, qp_.mode, w);
  const VectorXd Sh = parts.Sllt.solve(h);
  const double alpha = -(s_bar.dot(w) - h.dot(Sh));
  if (std::abs(alpha) < 1e-12 * s_bar.squaredNorm()) {
    throw InfeasibleError(
        "spectral constraint vector is linearly dependent on the tangent rows while the "
        "inequality is violated; the subproblem has no solution (corrupted inputs?)");
  }
  sol.mu = (value - threshold) / alpha;
  sol.s = sol.mu * (w - parts.U.transpose() * Sh) + parts.s_hat;
  sol.alpha = alpha;
  sol.active = true;
  return sol;
}

KktResiduals CpWorkspace::residuals(const TangentSet& tangents, const VectorXd& s_bar,
                                    double threshold, const KktSolution& sol) const {
  const int D = qp_.D();
  VectorXd Rbar_s = 2.0 * (qp_.R * sol.s) + 2.0 * qp_.lambda * sol.s;
  // Rows of B are orthonormal, so the least-squares multiplier is
  // v = B (mu s_bar - Rbar s).
  const VectorXd rhs = sol.mu * s_bar - Rbar_s;
  const VectorXd v = apply_tangents(tangents, qp_.mode, rhs);
  const VectorXd stat = Rbar_s + apply_tangents_adjoint(tangents, qp_.mode, v, D) - sol.mu * s_bar;

  KktResiduals res;
  res.stationarity = stat.lpNorm<Eigen::Infinity>();
  const VectorXd primal = apply_tangents(tangents, qp_.mode, sol.s);
  res.primal = (primal.array() - 1.0).abs().maxCoeff();
  res.inequality_slack = s_bar.dot(sol.s) - threshold;
  res.complementarity = std::abs(sol.mu * res.inequality_slack);
  return res;
}

VectorXd solve_equality(const LiftedQP& qp, const TangentSet& tangents) {
  return CpWorkspace(qp).solve_equality(tangents);
}

KktSolution solve_with_inequality(const LiftedQP& qp, const TangentSet& tangents,
                                  const VectorXd& s_bar, double threshold) {
  return CpWorkspace(qp).solve_with_inequality(tangents, s_bar, threshold);
}

KktResiduals kkt_residuals(const LiftedQP& qp, const TangentSet& tangents, const VectorXd& s_bar,
                           double threshold, const KktSolution& sol) {
  return CpWorkspace(qp).residuals(tangents, s_bar, threshold, sol);
}

VectorXcd waveform_from_state(const VectorXd& s, int L) {
  VectorXcd x(L);
  x.real() = s.head(L);
  x.imag() = s.segment(L, L);
  return x;
}

VectorXd state_from_waveform(const VectorXcd& x, QpMode mode) {
  const int L = static_cast<int>(x.size());
  VectorXd s(mode == QpMode::Full ? 2 * L + 1 : 2 * L);
  s.head(L) = x.real();
  s.segment(L, L) = x.imag();
  if (mode == QpMode::Full) s(2 * L) = 1.0;
  return s;
}

}  // namespace bic
