// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "signal_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace bic {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_bin(const ArrayScenario& sc, int p) {
  if (p < sc.bin_min() || p > sc.bin_max()) {
    std::ostringstream os;
    os << "frequency bin p=" << p << " outside [" << sc.bin_min() << ", " << sc.bin_max() << "]";
    throw InvalidInput(os.str());
  }
}

void check_waveform(const ArrayScenario& sc, const VectorXcd& x) {
  if (x.size() != sc.L()) {
    std::ostringstream os;
    os << "waveform length " << x.size() << " != M*N = " << sc.L();
    throw InvalidInput(os.str());
  }
}
}  // namespace

void ArrayScenario::validate() const {
  std::ostringstream os;
  bool bad = false;
  auto fail = [&](const std::string& msg) {
    os << (bad ? "; " : "") << msg;
    bad = true;
  };
  if (M < 1) fail("M must be >= 1");
  if (N < 2) fail("N must be >= 2");
  if (N % 2 != 0) fail("N must be even");
  if (K < 1) fail("K must be >= 1");
  if (!(d > 0)) fail("d must be > 0");
  if (!(B > 0)) fail("B must be > 0");
  if (!(c > 0)) fail("c must be > 0");
  if (!(f_c > B / 2)) fail("f_c must exceed B/2");
  if (bad) throw InvalidInput("invalid array scenario: " + os.str());
}

VectorXcd steering_vector(const ArrayScenario& sc, double theta_deg, int p) {
  if (theta_deg < 0.0 || theta_deg > 180.0) {
    throw InvalidInput("theta must lie in [0, 180] degrees");
  }
  check_bin(sc, p);
  const double f = sc.bin_frequency(p);
  const double phase_step = kTwoPi * f * sc.d * std::cos(theta_deg * std::numbers::pi / 180.0) / sc.c;
  VectorXcd a(sc.M);
  for (int m = 0; m < sc.M; ++m) {
    a(m) = std::polar(1.0, phase_step * m);
  }
  return a;
}

namespace {
SteeringSet build_set(const ArrayScenario& sc, std::vector<double> angles) {
  SteeringSet set;
  set.scenario = sc;
  set.theta_deg = std::move(angles);
  const int K = static_cast<int>(set.theta_deg.size());
  set.A.reserve(sc.N);
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    MatrixXcd Ap(K, sc.M);
    for (int k = 0; k < K; ++k) {
      Ap.row(k) = steering_vector(sc, set.theta_deg[k], p).adjoint();
    }
    set.A.push_back(std::move(Ap));
  }
  return set;
}
}  // namespace

SteeringSet make_steering_grid(const ArrayScenario& sc) {
  std::vector<double> angles(sc.K);
  for (int k = 0; k < sc.K; ++k) angles[k] = sc.theta_deg(k);
  return build_set(sc, std::move(angles));
}

SteeringSet make_steering_set(const ArrayScenario& sc, const std::vector<double>& angles_deg) {
  if (angles_deg.empty()) throw InvalidInput("angle set must not be empty");
  for (double a : angles_deg) {
    if (a < 0.0 || a > 180.0) throw InvalidInput("steering angle outside [0, 180] degrees");
  }
  return build_set(sc, angles_deg);
}

MatrixXcd selection_matrix(const ArrayScenario& sc, int p) {
  check_bin(sc, p);
  MatrixXcd W = MatrixXcd::Zero(sc.M, sc.L());
  for (int m = 0; m < sc.M; ++m) {
    for (int n = 0; n < sc.N; ++n) {
      W(m, m * sc.N + n) = std::polar(1.0, -kTwoPi * n * p / sc.N);
    }
  }
  return W;
}

VectorXcd apply_selection(const ArrayScenario& sc, int p, const VectorXcd& x) {
  check_bin(sc, p);
  check_waveform(sc, x);
  VectorXcd y(sc.M);
  for (int m = 0; m < sc.M; ++m) {
    cxd acc = 0.0;
    for (int n = 0; n < sc.N; ++n) {
      acc += x(m * sc.N + n) * std::polar(1.0, -kTwoPi * n * p / sc.N);
    }
    y(m) = acc;
  }
  return y;
}

MatrixXcd dft_spectrum(const ArrayScenario& sc, const VectorXcd& x) {
  check_waveform(sc, x);
  MatrixXcd Y(sc.M, sc.N);
  // twiddle row e^{-j2pi n p/N} reused across antennas
  VectorXcd tw(sc.N);
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    for (int n = 0; n < sc.N; ++n) tw(n) = std::polar(1.0, -kTwoPi * n * p / sc.N);
    for (int m = 0; m < sc.M; ++m) {
      Y(m, p + sc.N / 2) = (tw.transpose() * x.segment(m * sc.N, sc.N))(0);
    }
  }
  return Y;
}

VectorXcd synthesize_from_spectrum(const ArrayScenario& sc, const MatrixXcd& Z) {
  if (Z.rows() != sc.M || Z.cols() != sc.N) {
    throw InvalidInput("spectrum grid must be M x N");
  }
  VectorXcd x(sc.L());
  VectorXcd tw(sc.N);
  for (int n = 0; n < sc.N; ++n) {
    for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
      tw(p + sc.N / 2) = std::polar(1.0, kTwoPi * n * p / sc.N);
    }
    for (int m = 0; m < sc.M; ++m) {
      x(m * sc.N + n) = (Z.row(m) * tw)(0);
    }
  }
  return x;
}

MatrixXd beampattern(const ArrayScenario& sc, const SteeringSet& steering, const VectorXcd& x) {
  check_waveform(sc, x);
  if (steering.scenario.M != sc.M || static_cast<int>(steering.A.size()) != sc.N) {
    throw InvalidInput("steering set does not match the scenario dimensions");
  }
  const int K = steering.num_angles();
  MatrixXd P(K, sc.N);
  const MatrixXcd Y = dft_spectrum(sc, x);
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    const VectorXcd v = steering.rows_at_bin(p) * Y.col(p + sc.N / 2);
    P.col(p + sc.N / 2) = v.cwiseAbs2();
  }
  return P;
}

VectorXcd random_unimodular(int L, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  VectorXcd x(L);
  for (int l = 0; l < L; ++l) {
    // 53-bit uniform in [0,1); yields identical streams on every platform
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x(l) = std::polar(1.0, kTwoPi * u);
  }
  return x;
}

}  // namespace bic
