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

#include <vector>

#include "types.hpp"

namespace bic {

/// Wideband uniform linear array and sampling grid.
///
/// The transmit waveform is the length L = M*N concatenation of the
/// per-antenna time series in antenna-major order: antenna m occupies
/// indices [m*N, (m+1)*N). Frequency bins run p = -N/2 .. N/2-1 and map to
/// physical frequency f_c + p*B/N (sampling interval T_s = 1/B).
struct ArrayScenario {
  int M = 1;                    ///< antenna count
  int N = 2;                    ///< time samples per antenna (even)
  double d = 0.5;               ///< element spacing [m]
  double f_c = 1.0e9;           ///< carrier frequency [Hz]
  double B = 1.0e8;             ///< bandwidth [Hz]
  int K = 1;                    ///< angle grid points over [0, 180] deg
  double c = 299792458.0;       ///< propagation speed [m/s]

  int L() const { return M * N; }
  double sample_interval() const { return 1.0 / B; }
  int bin_min() const { return -N / 2; }
  int bin_max() const { return N / 2 - 1; }

  /// Physical frequency of bin p: f_c + p/(N*T_s).
  double bin_frequency(int p) const { return f_c + static_cast<double>(p) * B / N; }

  /// Angle grid theta_k = 180*(k-1)/(K-1) deg, k = 1..K (single point: 90 deg).
  double theta_deg(int k) const {
    return K > 1 ? 180.0 * static_cast<double>(k) / (K - 1) : 90.0;
  }

  /// Throws InvalidInput listing every violated invariant.
  void validate() const;
};

/// Steering vectors a_kp cached for a fixed set of angles.
///
/// For each frequency bin p the member `A[p + N/2]` holds the K x M matrix
/// whose k-th row is a(theta_k, p)^H, i.e. the conjugated steering vector.
struct SteeringSet {
  ArrayScenario scenario;
  std::vector<double> theta_deg;
  std::vector<MatrixXcd> A;  ///< indexed by p + N/2; each K x M, rows a_kp^H

  int num_angles() const { return static_cast<int>(theta_deg.size()); }
  const MatrixXcd& rows_at_bin(int p) const { return A.at(p + scenario.N / 2); }
};

/// Element m of a(theta, p): exp(j*2*pi*(p/(N*T_s) + f_c)*(m*d*cos(theta))/c).
VectorXcd steering_vector(const ArrayScenario& sc, double theta_deg, int p);

/// Steering set on the scenario's uniform K-point angle grid.
SteeringSet make_steering_grid(const ArrayScenario& sc);

/// Steering set restricted to explicit angles (e.g. null directions).
SteeringSet make_steering_set(const ArrayScenario& sc, const std::vector<double>& angles_deg);

/// W_p = I_M (x) e_p^H with e_p^H = [1, e^{-j2pi p/N}, ..., e^{-j2pi (N-1)p/N}].
/// Dense form, intended for small cases and tests; the solver path applies
/// W_p implicitly via apply_selection.
MatrixXcd selection_matrix(const ArrayScenario& sc, int p);

/// W_p x: the p-th unnormalized DFT coefficient of each antenna's series.
VectorXcd apply_selection(const ArrayScenario& sc, int p, const VectorXcd& x);

/// Unnormalized per-antenna DFT: y_m(p) = sum_n x_m(n) e^{-j2pi n p/N},
/// returned as an M x N matrix with column index p + N/2.
MatrixXcd dft_spectrum(const ArrayScenario& sc, const VectorXcd& x);

/// Adjoint synthesis: given Z (M x N, column index p + N/2), returns the
/// length-L time vector with x_m(n) = sum_p Z(m, p) e^{+j2pi n p/N}.
VectorXcd synthesize_from_spectrum(const ArrayScenario& sc, const MatrixXcd& Z);

/// Beampattern grid P(k, p) = |a_kp^H W_p x|^2, K x N (column index p + N/2).
MatrixXd beampattern(const ArrayScenario& sc, const SteeringSet& steering, const VectorXcd& x);

/// Pseudo-random unit-modulus waveform; fully determined by (L, seed).
VectorXcd random_unimodular(int L, unsigned long long seed);

}  // namespace bic
