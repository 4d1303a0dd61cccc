// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "spectral_mask.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bic {

namespace {
double arg_or_zero(const cxd& z) { return z == cxd(0.0, 0.0) ? 0.0 : std::arg(z); }

VectorXd stack_with_tail(const VectorXcd& v, bool augmented) {
  const int L = static_cast<int>(v.size());
  VectorXd s(augmented ? 2 * L + 1 : 2 * L);
  s.head(L) = v.real();
  s.segment(L, L) = v.imag();
  if (augmented) s(2 * L) = 0.0;
  return s;
}
}  // namespace

bool SpectralMask::is_stop_bin(int p) const {
  return std::find(stop_bins.begin(), stop_bins.end(), p) != stop_bins.end();
}

SpectralMask build_mask(const ArrayScenario& sc, const BandSpec& bands, double E_R) {
  sc.validate();
  if (E_R < 0.0) throw InvalidInput("E_R must be nonnegative");
  for (const Band& b : bands) {
    if (!(b.f_lo <= b.f_hi)) {
      std::ostringstream os;
      os << "band [" << b.f_lo << ", " << b.f_hi << "] Hz has f_lo > f_hi";
      throw InvalidInput(os.str());
    }
    if (b.level < 0.0) throw InvalidInput("band level must be nonnegative");
  }

  SpectralMask mask;
  mask.scenario = sc;
  mask.E_R = E_R;
  mask.y_hat = VectorXd::Ones(sc.N);
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    const double f = sc.bin_frequency(p);
    for (const Band& b : bands) {
      // later bands override earlier ones on overlap
      if (f >= b.f_lo && f <= b.f_hi) mask.y_hat(p + sc.N / 2) = b.level;
    }
  }
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    if (mask.y_hat(p + sc.N / 2) < 1.0) mask.stop_bins.push_back(p);
  }

  const double norm = mask.y_hat.norm();
  if (norm == 0.0) {
    throw InvalidInput("spectral mask covers every bin; at least one passband bin is required");
  }
  mask.y_hat /= norm;
  int npass = 0;
  for (int i = 0; i < sc.N; ++i) npass += mask.y_hat(i) > 0.0 ? 1 : 0;
  mask.gamma = 1.0 / std::sqrt(static_cast<double>(npass));

  if (E_R == 0.0) {
    mask.warnings.push_back(
        "E_R = 0 requires the waveform to reproduce the spectral template exactly, which "
        "generally conflicts with the constant-modulus constraints");
  }

  MatrixXcd Z(sc.M, sc.N);
  for (int m = 0; m < sc.M; ++m) Z.row(m) = mask.y_hat.transpose().cast<cxd>();
  mask.template_time = synthesize_from_spectrum(sc, Z);
  return mask;
}

double spectral_error(const SpectralMask& mask, const VectorXcd& x) {
  if (x.size() != mask.template_time.size()) {
    throw InvalidInput("waveform length does not match the mask's scenario");
  }
  return (mask.template_time - x).squaredNorm();
}

double matched_spectral_error(const SpectralMask& mask, const VectorXcd& x) {
  const ArrayScenario& sc = mask.scenario;
  const MatrixXcd Y = dft_spectrum(sc, x);
  double align = 0.0;
  for (int m = 0; m < sc.M; ++m) {
    for (int i = 0; i < sc.N; ++i) align += mask.y_hat(i) * std::abs(Y(m, i));
  }
  return 2.0 * mask.L() - 2.0 * align;
}

VectorXd linear_constraint_vector(const SpectralMask& mask, const VectorXcd& x_prev,
                                  bool augmented) {
  const int L = mask.L();
  if (x_prev.size() != L) throw InvalidInput("x_prev must have length L");
  VectorXcd rotated(L);
  for (int l = 0; l < L; ++l) {
    rotated(l) = std::polar(std::abs(mask.template_time(l)), arg_or_zero(x_prev(l)));
  }
  return stack_with_tail(rotated, augmented);
}

VectorXd spectrum_matched_constraint_vector(const SpectralMask& mask, const VectorXcd& x_prev,
                                            bool augmented) {
  const ArrayScenario& sc = mask.scenario;
  if (x_prev.size() != mask.L()) throw InvalidInput("x_prev must have length L");
  const MatrixXcd Y = dft_spectrum(sc, x_prev);
  MatrixXcd Z(sc.M, sc.N);
  for (int m = 0; m < sc.M; ++m) {
    for (int i = 0; i < sc.N; ++i) {
      Z(m, i) = std::polar(mask.y_hat(i), arg_or_zero(Y(m, i)));
    }
  }
  return stack_with_tail(synthesize_from_spectrum(sc, Z), augmented);
}

VectorXcd constraint_vector_complex(const VectorXd& s_bar, int L) {
  if (s_bar.size() != 2 * L && s_bar.size() != 2 * L + 1) {
    throw InvalidInput("constraint vector length must be 2L or 2L+1");
  }
  VectorXcd v(L);
  v.real() = s_bar.head(L);
  v.imag() = s_bar.segment(L, L);
  return v;
}

}  // namespace bic
