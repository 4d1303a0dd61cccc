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

#include <string>
#include <vector>

#include "signal_model.hpp"
#include "types.hpp"

namespace bic {

/// A frequency band to suppress. `level` is the relative desired spectrum
/// magnitude inside the band (0 = hard notch); nonzero levels express that a
/// band needs only partial suppression relative to the passband.
struct Band {
  double f_lo = 0.0;  ///< [Hz]
  double f_hi = 0.0;  ///< [Hz]
  double level = 0.0;
};

using BandSpec = std::vector<Band>;

/// Desired spectrum shape and derived time-domain template.
///
/// y_hat holds the per-bin desired magnitudes (index p + N/2), normalized so
/// that ||y_hat||^2 = 1; for a binary mask the passband value is
/// gamma = 1/sqrt(#passband bins). The template is the per-antenna
/// unnormalized synthesis of y_hat replicated across antennas and has
/// squared norm N per antenna (L total).
struct SpectralMask {
  ArrayScenario scenario;
  VectorXd y_hat;               ///< length N, entries >= 0, unit 2-norm
  double gamma = 0.0;           ///< passband magnitude of a binary mask
  double E_R = 0.0;             ///< maximum tolerable spectral error (scaled by L)
  std::vector<int> stop_bins;   ///< bins p with a band level strictly below passband
  VectorXcd template_time;      ///< length L; the synthesis of y_hat per antenna
  std::vector<std::string> warnings;

  int L() const { return scenario.L(); }
  bool is_stop_bin(int p) const;
};

/// Build the mask from bands given in Hz. A bin belongs to a band when its
/// center frequency f_c + p*B/N lies inside [f_lo, f_hi] (closed interval).
/// Throws if every bin is covered by level-0 bands or E_R < 0; E_R = 0 is
/// accepted with a warning recorded on the mask.
SpectralMask build_mask(const ArrayScenario& sc, const BandSpec& bands, double E_R);

/// ||template - x||^2 against the static (unrotated) template.
double spectral_error(const SpectralMask& mask, const VectorXcd& x);

/// Phase-matched spectral error 2L - 2*sum_p y_hat(p)*|y_m(p)| summed over
/// antennas: the template distance minimized over per-bin spectrum phases.
/// Agrees with spectral_error at x whose spectrum phases match the template.
double matched_spectral_error(const SpectralMask& mask, const VectorXcd& x);

/// Constraint vector s_bar^(n) with per-ELEMENT rotation: the complex entry l
/// has magnitude |template_l| and the phase of x_prev(l) (arg 0 := 0 for zero
/// entries). `augmented` appends the trailing 0 (length 2L+1 vs 2L).
VectorXd linear_constraint_vector(const SpectralMask& mask, const VectorXcd& x_prev,
                                  bool augmented = true);

/// Constraint vector with per-BIN rotation: the desired spectrum picks up the
/// phases of x_prev's own spectrum before synthesis, so the linear form
/// s_bar^T s measures sum_p y_hat(p)*|y(p)| -- alignment of the spectrum
/// magnitude profile with the mask shape. This is the rotation the solver
/// uses by default; the same feasibility-chain argument applies to it.
VectorXd spectrum_matched_constraint_vector(const SpectralMask& mask, const VectorXcd& x_prev,
                                            bool augmented = true);

/// Complex reading of a constraint vector (drops the trailing 0 if present).
VectorXcd constraint_vector_complex(const VectorXd& s_bar, int L);

}  // namespace bic
