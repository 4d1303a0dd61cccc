// SPDX-License-Identifier: Apache-2.0
//
// bicwave - spatio-spectral MIMO radar waveform design
// Copyright (c) 2026 bicwave contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "spectral_mask.hpp"

using namespace bic;

namespace {
ArrayScenario scenario(int M, int N) {
  ArrayScenario sc;
  sc.M = M;
  sc.N = N;
  sc.K = 3;
  sc.d = 0.15;
  sc.f_c = 1.0e9;
  sc.B = 2.0e8;
  sc.c = 3.0e8;
  return sc;
}
}  // namespace

TEST_CASE("gamma normalization for binary masks") {
  SUBCASE("no bands, N=4 -> gamma = 1/2") {
    const SpectralMask mask = build_mask(scenario(1, 4), {}, 0.1);
    CHECK(mask.gamma == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mask.y_hat.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mask.stop_bins.empty());
  }
  SUBCASE("one band covering two bins of N=8 -> gamma = 1/sqrt(6)") {
    ArrayScenario sc = scenario(1, 8);
    // bins at f_c + p*B/N = 1e9 + 25 MHz * p ; cover p = 1, 2
    const Band band{1.02e9, 1.055e9, 0.0};
    const SpectralMask mask = build_mask(sc, {band}, 0.1);
    REQUIRE(mask.stop_bins.size() == 2);
    CHECK(mask.stop_bins[0] == 1);
    CHECK(mask.stop_bins[1] == 2);
    CHECK(mask.gamma == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(mask.y_hat.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Hz-to-bin mapping validated by re-checking bin centers") {
  ArrayScenario sc = scenario(1, 32);
  sc.f_c = 300.0e6;
  sc.B = 200.0e6;
  const Band notch{328.6e6, 335.0e6, 0.0};
  const SpectralMask mask = build_mask(sc, {notch}, 0.03);
  // every stop bin's center frequency lies inside the notch...
  for (int p : mask.stop_bins) {
    const double f = sc.bin_frequency(p);
    CHECK(f >= notch.f_lo);
    CHECK(f <= notch.f_hi);
  }
  // ...and every bin whose center lies inside the notch is a stop bin
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    const double f = sc.bin_frequency(p);
    if (f >= notch.f_lo && f <= notch.f_hi) CHECK(mask.is_stop_bin(p));
  }
  REQUIRE(mask.stop_bins.size() == 1);
  CHECK(mask.stop_bins[0] == 5);  // 300 MHz + 5 * 6.25 MHz = 331.25 MHz
}

TEST_CASE("mask construction errors") {
  ArrayScenario sc = scenario(1, 4);
  CHECK_THROWS_AS(build_mask(sc, {}, -0.1), InvalidInput);
  const Band all{sc.f_c - sc.B / 2, sc.f_c + sc.B / 2, 0.0};
  CHECK_THROWS_AS(build_mask(sc, {all}, 0.1), InvalidInput);
  const Band reversed{1.05e9, 1.02e9, 0.0};
  CHECK_THROWS_AS(build_mask(sc, {reversed}, 0.1), InvalidInput);
}

TEST_CASE("E_R = 0 is accepted but flagged") {
  const SpectralMask mask = build_mask(scenario(1, 4), {}, 0.0);
  REQUIRE(mask.warnings.size() == 1);
}

TEST_CASE("nonuniform band levels are rescaled to a unit-norm profile") {
  ArrayScenario sc = scenario(1, 8);
  const Band soft{1.02e9, 1.03e9, 0.5};  // bin 1 at half the passband level
  const SpectralMask mask = build_mask(sc, {soft}, 0.1);
  CHECK(mask.y_hat.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mask.y_hat(1 + 4) == doctest::Approx(0.5 * mask.y_hat(0)).epsilon(1e-12));
  CHECK(mask.is_stop_bin(1));
}

TEST_CASE("template squared norm is L and self-distance is zero") {
  const ArrayScenario sc = scenario(2, 8);
  const Band band{1.02e9, 1.03e9, 0.0};
  const SpectralMask mask = build_mask(sc, {band}, 0.1);
  CHECK(mask.template_time.squaredNorm() == doctest::Approx(sc.L()).epsilon(1e-10));
  CHECK(spectral_error(mask, mask.template_time) == doctest::Approx(0.0));
  const VectorXcd zero = VectorXcd::Zero(sc.L());
  CHECK(spectral_error(mask, zero) == doctest::Approx(double(sc.L())).epsilon(1e-10));
}

TEST_CASE("unit-modulus spectral identity 2L - 2 Re{ybar^H Fbar x}") {
  const ArrayScenario sc = scenario(2, 8);
  const Band band{1.04e9, 1.06e9, 0.0};
  const SpectralMask mask = build_mask(sc, {band}, 0.1);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXcd x = oracle::random_unit_waveform(rng, sc.L());
    // Re{ybar^H Fbar x} computed independently: sum_m sum_p y_hat(p) * Re(y_m(p))
    double align = 0.0;
    for (int m = 0; m < sc.M; ++m) {
      for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
        const cxd ym = oracle::naive_dft_bin(x.segment(m * sc.N, sc.N), p);
        align += mask.y_hat(p + sc.N / 2) * ym.real();
      }
    }
    const double expected = 2.0 * sc.L() - 2.0 * align;
    CHECK(spectral_error(mask, x) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("element-rotated constraint vector") {
  const ArrayScenario sc = scenario(1, 4);
  const SpectralMask mask = build_mask(sc, {}, 0.2);

  SUBCASE("zero rotation reproduces the static stack") {
    // x_prev with the template's own phases: rotation is a no-op
    VectorXcd x_prev(sc.L());
    for (int l = 0; l < sc.L(); ++l) {
      x_prev(l) = mask.template_time(l) == cxd(0.0, 0.0)
                      ? cxd(1.0, 0.0)
                      : std::polar(1.0, std::arg(mask.template_time(l)));
    }
    const VectorXd s_bar = linear_constraint_vector(mask, x_prev, true);
    REQUIRE(s_bar.size() == 2 * sc.L() + 1);
    CHECK(s_bar(2 * sc.L()) == 0.0);
    const VectorXcd as_complex = constraint_vector_complex(s_bar, sc.L());
    CHECK((as_complex - mask.template_time).norm() < 1e-12);
  }

  SUBCASE("rotation preserves elementwise magnitude") {
    std::mt19937_64 rng(3);
    const VectorXcd x_prev = oracle::random_complex(rng, sc.L());
    const VectorXd s_bar = linear_constraint_vector(mask, x_prev, false);
    REQUIRE(s_bar.size() == 2 * sc.L());
    const VectorXcd v = constraint_vector_complex(s_bar, sc.L());
    for (int l = 0; l < sc.L(); ++l) {
      CHECK(std::abs(v(l)) == doctest::Approx(std::abs(mask.template_time(l))).epsilon(1e-12));
    }
  }

  SUBCASE("elementwise magnitude-and-phase oracle for x_prev = [1, j, -1, -j]") {
    VectorXcd x_prev(4);
    x_prev << cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1);
    const VectorXd s_bar = linear_constraint_vector(mask, x_prev, true);
    const VectorXcd v = constraint_vector_complex(s_bar, 4);
    for (int l = 0; l < 4; ++l) {
      const cxd expected = std::polar(std::abs(mask.template_time(l)), std::arg(x_prev(l)));
      CHECK(std::abs(v(l) - expected) < 1e-12);
    }
  }
}

TEST_CASE("alignment chain: rotated value dominates the static one") {
  const ArrayScenario sc = scenario(2, 8);
  const Band band{1.04e9, 1.05e9, 0.0};
  const SpectralMask mask = build_mask(sc, {band}, 0.1);
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const VectorXcd x_prev = oracle::random_complex(rng, sc.L());
    VectorXd s_prev_state(2 * sc.L() + 1);
    s_prev_state.head(sc.L()) = x_prev.real();
    s_prev_state.segment(sc.L(), sc.L()) = x_prev.imag();
    s_prev_state(2 * sc.L()) = 1.0;

    const VectorXd rotated = linear_constraint_vector(mask, x_prev, true);
    VectorXd stat(2 * sc.L() + 1);
    stat.head(sc.L()) = mask.template_time.real();
    stat.segment(sc.L(), sc.L()) = mask.template_time.imag();
    stat(2 * sc.L()) = 0.0;

    // rotated value equals sum_l |template_l| |x_l| and bounds the static value
    double expected = 0.0;
    for (int l = 0; l < sc.L(); ++l) {
      expected += std::abs(mask.template_time(l)) * std::abs(x_prev(l));
    }
    const double rotated_value = rotated.dot(s_prev_state);
    CHECK(rotated_value == doctest::Approx(expected).epsilon(1e-10));
    CHECK(rotated_value >= stat.dot(s_prev_state) - 1e-10);
  }
}

TEST_CASE("arg(0) convention maps zero entries to phase zero") {
  const ArrayScenario sc = scenario(1, 4);
  const SpectralMask mask = build_mask(sc, {}, 0.2);
  const VectorXcd x_prev = VectorXcd::Zero(sc.L());
  const VectorXd s_bar = linear_constraint_vector(mask, x_prev, true);
  const VectorXcd v = constraint_vector_complex(s_bar, sc.L());
  for (int l = 0; l < sc.L(); ++l) {
    // phase 0: the entry is the real magnitude itself
    CHECK(v(l).imag() == 0.0);
    CHECK(v(l).real() == doctest::Approx(std::abs(mask.template_time(l))));
  }
}

TEST_CASE("spectrum-rotated constraint vector measures mask alignment") {
  const ArrayScenario sc = scenario(2, 8);
  const Band band{1.04e9, 1.06e9, 0.0};
  const SpectralMask mask = build_mask(sc, {band}, 0.1);
  std::mt19937_64 rng(37);

  SUBCASE("linear form value is sum_p y_hat(p) |y_m(p)|") {
    for (int trial = 0; trial < 15; ++trial) {
      const VectorXcd x_prev = oracle::random_unit_waveform(rng, sc.L());
      const VectorXd s_bar = spectrum_matched_constraint_vector(mask, x_prev, false);
      VectorXd s_prev(2 * sc.L());
      s_prev.head(sc.L()) = x_prev.real();
      s_prev.segment(sc.L(), sc.L()) = x_prev.imag();

      double expected = 0.0;
      for (int m = 0; m < sc.M; ++m) {
        for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
          expected += mask.y_hat(p + sc.N / 2) *
                      std::abs(oracle::naive_dft_bin(x_prev.segment(m * sc.N, sc.N), p));
        }
      }
      CHECK(s_bar.dot(s_prev) == doctest::Approx(expected).epsilon(1e-10));
      // consistency with the matched-error report
      CHECK(matched_spectral_error(mask, x_prev) ==
            doctest::Approx(2.0 * sc.L() - 2.0 * expected).epsilon(1e-9));
    }
  }

  SUBCASE("feasibility chain: a point's own rotation maximizes the form") {
    for (int trial = 0; trial < 15; ++trial) {
      const VectorXcd x_prev = oracle::random_unit_waveform(rng, sc.L());
      const VectorXcd x_other = oracle::random_unit_waveform(rng, sc.L());
      VectorXd s_prev(2 * sc.L());
      s_prev.head(sc.L()) = x_prev.real();
      s_prev.segment(sc.L(), sc.L()) = x_prev.imag();
      const double own = spectrum_matched_constraint_vector(mask, x_prev, false).dot(s_prev);
      const double other = spectrum_matched_constraint_vector(mask, x_other, false).dot(s_prev);
      CHECK(own >= other - 1e-9);
    }
  }
}
