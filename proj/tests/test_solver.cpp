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
#include "solver.hpp"

using namespace bic;

namespace {

ArrayScenario scenario(int M, int N, int K) {
  ArrayScenario sc;
  sc.M = M;
  sc.N = N;
  sc.K = K;
  sc.f_c = 1.0e9;
  sc.B = 2.0e8;
  sc.c = 3.0e8;
  sc.d = sc.c / (2.0 * sc.f_c);
  return sc;
}

DesiredBeampattern sector_pattern(const ArrayScenario& sc, double lo_deg, double hi_deg) {
  DesiredBeampattern d;
  d.d = MatrixXd::Zero(sc.K, sc.N);
  for (int k = 0; k < sc.K; ++k) {
    const double th = sc.theta_deg(k);
    if (th >= lo_deg && th <= hi_deg) d.d.row(k).setOnes();
  }
  return d;
}

void check_inner_descent(const std::vector<TraceRow>& trace) {
  // descent slack between consecutive solved iterates of the same sweep
  for (size_t i = 1; i + 1 < trace.size(); ++i) {
    const TraceRow& a = trace[i];
    const TraceRow& b = trace[i + 1];
    if (a.is_outer_row || b.is_outer_row) continue;
    if (a.outer != b.outer || b.inner != a.inner + 1 || a.inner < 1) continue;
    CHECK(b.cost_g <= a.cost_g + 1e-9 * (1.0 + std::abs(a.cost_g)));
  }
}

void check_containment(const std::vector<TraceRow>& trace, double threshold_slack = 1e-8) {
  // the feasibility chain starts once the previous iterate came from a solved
  // subproblem; only the very first subproblem sees the raw initializer
  for (size_t i = 0; i < trace.size(); ++i) {
    const TraceRow& r = trace[i];
    if (r.is_outer_row || r.inner < 1) continue;
    CHECK(r.containment_primal <= 1e-8);
    const bool first_overall = r.inner == 1 && r.outer <= 1;
    if (!first_overall) CHECK(r.containment_slack >= -threshold_slack);
  }
}

}  // namespace

TEST_CASE("solver params validation") {
  SolverParams p;
  CHECK_NOTHROW(p.validate());
  p.zeta_inner = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = SolverParams{};
  p.max_inner_iters = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = SolverParams{};
  p.lambda = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_CASE("phase update") {
  SUBCASE("single antenna: p=0 carries the constant, other bins hit the zero convention") {
    const ArrayScenario sc = scenario(1, 4, 3);
    const SteeringSet steering = make_steering_grid(sc);
    const VectorXcd x = VectorXcd::Ones(sc.L());
    const MatrixXd phi = phase_update(steering, x);
    for (int k = 0; k < sc.K; ++k) {
      CHECK(phi(k, sc.N / 2) == doctest::Approx(0.0));  // arg(N * conj(a)) with a = 1 (M=1)
      for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
        if (p != 0) CHECK(phi(k, p + sc.N / 2) == 0.0);  // zero inner product -> 0
      }
    }
  }

  SUBCASE("global phase shift of x shifts every defined phase by the same constant") {
    const ArrayScenario sc = scenario(3, 4, 5);
    const SteeringSet steering = make_steering_grid(sc);
    std::mt19937_64 rng(11);
    const VectorXcd x = oracle::random_unit_waveform(rng, sc.L());
    const double alpha = 0.9;
    const MatrixXd phi1 = phase_update(steering, x);
    const MatrixXd phi2 = phase_update(steering, std::polar(1.0, alpha) * x);
    for (int k = 0; k < sc.K; ++k) {
      for (int ip = 0; ip < sc.N; ++ip) {
        double diff = std::remainder(phi2(k, ip) - phi1(k, ip) - alpha, 2.0 * M_PI);
        CHECK(std::abs(diff) < 1e-10);
      }
    }
  }

  SUBCASE("random waveform matches brute-force evaluation") {
    const ArrayScenario sc = scenario(3, 4, 4);
    const SteeringSet steering = make_steering_grid(sc);
    std::mt19937_64 rng(13);
    const VectorXcd x = oracle::random_unit_waveform(rng, sc.L());
    const MatrixXd phi = phase_update(steering, x);
    for (int k = 0; k < sc.K; ++k) {
      for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
        cxd acc = 0.0;
        const VectorXcd a = steering_vector(sc, steering.theta_deg[k], p);
        for (int m = 0; m < sc.M; ++m) {
          acc += std::conj(a(m)) * oracle::naive_dft_bin(x.segment(m * sc.N, sc.N), p);
        }
        CHECK(std::abs(std::remainder(phi(k, p + sc.N / 2) - std::arg(acc), 2 * M_PI)) < 1e-10);
      }
    }
  }
}

TEST_CASE("inner loop stops immediately at a fixed point") {
  const ArrayScenario sc = scenario(2, 4, 3);

  SUBCASE("exact fixed point: zero quadratic makes every unimodular point optimal") {
    // R = 0, vacuous inequality: the subproblem minimizer is B^T 1, which is
    // exactly the unit-modulus point at the tangent angles
    const SpectralMask mask = build_mask(sc, {}, 2.0);
    LiftedQP qp;
    qp.mode = QpMode::Nullform;
    qp.L = sc.L();
    qp.lambda = 0.5;
    qp.R = MatrixXd::Zero(2 * sc.L(), 2 * sc.L());
    SolverParams params;
    params.lambda = qp.lambda;
    const VectorXcd x0 = random_unimodular(sc.L(), 3);
    const InnerResult res = inner_loop(qp, mask, x0, params);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK((res.x_final - x0).norm() < 1e-12);
  }

  SUBCASE("restart from a converged run stops in one iteration") {
    const SteeringSet steering = make_steering_set(sc, {60.0});
    const SpectralMask mask = build_mask(sc, {}, 1.9);
    LiftedQP qp = assemble_nullform(steering, 1.0);
    qp.lambda = default_ridge(qp.R);
    SolverParams params;
    params.lambda = qp.lambda;
    params.max_inner_iters = 4000;
    const InnerResult first = inner_loop(qp, mask, random_unimodular(sc.L(), 3), params);
    REQUIRE(first.converged);
    const InnerResult second =
        inner_loop(qp, mask, first.x_final, params, 0, first.gamma_final);
    CHECK(second.converged);
    CHECK(second.iterations == 1);
    // a zeta-converged point is only a near-fixed-point; one step moves it
    // by no more than the residual drift of the stopped run
    CHECK((second.x_final - first.x_final).norm() < 1e-2);
  }
}

TEST_CASE("desk-scale inner run: descent, containment, modulus convergence") {
  const ArrayScenario sc = scenario(4, 8, 5);
  const SteeringSet steering = make_steering_grid(sc);
  const SpectralMask mask = build_mask(sc, {Band{1.05e9, 1.08e9, 0.0}}, 0.4);
  DesiredBeampattern desired = sector_pattern(sc, 60.0, 120.0);

  const VectorXcd x0 = random_unimodular(sc.L(), 21);
  const MatrixXd phases = phase_update(make_steering_grid(sc), x0);
  LiftedQP qp = assemble_full(steering, desired, phases, 1.0);
  qp.lambda = default_ridge(qp.R);

  SolverParams params;
  params.lambda = qp.lambda;
  params.E_R = 0.4;
  const InnerResult res = inner_loop(qp, mask, x0, params);

  check_inner_descent(res.trace);
  check_containment(res.trace);
  double dev = 0.0;
  for (int l = 0; l < sc.L(); ++l) {
    dev = std::max(dev, std::abs(std::abs(res.x_final(l)) - 1.0));
  }
  CHECK(dev <= 1e-4);

  // halving E_R: the linear surrogate bound holds at the pre-projection iterate
  SolverParams tight = params;
  tight.E_R = 0.2;
  const InnerResult res2 = inner_loop(qp, mask, x0, tight);
  const TraceRow& last = res2.trace.back();
  CHECK(last.linear_slack >= -1e-8);  // s_bar^T s >= (1 - E_R/2) L
}

TEST_CASE("solve_nullform descends from the initial waveform") {
  const ArrayScenario sc = scenario(2, 2, 5);
  const SpectralMask mask = build_mask(sc, {}, 1.9);
  SolverParams params;
  params.seed = 5;
  const SolveReport rep = solve_nullform(sc, {90.0}, mask, params);
  REQUIRE(rep.trace.size() >= 2);
  const double g0 = rep.trace.front().cost_g;
  // compare converged objective against the starting point
  double g_last = 0.0;
  for (const TraceRow& r : rep.trace) {
    if (!r.is_outer_row) g_last = r.cost_g;
  }
  CHECK(g_last <= g0 + 1e-9 * (1 + std::abs(g0)));
  for (int l = 0; l < sc.L(); ++l) CHECK(std::abs(std::abs(rep.x_star(l)) - 1.0) < 1e-15);
}

TEST_CASE("nullform sweep: each run descends and satisfies its own budget") {
  // the cross-E_R cost ordering is a trend at the published scenario scales
  // (exercised by the acceptance suite); at desk scale different E_R values
  // can land in different local optima, so only per-run properties are firm
  const ArrayScenario sc = scenario(4, 8, 12);
  const Band notch{1.05e9, 1.0625e9, 0.0};
  for (double er : {0.05, 0.2, 0.5}) {
    const SpectralMask mask = build_mask(sc, {notch}, er);
    SolverParams params;
    params.seed = 42;  // identical initializer across the sweep
    params.max_inner_iters = 300;
    const SolveReport rep = solve_nullform(sc, {30.0, 100.0}, mask, params);
    check_inner_descent(rep.trace);
    check_containment(rep.trace);
    double g_first = -1.0, g_last = -1.0;
    for (const TraceRow& r : rep.trace) {
      if (r.is_outer_row) continue;
      if (r.inner == 1) g_first = r.cost_g;
      g_last = r.cost_g;
    }
    CHECK(g_last <= g_first + 1e-9 * (1 + std::abs(g_first)));
    const TraceRow& last = rep.trace[rep.trace.size() - 1];
    CHECK(last.linear_slack >= -1e-8);
  }
}

TEST_CASE("beampattern solve with an all-zero desired pattern needs no phase refinement") {
  const ArrayScenario sc = scenario(2, 4, 6);
  const SteeringSet steering = make_steering_grid(sc);
  const SpectralMask mask = build_mask(sc, {}, 1.0);
  DesiredBeampattern desired;
  desired.d = MatrixXd::Zero(sc.K, sc.N);
  SolverParams params;
  params.seed = 17;
  const SolveReport rep = solve_beampattern(sc, steering, desired, mask, params);
  CHECK(rep.outer_converged);
  CHECK(rep.outer_iterations <= 2);  // phases are irrelevant when d = 0
}

TEST_CASE("desk-scale beampattern solve: outer trace non-increasing, modulus converges") {
  const ArrayScenario sc = scenario(4, 8, 12);
  const SteeringSet steering = make_steering_grid(sc);
  const SpectralMask mask = build_mask(sc, {}, 0.2);
  DesiredBeampattern desired = sector_pattern(sc, 40.0, 90.0);
  SolverParams params;
  params.seed = 33;
  params.max_outer_iters = 30;
  const SolveReport rep = solve_beampattern(sc, steering, desired, mask, params);

  check_inner_descent(rep.trace);
  check_containment(rep.trace);

  double fprime_prev = -1.0;
  bool first = true;
  for (const TraceRow& r : rep.trace) {
    if (!r.is_outer_row) continue;
    if (!first) CHECK(r.fprime <= fprime_prev + 1e-6);
    fprime_prev = r.fprime;
    first = false;
  }
  CHECK(rep.final_modulus_dev <= 1e-3);
  // projection to the unit circle barely moves the cost once converged
  CHECK(std::abs(rep.cost_post_projection - rep.cost_pre_projection) <=
        0.01 * std::max(rep.cost_pre_projection, 1e-12));
  CHECK(rep.warnings.empty());
}

TEST_CASE("nullform reports the achieved suppression") {
  const ArrayScenario sc = scenario(4, 8, 37);
  const SpectralMask mask = build_mask(sc, {Band{1.05e9, 1.075e9, 0.0}}, 0.1);
  SolverParams params;
  params.seed = 11;
  params.max_inner_iters = 300;
  const SolveReport rep = solve_nullform(sc, {60.0, 120.0}, mask, params);
  REQUIRE(rep.null_depth_db.size() == 2);
  for (double d : rep.null_depth_db) CHECK(d < 0.0);  // below the angular mean
  CHECK(rep.notch_depth_db < 0.0);                    // suppressed stop bin

  // cross-check the notch metric against a direct spectrum computation
  const MatrixXcd Y = dft_spectrum(sc, rep.x_star);
  const VectorXd prof = Y.cwiseAbs2().colwise().mean();
  double stop = 0, pass = 0;
  int ns = 0, np = 0;
  for (int p = sc.bin_min(); p <= sc.bin_max(); ++p) {
    if (mask.is_stop_bin(p)) { stop += prof(p + sc.N / 2); ++ns; }
    else { pass += prof(p + sc.N / 2); ++np; }
  }
  CHECK(rep.notch_depth_db ==
        doctest::Approx(10 * std::log10((stop / ns) / (pass / np))).epsilon(1e-10));
}

TEST_CASE("pre-projection output satisfies |x*|=1 exactly after projection") {
  const ArrayScenario sc = scenario(2, 4, 4);
  const SpectralMask mask = build_mask(sc, {}, 0.5);
  SolverParams params;
  params.seed = 9;
  const SolveReport rep = solve_nullform(sc, {45.0}, mask, params);
  for (int l = 0; l < sc.L(); ++l) {
    CHECK(std::abs(rep.x_star(l)) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("template-phase rotation mode is available and traces stay monotone") {
  const ArrayScenario sc = scenario(2, 8, 4);
  const SpectralMask mask = build_mask(sc, {Band{1.05e9, 1.08e9, 0.0}}, 1.5);
  SolverParams params;
  params.seed = 4;
  params.rotation = SpectralRotation::TemplatePhase;
  const SolveReport rep = solve_nullform(sc, {75.0}, mask, params);
  check_inner_descent(rep.trace);
  check_containment(rep.trace);
}

TEST_CASE("identical seeds give identical solves, different seeds differ") {
  const ArrayScenario sc = scenario(2, 4, 4);
  const SpectralMask mask = build_mask(sc, {}, 0.3);
  SolverParams params;
  params.seed = 1234;
  const SolveReport a = solve_nullform(sc, {30.0, 120.0}, mask, params);
  const SolveReport b = solve_nullform(sc, {30.0, 120.0}, mask, params);
  params.seed = 1235;
  const SolveReport c = solve_nullform(sc, {30.0, 120.0}, mask, params);
  CHECK((a.x_star - b.x_star).norm() == 0.0);
  CHECK((a.x_star - c.x_star).norm() > 1e-8);
}

TEST_CASE("tiny ridge triggers the modulus warning") {
  const ArrayScenario sc = scenario(2, 8, 4);
  const SpectralMask mask = build_mask(sc, {}, 0.05);
  SolverParams params;
  params.seed = 2;
  params.lambda = 1e-9;  // far too small to pull the iterates onto the circle
  params.max_inner_iters = 15;
  const SolveReport rep = solve_nullform(sc, {20.0, 70.0, 150.0}, mask, params);
  bool has_modulus_warning = false;
  for (const std::string& w : rep.warnings) {
    if (w.find("modulus deviation") != std::string::npos) has_modulus_warning = true;
  }
  CHECK(has_modulus_warning);
}

TEST_CASE("once an iterate is unit-modulus the next subproblem repeats it") {
  // with a zero quadratic the first iterate lands exactly on the circle;
  // the following subproblem has identical constraints and must return it
  const ArrayScenario sc = scenario(2, 8, 4);
  const SpectralMask mask = build_mask(sc, {}, 2.0);
  LiftedQP qp;
  qp.mode = QpMode::Nullform;
  qp.L = sc.L();
  qp.lambda = 0.7;
  qp.R = MatrixXd::Zero(2 * sc.L(), 2 * sc.L());
  SolverParams params;
  params.lambda = qp.lambda;
  params.max_inner_iters = 1;
  std::mt19937_64 rng(8);
  const VectorXcd x = oracle::random_complex(rng, sc.L());  // deliberately off the circle
  const InnerResult step1 = inner_loop(qp, mask, x, params);
  double dev1 = 0.0;
  for (int l = 0; l < sc.L(); ++l) {
    dev1 = std::max(dev1, std::abs(std::abs(step1.x_final(l)) - 1.0));
  }
  REQUIRE(dev1 <= 1e-10);
  const InnerResult step2 =
      inner_loop(qp, mask, step1.x_final, params, 0, step1.gamma_final);
  CHECK((step2.x_final - step1.x_final).lpNorm<Eigen::Infinity>() <= 1e-8);
}
