#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "amol/dynamics.hpp"

namespace amol {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

MeanFieldState random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0), ang(-kPi, kPi);
  MeanFieldState s{std::polar(u(rng), ang(rng)), std::polar(u(rng), ang(rng)),
                   std::polar(u(rng), ang(rng))};
  const double n = std::sqrt(s.norm());
  return {s.a / n, s.b_g / n, s.b_e / n};
}

double distance(const MeanFieldState& x, const MeanFieldState& y) {
  return std::sqrt(std::norm(x.a - y.a) + std::norm(x.b_g - y.b_g) + std::norm(x.b_e - y.b_e));
}

TEST(WrapPhase, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_phase(kPi), kPi);
  EXPECT_NEAR(wrap_phase(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_phase(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_phase(0.3 + 8.0 * kPi), 0.3, 1e-13);
}

TEST(Cartesian, StationaryStateRotatesWithChemicalPotential) {
  for (double z : {0.5, 1.0, 2.5}) {
    ModelParams p{.z = z, .rho = 1.0};
    const GroundSolution g = ground_state_analytic(z, 1.0, 0.0);
    const MeanFieldState d = eom_cartesian(g.state, p);
    const cd mi(0.0, -g.mu);
    EXPECT_LT(std::abs(d.a - mi * g.state.a), 1e-14);
    EXPECT_LT(std::abs(d.b_g - 2.0 * mi * g.state.b_g), 1e-14);
    EXPECT_LT(std::abs(d.b_e - 2.0 * mi * g.state.b_e), 1e-14);
  }
}

TEST(Cartesian, HandEvaluatedRates) {
  ModelParams p{.delta = 0.5, .z = 2.0, .rho = 1.0, .phi = kPi / 2.0};
  const MeanFieldState s{cd(0.5, 0.0), cd(0.0, 0.5), cd(0.5, 0.0)};
  const MeanFieldState d = eom_cartesian(s, p);
  // i da = 2 rho e^{i pi/2} a* b_e = 0.5 i
  EXPECT_LT(std::abs(d.a - cd(0.5, 0.0)), 1e-15);
  // i db_g = 0.5 * 0.5i + 2 * 0.5 = 1 + 0.25i
  EXPECT_LT(std::abs(d.b_g - cd(0.25, -1.0)), 1e-15);
  // i db_e = -i * 0.25 + 2 * 0.5i + 0.25 = 0.25 + 0.75i
  EXPECT_LT(std::abs(d.b_e - cd(0.75, -0.25)), 1e-15);
}

TEST(Canonical, RoundTripOnRandomStates) {
  std::mt19937 rng(11);
  for (int k = 0; k < 200; ++k) {
    const MeanFieldState s = random_state(rng);
    EXPECT_LT(distance(amplitudes_from_canonical(canonical_from_amplitudes(s)), s), 1e-12);
  }
  EXPECT_THROW(canonical_from_amplitudes({0.0, 0.5, -0.5}), SingularCoordinates);
}

TEST(Canonical, GroundFixedPointIsStationary) {
  ModelParams p{.z = 1.0, .rho = 1.0};
  const CanonicalState c = ground_fixed_point(1.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(c.p1, 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(c.p2, 3.0 / 16.0);
  const CanonicalRates r = hamilton_rhs(c, p);
  EXPECT_NEAR(r.dp1, 0.0, 1e-14);
  EXPECT_NEAR(r.dq1, 0.0, 1e-14);
  EXPECT_NEAR(r.dp2, 0.0, 1e-14);
  EXPECT_NEAR(r.dq2, 0.0, 1e-14);
  EXPECT_NEAR(r.dlambda, std::numbers::sqrt3 / 2.0, 1e-14);

  const CanonicalState from_amp = canonical_from_amplitudes(ground_state_analytic(1.0, 1.0, 0.0).state);
  EXPECT_NEAR(from_amp.p1, c.p1, 1e-15);
  EXPECT_NEAR(from_amp.p2, c.p2, 1e-15);
  EXPECT_NEAR(std::cos(from_amp.q1 - c.q1), 1.0, 1e-14);
  EXPECT_NEAR(std::cos(from_amp.q2 - c.q2), 1.0, 1e-14);
}

TEST(Canonical, PhaseRateVanishesAtQuarterTurn) {
  ModelParams p{.z = 1.0, .rho = 1.0, .phi = 0.4};
  CanonicalState c{0.1, 0.3, 0.2, kPi / 2.0 - 0.4, 0.0};
  EXPECT_NEAR(hamilton_rhs(c, p).dlambda, 0.0, 1e-15);
}

TEST(Canonical, RatesMatchCartesianEquations) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    ModelParams p{.delta = u(rng) - 1.0, .z = u(rng), .rho = 0.3 + u(rng), .phi = u(rng) * kPi};
    const MeanFieldState s = random_state(rng);
    const MeanFieldState d = eom_cartesian(s, p);
    const double la = (d.a / s.a).imag();
    const CanonicalRates r = hamilton_rhs(canonical_from_amplitudes(s), p);
    EXPECT_NEAR(r.dp1, 2.0 * std::real(std::conj(s.b_g) * d.b_g), 1e-12);
    EXPECT_NEAR(r.dp2, 2.0 * std::real(std::conj(s.b_e) * d.b_e), 1e-12);
    EXPECT_NEAR(r.dq1, (d.b_g / s.b_g).imag() - 2.0 * la, 1e-11);
    EXPECT_NEAR(r.dq2, (d.b_e / s.b_e).imag() - 2.0 * la, 1e-11);
    EXPECT_NEAR(r.dlambda, la, 1e-11);
    EXPECT_NEAR(canonical_energy(canonical_from_amplitudes(s), p), classical_energy(s, p), 1e-13);
  }
}

TEST(Canonical, RejectsVanishingPopulations) {
  ModelParams p;
  EXPECT_THROW(hamilton_rhs({0.0, 0.0, 0.2, 0.0, 0.0}, p), SingularCoordinates);
  EXPECT_THROW(hamilton_rhs({0.2, 0.0, 1e-13, 0.0, 0.0}, p), SingularCoordinates);
}

TEST(Propagation, StaticPhaseConservesEnergyAndNorm) {
  std::mt19937 rng(3);
  for (int k = 0; k < 3; ++k) {
    ModelParams p{.delta = 0.2 * k, .z = 0.8 + 0.6 * k, .rho = 1.0, .phi = 0.7 * k};
    const MeanFieldState s = random_state(rng);
    const double e0 = classical_energy(s, p);
    PropagationOptions opts;
    opts.samples = 101;
    const Propagation run = propagate(s, p, PhaseRamp{p.phi, 0.0}, 100.0, opts);
    ASSERT_EQ(run.samples.size(), 101u);
    for (const auto& smp : run.samples) {
      EXPECT_NEAR(smp.state.norm(), 1.0, 1e-8);
      MeanFieldState x = smp.state;
      const double n = std::sqrt(x.norm());
      x = {x.a / n, x.b_g / n, x.b_e / n};
      EXPECT_NEAR(classical_energy(x, p), e0, 1e-8);
    }
    EXPECT_LE(run.max_norm_drift, 1e-8);
  }
}

TEST(Propagation, GaugeRotationCommutesWithEvolution) {
  std::mt19937 rng(9);
  ModelParams p{.delta = 0.3, .z = 1.2, .rho = 1.0};
  const PhaseRamp ramp{0.0, 2.0 * kPi / 50.0};
  for (double theta : {0.4, 1.9, -2.5}) {
    const MeanFieldState s = random_state(rng);
    const MeanFieldState x = propagate(apply_gauge(s, theta), p, ramp, 50.0).final_state;
    const MeanFieldState y = apply_gauge(propagate(s, p, ramp, 50.0).final_state, theta);
    EXPECT_LT(distance(x, y), 1e-8);
  }
}

TEST(Propagation, RejectsNegativeTime) {
  EXPECT_THROW(propagate({1.0, 0.0, 0.0}, ModelParams{}, PhaseRamp{}, -1.0), InvalidParameter);
}

TEST(Loop, MixedPhaseCarriesGeometricPhaseNearPiOverThree) {
  for (double z : {0.5, 1.0, 1.5}) {
    const LoopResult r = integrate_loop(ModelParams{.z = z, .rho = 1.0}, 500.0);
    EXPECT_LE(std::abs(r.lambda_g - kPi / 3.0), 0.02) << z;
    EXPECT_LE(r.max_norm_drift, 1e-8);
    EXPECT_DOUBLE_EQ(r.lambda_dynamic, -r.mu0 * 500.0);
  }
}

TEST(Loop, MoleculePhaseHasNoGeometricPhase) {
  for (double z : {2.5, 3.0}) {
    const LoopResult r = integrate_loop(ModelParams{.z = z, .rho = 1.0}, 500.0);
    EXPECT_LE(std::abs(r.lambda_g), 1e-6) << z;
    EXPECT_LE(r.max_norm_drift, 1e-8);
  }
}

TEST(Loop, ErrorShrinksWithPeriodAndGrowsNearCritical) {
  double previous = 1.0;
  for (double period : {100.0, 500.0, 2000.0}) {
    const double err = std::abs(integrate_loop(ModelParams{.z = 1.0, .rho = 1.0}, period).lambda_g -
                                kPi / 3.0);
    EXPECT_LT(err, previous) << period;
    previous = err;
  }
  const double near = std::abs(integrate_loop(ModelParams{.z = 1.95, .rho = 1.0}, 500.0).lambda_g - kPi / 3.0);
  const double far = std::abs(integrate_loop(ModelParams{.z = 1.0, .rho = 1.0}, 500.0).lambda_g - kPi / 3.0);
  EXPECT_GT(near, far);
}

TEST(Loop, CanonicalRouteAgreesWithCartesian) {
  ModelParams p{.z = 1.0, .rho = 1.0};
  const LoopResult a = integrate_loop(p, 100.0);
  const LoopResult b = integrate_loop_canonical(p, 100.0);
  EXPECT_NEAR(a.lambda_total, b.lambda_total, 1e-6);
  EXPECT_NEAR(a.p1_mean, b.p1_mean, 1e-6);
}

TEST(Loop, SamplesSpanThePeriod) {
  LoopOptions opts;
  opts.samples = 11;
  const LoopResult r = integrate_loop(ModelParams{.z = 1.0, .rho = 1.0}, 100.0, opts);
  ASSERT_EQ(r.trajectory.size(), 11u);
  EXPECT_DOUBLE_EQ(r.trajectory.front().t, 0.0);
  EXPECT_NEAR(r.trajectory.back().t, 100.0, 1e-9);
  EXPECT_NEAR(r.trajectory.back().lambda, r.lambda_total, 1e-12);
  EXPECT_THROW(integrate_loop(ModelParams{}, 0.0), InvalidParameter);
}

TEST(BerryPhase, LinearizedReferenceValues) {
  EXPECT_NEAR(berry_phase_linearized(0.0, 1.0), kPi / 3.0, 1e-12);
  EXPECT_NEAR(berry_phase_linearized(1.0, 1.0), kPi / 2.0, 1e-12);
  EXPECT_NEAR(berry_phase_linearized(2.0, 1.0), kPi, 1e-12);
  EXPECT_NEAR(berry_phase_linearized(1.5, 1.5), kPi / 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(berry_phase_linearized(2.1, 1.0)));
  EXPECT_TRUE(std::isnan(berry_phase_linearized(-0.1, 1.0)));
}

TEST(BerryPhase, DeviatesFromDynamicPhaseIncreasinglyWithCoupling) {
  double previous = -1.0;
  for (double z : {0.5, 1.0, 1.5}) {
    const double lg = integrate_loop(ModelParams{.z = z, .rho = 1.0}, 2000.0).lambda_g;
    const double gap = std::abs(berry_phase_linearized(z, 1.0) - lg);
    EXPECT_GT(gap, previous) << z;
    previous = gap;
  }
}

TEST(Adiabatic, FirstOrderPhaseRateIsOneSixthOfDrive) {
  for (double z : {0.3, 0.9, 1.4, 1.8}) {
    const CanonicalState c = ground_fixed_point(z, 1.0, 0.0);
    for (double rate : {1e-3, 0.02}) {
      const double dp2 = adiabatic_population_shift(c.p1, c.p2, z, 1.0, rate);
      const double l1 = first_order_phase_rate(c.p1, c.p2, z, 1.0, dp2);
      EXPECT_NEAR(l1, rate / 6.0, 1e-12 * (1.0 + rate)) << z;
    }
  }
}

TEST(Adiabatic, PopulationShiftMatchesDrivenLoopAverage) {
  for (double z : {0.5, 1.0, 1.5}) {
    const double period = 4000.0;
    LoopOptions opts;
    opts.samples = 40001;
    const LoopResult r = integrate_loop(ModelParams{.z = z, .rho = 1.0}, period, opts);
    double avg = 0.0;
    for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
      avg += 0.5 * (r.trajectory[i].t - r.trajectory[i - 1].t) *
             (std::norm(r.trajectory[i].state.b_e) + std::norm(r.trajectory[i - 1].state.b_e));
    }
    avg /= period;
    const CanonicalState c = ground_fixed_point(z, 1.0, 0.0);
    const double predicted = adiabatic_population_shift(c.p1, c.p2, z, 1.0, 2.0 * kPi / period);
    EXPECT_NEAR((avg - c.p2) / predicted, 1.0, 0.05) << z;
  }
}

}  // namespace
}  // namespace amol
