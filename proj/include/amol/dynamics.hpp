#pragma once

// Nonlinear mean-field evolution, canonical (population, phase) variables,
// and the adiabatic geometric phase acquired on a loop phi: 0 -> 2 pi.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amol/dormand_prince.hpp"
#include "amol/errors.hpp"
#include "amol/meanfield.hpp"
#include "amol/model_params.hpp"

namespace amol {

/// Reduce an angle to (-pi, pi].
inline double wrap_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(x, two_pi);
  if (r > std::numbers::pi) r -= two_pi;
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

namespace detail {

inline MeanFieldState mean_field_rates(const MeanFieldState& s, const ModelParams& p, double phi) {
  const cplx minus_i(0.0, -1.0);
  return {minus_i * (2.0 * std::polar(p.rho, phi) * std::conj(s.a) * s.b_e),
          minus_i * (p.delta * s.b_g + p.z * s.b_e),
          minus_i * (std::polar(p.rho, -phi) * s.a * s.a + p.z * s.b_g + p.delta * s.b_e)};
}

using CartesianVector = Eigen::Matrix<double, 6, 1>;
using CanonicalVector = Eigen::Matrix<double, 5, 1>;

inline CartesianVector pack(const MeanFieldState& s) {
  CartesianVector v;
  v << s.a.real(), s.a.imag(), s.b_g.real(), s.b_g.imag(), s.b_e.real(), s.b_e.imag();
  return v;
}

inline MeanFieldState unpack(const CartesianVector& v) {
  return {{v(0), v(1)}, {v(2), v(3)}, {v(4), v(5)}};
}

}  // namespace detail

/// Time derivative of (a, b_g, b_e):
///   i da/dt    = 2 rho e^{i phi} a* b_e
///   i db_g/dt  = delta b_g + z b_e
///   i db_e/dt  = rho e^{-i phi} a^2 + z b_g + delta b_e
inline MeanFieldState eom_cartesian(const MeanFieldState& s, const ModelParams& p) {
  return detail::mean_field_rates(s, p, p.phi);
}

// ---------------------------------------------------------------------------
// Canonical variables

/// p1 = |b_g|^2, p2 = |b_e|^2, q_i = arg(b_i) - 2 arg(a), lambda = arg(a).
struct CanonicalState {
  double p1 = 0.0;
  double q1 = 0.0;
  double p2 = 0.0;
  double q2 = 0.0;
  double lambda = 0.0;
};

struct CanonicalRates {
  double dp1 = 0.0;
  double dq1 = 0.0;
  double dp2 = 0.0;
  double dq2 = 0.0;
  double dlambda = 0.0;
};

inline CanonicalState canonical_from_amplitudes(const MeanFieldState& s) {
  if (std::abs(s.a) <= 1e-150) {
    throw SingularCoordinates("relative phases are undefined when a = 0");
  }
  const double lam = std::arg(s.a);
  return {std::norm(s.b_g), wrap_phase(std::arg(s.b_g) - 2.0 * lam), std::norm(s.b_e),
          wrap_phase(std::arg(s.b_e) - 2.0 * lam), lam};
}

inline MeanFieldState amplitudes_from_canonical(const CanonicalState& c) {
  const double a2 = std::max(0.0, 1.0 - 2.0 * (c.p1 + c.p2));
  return {std::polar(std::sqrt(a2), c.lambda),
          std::polar(std::sqrt(std::max(c.p1, 0.0)), 2.0 * c.lambda + c.q1),
          std::polar(std::sqrt(std::max(c.p2, 0.0)), 2.0 * c.lambda + c.q2)};
}

/// Populations below this make the canonical equations singular.
inline constexpr double kPopulationFloor = 1e-12;

/// Classical Hamiltonian in canonical variables,
///   H = delta (p1 + p2) + 2 z sqrt(p1 p2) cos(q1 - q2)
///       + 2 rho sqrt(p2) (1 - 2 (p1 + p2)) cos(q2 + phi).
inline double canonical_energy(const CanonicalState& c, const ModelParams& p) {
  return p.delta * (c.p1 + c.p2) + 2.0 * p.z * std::sqrt(c.p1 * c.p2) * std::cos(c.q1 - c.q2) +
         2.0 * p.rho * std::sqrt(c.p2) * (1.0 - 2.0 * (c.p1 + c.p2)) * std::cos(c.q2 + p.phi);
}

/// Equations of motion in canonical variables. With i d(beta)/dt = dH/d(beta*)
/// the pairs (p_i, q_i) evolve as dp_i/dt = +dH/dq_i, dq_i/dt = -dH/dp_i,
/// and dlambda/dt = -2 rho sqrt(p2) cos(q2 + phi).
inline CanonicalRates hamilton_rhs(const CanonicalState& c, const ModelParams& p) {
  if (c.p1 < kPopulationFloor || c.p2 < kPopulationFloor) {
    throw SingularCoordinates("canonical equations are singular at vanishing molecular population");
  }
  const double r1 = std::sqrt(c.p1), r2 = std::sqrt(c.p2);
  const double atoms = 1.0 - 2.0 * (c.p1 + c.p2);
  const double c12 = std::cos(c.q1 - c.q2), s12 = std::sin(c.q1 - c.q2);
  const double cp = std::cos(c.q2 + p.phi), sp = std::sin(c.q2 + p.phi);

  const double dh_dq1 = -2.0 * p.z * r1 * r2 * s12;
  const double dh_dq2 = 2.0 * p.z * r1 * r2 * s12 - 2.0 * p.rho * r2 * atoms * sp;
  const double dh_dp1 = p.delta + p.z * (r2 / r1) * c12 - 4.0 * p.rho * r2 * cp;
  const double dh_dp2 = p.delta + p.z * (r1 / r2) * c12 + p.rho * atoms * cp / r2 -
                        4.0 * p.rho * r2 * cp;
  return {dh_dq1, -dh_dp1, dh_dq2, -dh_dp2, -2.0 * p.rho * r2 * cp};
}

// ---------------------------------------------------------------------------
// Propagation

/// phi(t) = phi0 + rate * t
struct PhaseRamp {
  double phi0 = 0.0;
  double rate = 0.0;
  double at(double t) const noexcept { return phi0 + rate * t; }
};

struct TrajectorySample {
  double t = 0.0;
  double phi = 0.0;
  MeanFieldState state;
  double lambda = 0.0;  ///< accumulated total phase
};

struct PropagationOptions {
  StepControl control;
  /// Number of equally spaced samples over [0, t_end] including both ends; 0 disables.
  int samples = 0;
  /// Below this |a|^2 the total phase is tracked through arg(b_g) / 2.
  double population_floor = kPopulationFloor;
  /// Norm drift that aborts the integration.
  double norm_failure = 1e-6;
};

struct Propagation {
  MeanFieldState final_state;
  double lambda_change = 0.0;
  double max_norm_drift = 0.0;
  double p1_time_average = 0.0;
  long steps = 0;
  std::vector<TrajectorySample> samples;
};

/// Integrate the Cartesian equations from t = 0 to t_end, accumulating the
/// total phase step by step.
inline Propagation propagate(const MeanFieldState& initial, const ModelParams& params,
                             const PhaseRamp& ramp, double t_end,
                             const PropagationOptions& opts = {}) {
  if (!(t_end >= 0.0)) throw InvalidParameter("propagation time must be non-negative");
  using detail::CartesianVector;
  auto rhs = [&](double t, const CartesianVector& y) {
    return detail::pack(detail::mean_field_rates(detail::unpack(y), params, ramp.at(t)));
  };

  Propagation out;
  double lambda = 0.0;
  double p1_integral = 0.0;
  const double norm0 = initial.norm();

  auto on_step = [&](double t0, const CartesianVector& y0, double t1, const CartesianVector& y1) {
    const MeanFieldState s0 = detail::unpack(y0), s1 = detail::unpack(y1);
    double increment;
    double factor = 1.0;
    if (std::norm(s0.a) > opts.population_floor && std::norm(s1.a) > opts.population_floor) {
      increment = std::arg(s1.a * std::conj(s0.a));
    } else if (std::norm(s0.b_g) > opts.population_floor && std::norm(s1.b_g) > opts.population_floor) {
      increment = std::arg(s1.b_g * std::conj(s0.b_g));
      factor = 0.5;
    } else {
      increment = std::arg(s1.b_e * std::conj(s0.b_e));
      factor = 0.5;
    }
    if (std::abs(increment) >= std::numbers::pi / 2.0) {
      throw StepSizeError("phase advanced by " + std::to_string(increment) +
                          " rad in one step at t = " + std::to_string(t1) + "; lower h_max");
    }
    lambda += factor * increment;
    const double drift = std::abs(s1.norm() - norm0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
    if (drift > opts.norm_failure) {
      throw IntegrationFailure("normalization drifted by " + std::to_string(drift) +
                               " at t = " + std::to_string(t1));
    }
    p1_integral += 0.5 * (t1 - t0) * (std::norm(s0.b_g) + std::norm(s1.b_g));
  };

  DormandPrince54<CartesianVector> stepper(opts.control);
  CartesianVector y = detail::pack(initial);
  double t = 0.0;
  auto record = [&]() { out.samples.push_back({t, ramp.at(t), detail::unpack(y), lambda}); };

  if (opts.samples >= 2) {
    record();
    for (int k = 1; k < opts.samples; ++k) {
      const double target = t_end * static_cast<double>(k) / (opts.samples - 1);
      stepper.advance(rhs, t, y, target, on_step);
      record();
    }
  } else {
    stepper.advance(rhs, t, y, t_end, on_step);
  }
  out.final_state = detail::unpack(y);
  out.lambda_change = lambda;
  out.p1_time_average = t_end > 0.0 ? p1_integral / t_end : std::norm(initial.b_g);
  out.steps = stepper.accepted();
  return out;
}

// ---------------------------------------------------------------------------
// Adiabatic loop

struct LoopOptions {
  StepControl control;
  int samples = 0;
  double population_floor = kPopulationFloor;
};

struct LoopResult {
  double period = 0.0;
  double mu0 = 0.0;
  double lambda_total = 0.0;    ///< unwrapped total phase gained over the loop
  double lambda_dynamic = 0.0;  ///< -mu0 T
  double lambda_g = 0.0;        ///< (lambda_total - lambda_dynamic) reduced to (-pi, pi]
  double max_norm_drift = 0.0;
  /// Time-averaged ground-molecule population |b_g|^2 over the loop.
  double p1_mean = 0.0;
  std::vector<TrajectorySample> trajectory;
};

/// Start in the phi = 0 ground state and ramp phi linearly from 0 to 2 pi over
/// the period.
inline LoopResult integrate_loop(const ModelParams& params, double period,
                                 const LoopOptions& opts = {}) {
  if (!(period > 0.0)) throw InvalidParameter("loop period must be positive");
  ModelParams start = params;
  start.phi = 0.0;
  start.validate_couplings();
  const GroundSolution ground = ground_state(start);

  PropagationOptions popts;
  popts.control = opts.control;
  popts.samples = opts.samples;
  popts.population_floor = opts.population_floor;
  const PhaseRamp ramp{0.0, 2.0 * std::numbers::pi / period};
  Propagation run = propagate(ground.state, start, ramp, period, popts);

  LoopResult out;
  out.period = period;
  out.mu0 = ground.mu;
  out.lambda_total = run.lambda_change;
  out.lambda_dynamic = -ground.mu * period;
  out.lambda_g = wrap_phase(out.lambda_total - out.lambda_dynamic);
  out.max_norm_drift = run.max_norm_drift;
  out.p1_mean = run.p1_time_average;
  out.trajectory = std::move(run.samples);
  return out;
}

/// Same loop integrated in canonical variables (requires p1, p2 away from 0
/// and a != 0 throughout).
inline LoopResult integrate_loop_canonical(const ModelParams& params, double period,
                                           const LoopOptions& opts = {}) {
  if (!(period > 0.0)) throw InvalidParameter("loop period must be positive");
  using detail::CanonicalVector;
  ModelParams start = params;
  start.phi = 0.0;
  start.validate_couplings();
  const GroundSolution ground = ground_state(start);
  const CanonicalState c0 = canonical_from_amplitudes(ground.state);
  const double rate = 2.0 * std::numbers::pi / period;

  auto to_state = [](const CanonicalVector& v) { return CanonicalState{v(0), v(1), v(2), v(3), v(4)}; };
  auto rhs = [&](double t, const CanonicalVector& v) {
    ModelParams p = start;
    p.phi = rate * t;
    const CanonicalRates r = hamilton_rhs(to_state(v), p);
    CanonicalVector d;
    d << r.dp1, r.dq1, r.dp2, r.dq2, r.dlambda;
    return d;
  };

  LoopResult out;
  out.period = period;
  out.mu0 = ground.mu;
  double p1_integral = 0.0;
  auto on_step = [&](double t0, const CanonicalVector& y0, double t1, const CanonicalVector& y1) {
    p1_integral += 0.5 * (t1 - t0) * (y0(0) + y1(0));
  };

  CanonicalVector y;
  y << c0.p1, c0.q1, c0.p2, c0.q2, c0.lambda;
  double t = 0.0;
  DormandPrince54<CanonicalVector> stepper(opts.control);
  auto record = [&]() {
    const CanonicalState c = to_state(y);
    out.trajectory.push_back({t, rate * t, amplitudes_from_canonical(c), c.lambda - c0.lambda});
  };
  if (opts.samples >= 2) {
    record();
    for (int k = 1; k < opts.samples; ++k) {
      stepper.advance(rhs, t, y, period * static_cast<double>(k) / (opts.samples - 1), on_step);
      record();
    }
  } else {
    stepper.advance(rhs, t, y, period, on_step);
  }
  out.lambda_total = y(4) - c0.lambda;
  out.lambda_dynamic = -ground.mu * period;
  out.lambda_g = wrap_phase(out.lambda_total - out.lambda_dynamic);
  out.p1_mean = p1_integral / period;
  return out;
}

// ---------------------------------------------------------------------------
// Analytic references

/// Berry-formula phase of the mixed-phase ground state, (pi/6)(2 + z^2/rho^2).
/// NaN outside 0 <= z <= 2 rho.
inline double berry_phase_linearized(double z, double rho) {
  if (!(rho > 0.0) || z < 0.0 || z > 2.0 * rho) return std::nan("");
  return std::numbers::pi / 6.0 * (2.0 + z * z / (rho * rho));
}

/// Mixed-phase ground fixed point in canonical variables at the given phi.
inline CanonicalState ground_fixed_point(double z, double rho, double phi) {
  return {z * z / (16.0 * rho * rho), wrap_phase(-phi), (z * z + 8.0 * rho * rho) / (48.0 * rho * rho),
          wrap_phase(std::numbers::pi - phi), 0.0};
}

/// First-order population response delta p2 of the slowly driven ground
/// state, proportional to dphi/dt.
inline double adiabatic_population_shift(double p1, double p2, double z, double rho,
                                         double phi_rate) {
  const double p1_32 = std::pow(p1, 1.5);
  return 2.0 * std::sqrt(p2) * (z * p2 + z * p1 - 4.0 * rho * p1_32) /
         (rho * (z * (1.0 + 6.0 * p2 + 6.0 * p1) - 16.0 * rho * p1_32)) * phi_rate;
}

/// First-order term of dlambda/dt given the fixed point and delta p2.
inline double first_order_phase_rate(double p1, double p2, double z, double rho,
                                     double delta_p2) {
  return (-2.0 * p2 * std::sqrt(p1) * z + rho * (p2 * (6.0 * p2 + 6.0 * p1 - 1.0) + delta_p2)) /
         std::sqrt(p2);
}

}  // namespace amol
