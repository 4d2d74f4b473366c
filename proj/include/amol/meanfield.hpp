#pragma once

// Mean-field (N -> infinity) description. The amplitudes (a, b_g, b_e)
// obey |a|^2 + 2 (|b_g|^2 + |b_e|^2) = 1 since each molecule holds two atoms.
// Stationary states solve the nonlinear eigenproblem
//
//   H_mf(a) psi = diag(mu, 2 mu, 2 mu) psi,
//
//   H_mf = [ 0                 0      2 rho e^{i phi} a* ]
//          [ 0                 delta  z                  ]
//          [ rho e^{-i phi} a  z      delta              ]
//
// Energies are in the same unit as rho.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amol/errors.hpp"
#include "amol/model_params.hpp"

namespace amol {

using cplx = std::complex<double>;

struct MeanFieldState {
  cplx a;
  cplx b_g;
  cplx b_e;

  double norm() const noexcept {
    return std::norm(a) + 2.0 * (std::norm(b_g) + std::norm(b_e));
  }
};

struct GroundSolution {
  MeanFieldState state;
  double mu = 0.0;      ///< chemical potential
  double energy = 0.0;  ///< classical energy
};

inline constexpr double kNormTolerance = 1e-9;

/// Gauge rotation U(theta) = diag(e^{i theta}, e^{2 i theta}, e^{2 i theta}).
inline MeanFieldState apply_gauge(const MeanFieldState& s, double theta) {
  const cplx one = std::polar(1.0, theta);
  const cplx two = std::polar(1.0, 2.0 * theta);
  return {s.a * one, s.b_g * two, s.b_e * two};
}

inline double critical_point(double rho, double delta) { return 2.0 * rho + delta; }

/// Linearized atomic population |a|^2 near z_c (delta = 0, rho = 1 units).
inline double s0_asymptotic(double z, double z_c) {
  return (4.0 - z_c * (2.0 * z - z_c)) / 6.0;
}

/// E = delta (|b_e|^2 + |b_g|^2) + 2 z Re(b_e* b_g) + 2 rho Re(e^{-i phi} b_e* a^2)
inline double classical_energy(const MeanFieldState& s, const ModelParams& p) {
  if (std::abs(s.norm() - 1.0) > kNormTolerance) {
    throw InvalidParameter("classical_energy: state is not normalized (norm " +
                           std::to_string(s.norm()) + ")");
  }
  return p.delta * (std::norm(s.b_e) + std::norm(s.b_g)) +
         2.0 * p.z * std::real(std::conj(s.b_e) * s.b_g) +
         2.0 * p.rho * std::real(std::polar(1.0, -p.phi) * std::conj(s.b_e) * s.a * s.a);
}

/// H_mf(a) psi - Theta(mu) psi
inline std::array<cplx, 3> eigen_residual_vector(const MeanFieldState& s, double mu,
                                                 const ModelParams& p) {
  const cplx up = std::polar(p.rho, p.phi);
  const cplx down = std::polar(p.rho, -p.phi);
  return {2.0 * up * std::conj(s.a) * s.b_e - mu * s.a,
          p.delta * s.b_g + p.z * s.b_e - 2.0 * mu * s.b_g,
          down * s.a * s.a + p.z * s.b_g + p.delta * s.b_e - 2.0 * mu * s.b_e};
}

inline double eigen_residual(const MeanFieldState& s, double mu, const ModelParams& p) {
  const auto r = eigen_residual_vector(s, mu, p);
  return std::sqrt(std::norm(r[0]) + std::norm(r[1]) + std::norm(r[2]));
}

/// Closed-form ground state at delta = 0.
///
///   z >= 2 rho:  psi = (0, 1/2, -1/2),  mu = -z/2
///   z <  2 rho:  psi = (sqrt((4 - z^2/rho^2)/6), z/(4 rho) e^{-i phi},
///                       -sqrt(z^2 + 8 rho^2)/(4 sqrt3 rho) e^{-i phi}),
///                mu = -sqrt(z^2 + 8 rho^2) / (2 sqrt3)
inline GroundSolution ground_state_analytic(double z, double rho, double phi) {
  if (z < 0.0) throw InvalidParameter("ground_state_analytic requires z >= 0");
  ModelParams p;
  p.z = z;
  p.rho = rho;
  p.phi = phi;
  p.validate_couplings();

  GroundSolution out;
  if (z >= 2.0 * rho) {
    out.state = {0.0, 0.5, -0.5};
    out.mu = -z / 2.0;
  } else {
    const double root = std::sqrt(z * z + 8.0 * rho * rho);
    const cplx rot = std::polar(1.0, -phi);
    out.state = {std::sqrt((4.0 - z * z / (rho * rho)) / 6.0), z / (4.0 * rho) * rot,
                 -root / (4.0 * std::numbers::sqrt3 * rho) * rot};
    out.mu = -root / (2.0 * std::numbers::sqrt3);
  }
  out.energy = classical_energy(out.state, p);
  return out;
}

/// Closed-form mixed-phase ground energy at delta = 0 (z <= 2 rho).
inline double mixed_phase_energy(double z, double rho) {
  return -std::pow(z * z + 8.0 * rho * rho, 1.5) / (24.0 * std::numbers::sqrt3 * rho * rho);
}

struct NumericOptions {
  int angle_starts = 3;  ///< starts per sign pattern
  int max_iterations = 500;
  double residual_target = 1e-10;
};

namespace detail {

// Real states with a >= 0 parametrized on the normalization ellipsoid:
//   a = cos(alpha), b_g = sin(alpha) cos(beta) / sqrt2, b_e = sin(alpha) sin(beta) / sqrt2
struct AngleEnergy {
  double delta, z, rho;

  double value(double al, double be) const {
    const double a = std::cos(al);
    const double m = std::sin(al) / std::numbers::sqrt2;
    const double y = m * std::cos(be), v = m * std::sin(be);
    return delta * (y * y + v * v) + 2.0 * z * y * v + 2.0 * rho * v * a * a;
  }

  Eigen::Vector2d gradient(double al, double be) const {
    const double ca = std::cos(al), sa = std::sin(al);
    const double cb = std::cos(be), sb = std::sin(be);
    // E = delta sa^2/2 + z sa^2 sin(2 be)/2 + sqrt2 rho sa ca^2 sb
    const double d_al = delta * sa * ca + z * sa * ca * std::sin(2.0 * be) +
                        std::numbers::sqrt2 * rho * sb * (ca * ca * ca - 2.0 * sa * sa * ca);
    const double d_be = z * sa * sa * std::cos(2.0 * be) + std::numbers::sqrt2 * rho * sa * ca * ca * cb;
    return {d_al, d_be};
  }
};

// Quasi-Newton (BFGS) descent on the angle parametrization.
inline Eigen::Vector2d bfgs_minimize(const AngleEnergy& f, Eigen::Vector2d x, int max_iter) {
  Eigen::Matrix2d inv_hess = Eigen::Matrix2d::Identity();
  Eigen::Vector2d g = f.gradient(x(0), x(1));
  double fx = f.value(x(0), x(1));
  for (int it = 0; it < max_iter && g.norm() > 1e-13; ++it) {
    Eigen::Vector2d dir = -inv_hess * g;
    if (dir.dot(g) >= 0.0) {
      inv_hess.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    Eigen::Vector2d xn;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * dir;
      fn = f.value(xn(0), xn(1));
      if (fn <= fx + 1e-4 * step * dir.dot(g)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::Vector2d gn = f.gradient(xn(0), xn(1));
    const Eigen::Vector2d s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double r = 1.0 / sy;
      const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
      inv_hess = (id - r * s * y.transpose()) * inv_hess * (id - r * y * s.transpose()) +
                 r * s * s.transpose();
    }
    x = xn;
    g = gn;
    fx = fn;
  }
  return x;
}

// Newton polish of the real mixed-phase stationarity system in (a, y, v, mu).
inline bool polish_mixed(double delta, double z, double rho, Eigen::Vector4d& x) {
  for (int it = 0; it < 100; ++it) {
    const double a = x(0), y = x(1), v = x(2), mu = x(3);
    Eigen::Vector4d f(2.0 * rho * v - mu, delta * y + z * v - 2.0 * mu * y,
                      rho * a * a + z * y + delta * v - 2.0 * mu * v,
                      a * a + 2.0 * (y * y + v * v) - 1.0);
    if (f.norm() < 1e-15) return true;
    Eigen::Matrix4d j;
    j << 0.0, 0.0, 2.0 * rho, -1.0,
         0.0, delta - 2.0 * mu, z, -2.0 * y,
         2.0 * rho * a, z, delta - 2.0 * mu, -2.0 * v,
         2.0 * a, 4.0 * y, 4.0 * v, 0.0;
    const Eigen::Vector4d dx = j.fullPivLu().solve(-f);
    if (!dx.allFinite()) return false;
    x += dx;
    if (dx.norm() < 1e-16) return true;
  }
  return true;
}

}  // namespace detail

/// Ground state for arbitrary delta by minimizing the classical energy.
/// phi is restored afterwards through the gauge b_{g,e} -> e^{-i phi} b_{g,e}.
inline GroundSolution ground_state_numeric(const ModelParams& params,
                                           const NumericOptions& opts = {}) {
  params.validate_couplings();
  ModelParams real_params = params;
  real_params.phi = 0.0;
  const detail::AngleEnergy energy{params.delta, params.z, params.rho};

  std::vector<GroundSolution> candidates;

  // Pure molecule fixed point: a = 0 and (b_g, b_e) the lower eigenvector of
  // [[delta, z], [z, delta]] scaled to norm 1/2.
  {
    GroundSolution pure;
    const double sign = params.z >= 0.0 ? -1.0 : 1.0;
    pure.state = {0.0, 0.5, 0.5 * sign};
    pure.mu = (params.delta - std::abs(params.z)) / 2.0;
    pure.energy = classical_energy(pure.state, real_params);
    candidates.push_back(pure);
  }

  double best_residual = std::numeric_limits<double>::infinity();
  for (int quadrant = 0; quadrant < 4; ++quadrant) {
    for (int s = 0; s < opts.angle_starts; ++s) {
      const double al = (s + 1.0) * std::numbers::pi / (2.0 * (opts.angle_starts + 1));
      const double be = (quadrant + 0.5) * std::numbers::pi / 2.0;
      const Eigen::Vector2d x =
          detail::bfgs_minimize(energy, Eigen::Vector2d(al, be), opts.max_iterations);
      double a = std::cos(x(0));
      double y = std::sin(x(0)) * std::cos(x(1)) / std::numbers::sqrt2;
      double v = std::sin(x(0)) * std::sin(x(1)) / std::numbers::sqrt2;
      if (a < 0.0) a = -a;
      if (a < 1e-7) continue;  // collapsed onto the pure molecule branch
      Eigen::Vector4d sol(a, y, v, 2.0 * params.rho * v);
      if (!detail::polish_mixed(params.delta, params.z, params.rho, sol)) continue;
      if (!(sol(0) > 0.0) || !sol.allFinite()) continue;
      GroundSolution g;
      g.state = {sol(0), sol(1), sol(2)};
      if (std::abs(g.state.norm() - 1.0) > kNormTolerance) continue;
      g.mu = sol(3);
      g.energy = classical_energy(g.state, real_params);
      best_residual = std::min(best_residual, eigen_residual(g.state, g.mu, real_params));
      candidates.push_back(g);
    }
  }

  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [](const auto& l, const auto& r) { return l.energy < r.energy; });
  GroundSolution out = *best;
  const double res = eigen_residual(out.state, out.mu, real_params);
  if (res > opts.residual_target) {
    throw ConvergenceError("mean-field minimizer did not reach the eigen-residual target",
                           std::min(res, best_residual));
  }
  const cplx rot = std::polar(1.0, -params.phi);
  out.state.b_g *= rot;
  out.state.b_e *= rot;
  return out;
}

/// Ground energy: closed form at delta = 0, z >= 0; numeric otherwise.
inline double ground_energy(const ModelParams& p) {
  if (p.delta == 0.0 && p.z >= 0.0) return ground_state_analytic(p.z, p.rho, p.phi).energy;
  return ground_state_numeric(p).energy;
}

inline GroundSolution ground_state(const ModelParams& p) {
  if (p.delta == 0.0 && p.z >= 0.0) return ground_state_analytic(p.z, p.rho, p.phi);
  return ground_state_numeric(p);
}

struct EnergyProfilePoint {
  double z;
  double energy;
  double d_energy;
  double d2_energy;
};

struct EnergyProfile {
  std::vector<EnergyProfilePoint> points;
  double fd_step = 1e-3;
  /// Midpoint of the grid cell with the largest jump in d2E/dz2.
  double discontinuity_z = 0.0;
};

/// E0(z) with central finite-difference first and second derivatives taken
/// with step fd_step at every grid node.
inline EnergyProfile energy_derivative_profile(const std::vector<double>& z_grid,
                                               const ModelParams& params, double fd_step = 1e-3) {
  if (z_grid.size() < 5) throw InvalidParameter("derivative profile needs at least 5 grid points");
  if (!(fd_step > 0.0)) throw InvalidParameter("finite-difference step must be positive");
  const double spacing = z_grid[1] - z_grid[0];
  if (!(spacing > 0.0)) throw InvalidParameter("z grid must be increasing");
  for (std::size_t i = 2; i < z_grid.size(); ++i) {
    if (std::abs((z_grid[i] - z_grid[i - 1]) - spacing) > 1e-9 * std::max(1.0, std::abs(spacing) * 1e3)) {
      throw InvalidParameter("z grid must be uniform");
    }
  }

  EnergyProfile out;
  out.fd_step = fd_step;
  auto energy_at = [&](double z) {
    ModelParams p = params;
    p.z = z;
    return ground_energy(p);
  };
  for (double z : z_grid) {
    const double em = energy_at(z - fd_step), e0 = energy_at(z), ep = energy_at(z + fd_step);
    out.points.push_back({z, e0, (ep - em) / (2.0 * fd_step), (ep - 2.0 * e0 + em) / (fd_step * fd_step)});
  }
  double biggest = -1.0;
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    const double jump = std::abs(out.points[i + 1].d2_energy - out.points[i].d2_energy);
    if (jump > biggest) {
      biggest = jump;
      out.discontinuity_z = 0.5 * (out.points[i].z + out.points[i + 1].z);
    }
  }
  return out;
}

}  // namespace amol
