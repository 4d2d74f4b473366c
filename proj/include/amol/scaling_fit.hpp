#pragma once

// Power-law fits y = prefactor * x^exponent by least squares in log-log space.

#include <cmath>
#include <utility>
#include <vector>

#include "amol/errors.hpp"

namespace amol {

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double exponent_stderr = 0.0;
  double prefactor_stderr = 0.0;
  std::vector<std::pair<double, double>> points;  ///< (x, y) as supplied
};

struct LinearFit {
  double slope, intercept, r_squared, slope_stderr, intercept_stderr;
};

inline LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2) throw InvalidData("need at least two (x, y) pairs");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidData("all abscissae coincide");
  LinearFit f{};
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ssr / syy) : 1.0;
  const double s2 = x.size() > 2 ? ssr / (n - 2.0) : 0.0;
  f.slope_stderr = std::sqrt(s2 / sxx);
  f.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  return f;
}

inline constexpr std::size_t kMinFitPoints = 5;

/// Fit kappa |z_c - z_N|^nu = 1/N from (N, z_N) pairs: regress log N on
/// log |z_c - z_N|; slope = -nu, intercept = -log kappa.
inline ScalingFit fit_nu(const std::vector<std::pair<double, double>>& n_and_zn, double z_c) {
  if (n_and_zn.size() < kMinFitPoints) throw InvalidData("fit_nu needs at least 5 points");
  std::vector<double> lx, ly;
  ScalingFit out;
  for (const auto& [n, zn] : n_and_zn) {
    if (!(zn < z_c)) throw InvalidData("fit_nu: every z_N must lie below z_c");
    if (!(n > 0.0)) throw InvalidData("fit_nu: N must be positive");
    lx.push_back(std::log(z_c - zn));
    ly.push_back(std::log(n));
    out.points.emplace_back(z_c - zn, n);
  }
  const LinearFit f = least_squares_line(lx, ly);
  out.exponent = -f.slope;
  out.prefactor = std::exp(-f.intercept);
  out.r_squared = f.r_squared;
  out.exponent_stderr = f.slope_stderr;
  out.prefactor_stderr = out.prefactor * f.intercept_stderr;
  return out;
}

/// Fit gap_min / N = Gamma N^{-zeta} from (N, gap_min) pairs.
inline ScalingFit fit_zeta(const std::vector<std::pair<double, double>>& n_and_gap) {
  if (n_and_gap.size() < kMinFitPoints) throw InvalidData("fit_zeta needs at least 5 points");
  std::vector<double> lx, ly;
  ScalingFit out;
  for (const auto& [n, gap] : n_and_gap) {
    if (!(gap > 0.0)) throw InvalidData("fit_zeta: gaps must be positive");
    if (!(n > 0.0)) throw InvalidData("fit_zeta: N must be positive");
    lx.push_back(std::log(n));
    ly.push_back(std::log(gap / n));
    out.points.emplace_back(n, gap);
  }
  const LinearFit f = least_squares_line(lx, ly);
  out.exponent = -f.slope;
  out.prefactor = std::exp(f.intercept);
  out.r_squared = f.r_squared;
  out.exponent_stderr = f.slope_stderr;
  out.prefactor_stderr = out.prefactor * f.intercept_stderr;
  return out;
}

}  // namespace amol
