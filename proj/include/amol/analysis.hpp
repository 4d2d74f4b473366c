#pragma once

// Criticality post-processing: pseudo-critical points from the finite-N gap
// minimum, scaling fits, and ground-state fidelity sweeps.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "amol/errors.hpp"
#include "amol/fock.hpp"
#include "amol/golden_section.hpp"
#include "amol/meanfield.hpp"
#include "amol/quantum.hpp"
#include "amol/scaling_fit.hpp"

namespace amol {

/// Evaluate fn(0..count-1) on up to `threads` workers. The result vector is
/// indexed by task, so the output does not depend on scheduling.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<std::optional<T>> slots(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) slots[i].emplace(fn(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            slots[i].emplace(fn(i));
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct GapMinimum {
  int n_atoms = 0;
  double z_n = 0.0;      ///< pseudo-critical coupling
  double gap_min = 0.0;  ///< (E1 - E0) / rho at z_n
};

struct GapSearchOptions {
  int coarse_points = 41;
  double z_tolerance = 1e-6;
  SolverOptions solver;
};

/// Gap minimum on [lo, hi]: coarse scan, then golden-section refinement of
/// the cell pair around the best coarse point.
inline GapMinimum pseudo_critical_point(int n_atoms, double delta, double rho,
                                        std::pair<double, double> bracket,
                                        const GapSearchOptions& opts = {}) {
  const auto [lo, hi] = bracket;
  if (!(hi > lo)) throw InvalidParameter("gap search bracket must be non-empty");
  if (opts.coarse_points < 5) throw InvalidParameter("coarse scan needs at least 5 points");
  const FockBasis basis = build_basis(n_atoms);
  ModelParams p;
  p.n_atoms = n_atoms;
  p.delta = delta;
  p.rho = rho;
  p.validate();

  SolverOptions solver = opts.solver;
  auto gap_at = [&](double z) {
    p.z = z;
    const GroundObservables g = ground_observables(p, basis, solver);
    solver.start = Vector<double>(g.ground_vector + g.excited_vector);
    return g.gap;
  };

  const int m = opts.coarse_points;
  std::vector<double> zs(static_cast<std::size_t>(m)), gaps(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    zs[i] = lo + (hi - lo) * i / (m - 1);
    gaps[i] = gap_at(zs[i]);
  }
  const auto best = static_cast<int>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  if (best == 0 || best == m - 1) {
    throw BracketError("gap minimum sits on the bracket edge at z = " + std::to_string(zs[best]) +
                       "; widen the bracket");
  }
  int turns = 0;
  for (int i = 1; i + 1 < m; ++i) {
    const double left = gaps[i] - gaps[i - 1], right = gaps[i + 1] - gaps[i];
    if ((left < 0.0) != (right < 0.0)) ++turns;
  }
  if (turns != 1) {
    throw BracketError("gap is not unimodal on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]; narrow the bracket");
  }

  // Restart the warm-start chain from the best coarse point.
  solver.start.reset();
  gap_at(zs[best]);
  const ScalarMinimum refined =
      golden_section_minimize(gap_at, zs[best - 1], zs[best + 1], opts.z_tolerance);
  GapMinimum out{n_atoms, refined.x, refined.value};
  if (gaps[best] < out.gap_min) out = {n_atoms, zs[best], gaps[best]};
  return out;
}

/// Default bracket used by the scaling study: [z_c - 0.5 rho, z_c + 0.25 rho].
inline std::pair<double, double> default_gap_bracket(double delta, double rho) {
  const double zc = critical_point(rho, delta);
  return {zc - 0.5 * rho, zc + 0.25 * rho};
}

struct ScalingStudy {
  std::vector<GapMinimum> minima;  ///< sorted by N
  std::optional<ScalingFit> nu;
  std::optional<ScalingFit> zeta;
  std::string fit_error;  ///< why the fits are absent, if they are
};

inline ScalingStudy scaling_study(std::vector<int> n_list, double delta, double rho,
                                  unsigned threads = 1, const GapSearchOptions& opts = {}) {
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  const auto bracket = default_gap_bracket(delta, rho);
  ScalingStudy out;
  // Largest N first so the longest jobs start early.
  std::vector<int> order(n_list.rbegin(), n_list.rend());
  out.minima = parallel_map(order.size(), threads, [&](std::size_t i) {
    return pseudo_critical_point(order[i], delta, rho, bracket, opts);
  });
  std::sort(out.minima.begin(), out.minima.end(),
            [](const auto& l, const auto& r) { return l.n_atoms < r.n_atoms; });

  std::vector<std::pair<double, double>> zn, gaps;
  for (const auto& g : out.minima) {
    zn.emplace_back(g.n_atoms, g.z_n);
    gaps.emplace_back(g.n_atoms, g.gap_min);
  }
  try {
    out.nu = fit_nu(zn, critical_point(rho, delta));
    out.zeta = fit_zeta(gaps);
  } catch (const InvalidData& e) {
    out.nu.reset();
    out.zeta.reset();
    out.fit_error = e.what();
  }
  return out;
}

/// Even N values spaced evenly in log N over [n_min, n_max], endpoints included.
inline std::vector<int> log_spaced_even(int n_min, int n_max, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    const double v = std::exp(std::log(n_min) + t * (std::log(n_max) - std::log(n_min)));
    int n = static_cast<int>(std::lround(v / 2.0)) * 2;
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

struct FidelityPoint {
  double z;
  double fidelity;
};

struct FidelitySweep {
  int n_atoms = 0;
  double alpha = 0.0;
  std::vector<FidelityPoint> points;
  double z_min = 0.0;
  double f_min = 1.0;
  int local_minima = 0;  ///< strict interior local minima of F on the grid
};

/// F(z) = |<ground(delta = 0, z) | ground(delta = alpha, z)>|.
inline FidelitySweep fidelity_sweep(int n_atoms, double alpha, const std::vector<double>& z_grid,
                                    double rho, unsigned threads = 1,
                                    const SolverOptions& solver = {}) {
  if (alpha < 0.0) throw InvalidParameter("alpha must be non-negative");
  const FockBasis basis = build_basis(n_atoms);
  FidelitySweep out;
  out.n_atoms = n_atoms;
  out.alpha = alpha;
  out.points = parallel_map(z_grid.size(), threads, [&](std::size_t i) {
    ModelParams p;
    p.n_atoms = n_atoms;
    p.rho = rho;
    p.z = z_grid[i];
    const GroundObservables g0 = ground_observables(p, basis, solver);
    if (alpha == 0.0) return FidelityPoint{z_grid[i], fidelity(g0.ground_vector, g0.ground_vector)};
    p.delta = alpha;
    const GroundObservables g1 = ground_observables(p, basis, solver);
    return FidelityPoint{z_grid[i], fidelity(g0.ground_vector, g1.ground_vector)};
  });
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.points[i].fidelity < out.f_min || i == 0) {
      out.f_min = out.points[i].fidelity;
      out.z_min = out.points[i].z;
    }
    if (i > 0 && i + 1 < out.points.size() &&
        out.points[i].fidelity < out.points[i - 1].fidelity &&
        out.points[i].fidelity < out.points[i + 1].fidelity) {
      ++out.local_minima;
    }
  }
  return out;
}

}  // namespace amol
