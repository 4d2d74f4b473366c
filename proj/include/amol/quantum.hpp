#pragma once

// Ground-state observables of the finite-N model: energies, gap, atomic
// fraction, zero-energy degeneracy, and ground-state fidelity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "amol/fock.hpp"
#include "amol/hamiltonian.hpp"
#include "amol/lanczos.hpp"
#include "amol/model_params.hpp"
#include "amol/spectrum.hpp"

namespace amol {

enum class SolverKind { automatic, dense, iterative };

/// Dimensions up to this size go to the dense solver under SolverKind::automatic.
inline constexpr std::size_t kAutoDenseLimit = 400;

struct SolverOptions {
  SolverKind kind = SolverKind::automatic;
  double tolerance = 1e-10;
  int subspace = 24;
  /// Warm start for the iterative solver (ignored by the dense one).
  std::optional<Vector<double>> start;
};

struct GroundObservables {
  double e0 = 0.0;  ///< raw energy, same unit as rho
  double e1 = 0.0;
  double gap = 0.0;  ///< (E1 - E0) / rho
  double atomic_fraction = 0.0;
  Vector<double> ground_vector;  ///< in the phi = 0 gauge
  Vector<double> excited_vector;
};

/// Lowest k eigenpairs of a real Hamiltonian using the requested solver.
inline Spectrum<double> lowest_states(const SparseHermitian<double>& h, int k,
                                      const SolverOptions& opts = {}) {
  const bool dense = opts.kind == SolverKind::dense ||
                     (opts.kind == SolverKind::automatic && h.dim() <= kAutoDenseLimit);
  if (dense) {
    Spectrum<double> s = eigensolve_dense(h);
    s.energies.resize(static_cast<std::size_t>(k));
    s.vectors->conservativeResize(Eigen::NoChange, k);
    return s;
  }
  LanczosOptions<double> lopts;
  lopts.tolerance = opts.tolerance;
  lopts.subspace = opts.subspace;
  lopts.start = opts.start;
  return eigensolve_lowest(h, k, lopts);
}

/// <N_a> / N in the state v.
inline double atomic_fraction(const FockBasis& basis, const Vector<double>& v) {
  if (basis.atom_number() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    acc += v(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(i)) * basis[i].n_a;
  }
  return acc / basis.atom_number();
}

inline GroundObservables ground_observables(const ModelParams& params, const FockBasis& basis,
                                            const SolverOptions& opts = {}) {
  params.validate();
  if (basis.size() < 2) throw InvalidParameter("the gap needs at least two levels (N >= 2)");
  const SparseHermitian<double> h = build_hamiltonian_real(params, basis);
  const Spectrum<double> s = lowest_states(h, 2, opts);
  GroundObservables out;
  out.e0 = s.energies[0];
  out.e1 = s.energies[1];
  out.gap = (out.e1 - out.e0) / params.rho;
  out.ground_vector = s.vector(0);
  out.excited_vector = s.vector(1);
  out.atomic_fraction = atomic_fraction(basis, out.ground_vector);
  return out;
}

inline GroundObservables ground_observables(const ModelParams& params,
                                            const SolverOptions& opts = {}) {
  return ground_observables(params, build_basis(params.n_atoms), opts);
}

/// Relative threshold under which an eigenvalue counts as zero, applied to
/// SparseHermitian::norm_bound().
inline constexpr double kZeroEnergyTolerance = 1e-9;

/// Number of exactly-zero levels at delta = 0. Closed form: ceil((N/2 + 1) / 2).
inline int zero_degeneracy(int n_atoms, double z, double rho) {
  ModelParams p;
  p.n_atoms = n_atoms;
  p.z = z;
  p.rho = rho;
  p.delta = 0.0;
  const FockBasis basis = build_basis(n_atoms);
  const SparseHermitian<double> h = build_hamiltonian_real(p, basis);
  const Spectrum<double> s = eigensolve_dense(h, false);
  const double cut = kZeroEnergyTolerance * std::max(h.norm_bound(), 1.0);
  return static_cast<int>(std::count_if(s.energies.begin(), s.energies.end(),
                                        [cut](double e) { return std::abs(e) <= cut; }));
}

/// |<v1|v2>| for normalized vectors, clamped to [0, 1].
template <class Scalar>
double fidelity(const Vector<Scalar>& v1, const Vector<Scalar>& v2) {
  if (v1.size() != v2.size()) {
    throw InvalidParameter("fidelity: dimension mismatch (" + std::to_string(v1.size()) +
                           " vs " + std::to_string(v2.size()) + ")");
  }
  return std::clamp(static_cast<double>(std::abs(v1.dot(v2))), 0.0, 1.0);
}

}  // namespace amol
