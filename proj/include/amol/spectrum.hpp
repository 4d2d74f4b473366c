#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "amol/errors.hpp"
#include "amol/sparse_hermitian.hpp"

namespace amol {

/// Largest dimension handed to the dense solver (N = 196 gives dim 5050).
inline constexpr std::size_t kDenseCeiling = 5050;

/// Ascending eigenvalues with optional matching orthonormal eigenvectors
/// stored column-wise.
template <class Scalar>
struct Spectrum {
  std::vector<double> energies;
  std::optional<DenseMatrix<Scalar>> vectors;

  std::size_t size() const noexcept { return energies.size(); }

  Vector<Scalar> vector(std::size_t i) const {
    if (!vectors) throw InvalidParameter("spectrum was computed without eigenvectors");
    return vectors->col(static_cast<Eigen::Index>(i));
  }
};

/// Rotate v so that its largest-magnitude component (first one on ties) is
/// real and positive.
template <class Derived>
void fix_global_phase(Eigen::MatrixBase<Derived>&& v) {
  using Scalar = typename Derived::Scalar;
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs <= 0.0) return;
  if constexpr (is_complex_v<Scalar>) {
    v *= std::conj(v(best)) / best_abs;
  } else {
    if (v(best) < 0.0) v = -v;
  }
}

template <class Derived>
void fix_global_phase(Eigen::MatrixBase<Derived>& v) {
  fix_global_phase(std::move(v));
}

/// Full spectrum by dense diagonalization.
template <class Scalar>
Spectrum<Scalar> eigensolve_dense(const SparseHermitian<Scalar>& h, bool with_vectors = true) {
  if (h.dim() > kDenseCeiling) {
    throw CapacityError("dimension " + std::to_string(h.dim()) + " exceeds the dense ceiling " +
                        std::to_string(kDenseCeiling) + "; use eigensolve_lowest");
  }
  Spectrum<Scalar> out;
  if (h.dim() == 0) return out;
  const DenseMatrix<Scalar> dense = h.to_dense();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(
      dense, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense Hermitian eigensolver failed", std::nan(""));
  }
  const auto& values = solver.eigenvalues();
  out.energies.assign(values.data(), values.data() + values.size());
  if (with_vectors) {
    DenseMatrix<Scalar> vecs = solver.eigenvectors();
    for (Eigen::Index j = 0; j < vecs.cols(); ++j) fix_global_phase(vecs.col(j));
    out.vectors = std::move(vecs);
  }
  return out;
}

}  // namespace amol
