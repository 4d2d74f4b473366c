#pragma once

// Lowest eigenpairs of a large sparse Hermitian matrix by thick-restart
// Lanczos (Krylov-Schur form) with full reorthogonalization.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "amol/errors.hpp"
#include "amol/sparse_hermitian.hpp"
#include "amol/spectrum.hpp"

namespace amol {

template <class Scalar>
struct LanczosOptions {
  /// Krylov subspace size; 0 picks max(2k + 30, 60).
  int subspace = 0;
  int max_restarts = 5000;
  /// Residual target relative to the running spectral-norm estimate.
  double tolerance = 1e-10;
  /// Start vector; a seeded pseudo-random vector when absent.
  std::optional<Vector<Scalar>> start;
  unsigned long long seed = 0x9e3779b97f4a7c15ULL;
};

namespace detail {

template <class Scalar>
Vector<Scalar> random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (is_complex_v<Scalar>) {
      const double re = u(rng);
      v(i) = Scalar(re, u(rng));
    } else {
      v(i) = u(rng);
    }
  }
  return v;
}

}  // namespace detail

template <class Scalar>
Spectrum<Scalar> eigensolve_lowest(const SparseHermitian<Scalar>& h, int k,
                                   const LanczosOptions<Scalar>& opts = {}) {
  using Index = Eigen::Index;
  const Index n = static_cast<Index>(h.dim());
  if (k < 1) throw InvalidParameter("k must be at least 1");
  if (k > n) throw InvalidParameter("k exceeds the matrix dimension");

  int m = opts.subspace > 0 ? opts.subspace : std::max(2 * k + 30, 60);
  m = std::max(m, k + 2);
  if (m >= n) {
    // Krylov space would be the whole space anyway.
    Spectrum<Scalar> full = eigensolve_dense(h);
    full.energies.resize(static_cast<std::size_t>(k));
    full.vectors->conservativeResize(Eigen::NoChange, k);
    return full;
  }

  std::mt19937_64 rng(opts.seed);
  DenseMatrix<Scalar> basis(n, m + 1);
  DenseMatrix<Scalar> proj = DenseMatrix<Scalar>::Zero(m, m);

  Vector<Scalar> v0 = opts.start ? *opts.start : detail::random_vector<Scalar>(n, rng);
  if (v0.size() != n) throw InvalidParameter("start vector has the wrong dimension");
  if (v0.norm() == 0.0) v0 = detail::random_vector<Scalar>(n, rng);
  basis.col(0) = v0.normalized();

  Vector<Scalar> w(n);
  Vector<Scalar> coeffs;
  double norm_estimate = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  int kept = 0;

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    double beta = 0.0;
    for (int j = kept; j < m; ++j) {
      h.apply(basis.col(j), w);
      auto span = basis.leftCols(j + 1);
      // Classical Gram-Schmidt, applied twice.
      coeffs.noalias() = span.adjoint() * w;
      w.noalias() -= span * coeffs;
      Vector<Scalar> again = span.adjoint() * w;
      w.noalias() -= span * again;
      coeffs += again;
      proj.col(j).head(j + 1) = coeffs;
      proj.row(j).head(j + 1) = coeffs.adjoint();
      proj(j, j) = Scalar(std::real(proj(j, j)));

      beta = w.norm();
      if (beta <= 1e-14 * std::max(norm_estimate, 1e-300) && j + 1 < n) {
        // Invariant subspace: continue with a fresh orthogonal direction.
        w = detail::random_vector<Scalar>(n, rng);
        for (int pass = 0; pass < 2; ++pass) w -= span * (span.adjoint() * w).eval();
        basis.col(j + 1) = w.normalized();
        beta = 0.0;
      } else {
        basis.col(j + 1) = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> ritz(proj);
    const auto& theta = ritz.eigenvalues();
    const auto& s = ritz.eigenvectors();
    norm_estimate = std::max({norm_estimate, std::abs(theta(0)), std::abs(theta(m - 1))});

    double worst = 0.0;
    for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(beta * s(m - 1, i)));
    best_residual = std::min(best_residual, worst);

    const int keep = std::min(m - 1, std::max(k + 1, k + (m - k) / 2));
    DenseMatrix<Scalar> rotated = basis.leftCols(m) * s.leftCols(keep);

    if (worst <= opts.tolerance * norm_estimate) {
      Spectrum<Scalar> out;
      DenseMatrix<Scalar> vecs = rotated.leftCols(k);
      for (int i = 0; i < k; ++i) {
        out.energies.push_back(theta(i));
        vecs.col(i).normalize();
        fix_global_phase(vecs.col(i));
      }
      out.vectors = std::move(vecs);
      return out;
    }

    basis.leftCols(keep) = rotated;
    basis.col(keep) = basis.col(m);
    proj.setZero();
    for (int i = 0; i < keep; ++i) proj(i, i) = Scalar(theta(i));
    kept = keep;
  }
  throw ConvergenceError("Lanczos did not reach the residual target", best_residual);
}

}  // namespace amol
