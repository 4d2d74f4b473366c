#pragma once

// Second-quantized Hamiltonian in the interaction picture,
//
//   H = delta (Ne + Ng) + z b_e^+ b_g + (rho e^{-i phi} / sqrt N) b_e^+ a a + h.c.,
//
// assembled on the conserved-N Fock basis.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "amol/fock.hpp"
#include "amol/model_params.hpp"
#include "amol/sparse_hermitian.hpp"

namespace amol {

namespace detail {

template <class Scalar>
SparseHermitian<Scalar> assemble(const ModelParams& params, const FockBasis& basis,
                                 Scalar pair_phase) {
  params.validate();
  if (basis.atom_number() != params.n_atoms) {
    throw InvalidParameter("basis was built for N=" + std::to_string(basis.atom_number()) +
                           " but parameters say N=" + std::to_string(params.n_atoms));
  }
  const double n = static_cast<double>(params.n_atoms);
  const double pair_scale = params.n_atoms > 0 ? params.rho / std::sqrt(n) : 0.0;

  std::vector<MatrixEntry<Scalar>> entries;
  entries.reserve(3 * basis.size());
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const FockState& s = basis[col];
    const double diag = params.delta * (s.n_g + s.n_e);
    if (diag != 0.0) entries.push_back({col, col, Scalar(diag)});

    // b_e^+ b_g raises the canonical index; z is real, so the mirrored
    // entry above the diagonal carries the same value.
    if (s.n_g > 0 && params.z != 0.0) {
      const std::size_t upper = basis.index_of({s.n_a, s.n_g - 1, s.n_e + 1});
      const double amp = params.z * std::sqrt(static_cast<double>(s.n_g) * (s.n_e + 1));
      entries.push_back({col, upper, Scalar(amp)});
    }
    // b_e^+ a a raises the index; store its conjugate partner instead.
    if (s.n_a >= 2) {
      const std::size_t upper = basis.index_of({s.n_a - 2, s.n_g, s.n_e + 1});
      const double amp = pair_scale * std::sqrt(static_cast<double>(s.n_a) * (s.n_a - 1) *
                                                (s.n_e + 1));
      if (amp != 0.0) entries.push_back({col, upper, amp * pair_phase});
    }
  }
  return SparseHermitian<Scalar>(basis.size(), std::move(entries));
}

}  // namespace detail

/// Full complex Hermitian Hamiltonian including the coupling phase phi.
inline SparseHermitian<std::complex<double>> build_hamiltonian(const ModelParams& params,
                                                               const FockBasis& basis) {
  // <..., n_e|H|..., n_e+1> is the conjugate of rho e^{-i phi}, i.e. rho e^{+i phi}.
  return detail::assemble<std::complex<double>>(params, basis, std::polar(1.0, params.phi));
}

/// Real symmetric Hamiltonian with phi gauged away (b_{g,e} -> e^{-i phi} b_{g,e}).
/// Same spectrum as build_hamiltonian; eigenvectors differ by the diagonal
/// phase exp(-i phi (n_g + n_e)).
inline SparseHermitian<double> build_hamiltonian_real(const ModelParams& params,
                                                      const FockBasis& basis) {
  return detail::assemble<double>(params, basis, 1.0);
}

}  // namespace amol
