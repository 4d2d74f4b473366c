#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "amol/errors.hpp"

namespace amol {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct MatrixEntry {
  std::size_t row;
  std::size_t col;
  Scalar value;
};

/// Hermitian matrix stored as the upper triangle plus diagonal in
/// coordinate form. Immutable once built; a full-storage row-major copy
/// backs the matrix-vector product.
template <class Scalar>
class SparseHermitian {
 public:
  using scalar_type = Scalar;

  SparseHermitian(std::size_t dim, std::vector<MatrixEntry<Scalar>> entries)
      : dim_(dim), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(2 * entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.row > e.col || e.col >= dim_) {
        throw InvalidParameter("entries must lie in the upper triangle of a " +
                               std::to_string(dim_) + "-dimensional matrix");
      }
      if (i > 0 && entries_[i - 1].row == e.row && entries_[i - 1].col == e.col) {
        throw InvalidParameter("duplicate matrix entry (" + std::to_string(e.row) + "," +
                               std::to_string(e.col) + ")");
      }
      if constexpr (is_complex_v<Scalar>) {
        if (e.row == e.col && e.value.imag() != 0.0) {
          throw InvalidParameter("diagonal entries of a Hermitian matrix must be real");
        }
      }
      max_abs_ = std::max(max_abs_, static_cast<double>(std::abs(e.value)));
      triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
      if (e.row != e.col) {
        triplets.emplace_back(static_cast<int>(e.col), static_cast<int>(e.row), conj(e.value));
      }
    }
    full_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    full_.setFromTriplets(triplets.begin(), triplets.end());
    full_.makeCompressed();
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<MatrixEntry<Scalar>>& entries() const noexcept { return entries_; }

  /// Cheap upper bound on the spectral norm: largest |entry| times dim.
  double norm_bound() const noexcept { return max_abs_ * static_cast<double>(dim_); }

  /// y = H x
  template <class In, class Out>
  void apply(const In& x, Out& y) const {
    y.noalias() = full_ * x;
  }

  Vector<Scalar> operator*(const Vector<Scalar>& x) const { return full_ * x; }

  DenseMatrix<Scalar> to_dense() const { return DenseMatrix<Scalar>(full_); }

  const Eigen::SparseMatrix<Scalar, Eigen::RowMajor>& full() const noexcept { return full_; }

 private:
  static Scalar conj(const Scalar& v) {
    if constexpr (is_complex_v<Scalar>) {
      return std::conj(v);
    } else {
      return v;
    }
  }

  std::size_t dim_;
  std::vector<MatrixEntry<Scalar>> entries_;
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> full_;
  double max_abs_ = 0.0;
};

}  // namespace amol
