#pragma once

// Conserved-N Fock basis for one atomic mode and two molecular modes.
//
// Two atoms bind into one molecule, so N = n_a + 2 (n_g + n_e) is fixed.
// States are ordered by (n_a, n_g, n_e) in descending lexicographic order:
// molecule shells m = n_g + n_e in increasing order, n_g decreasing within a
// shell. For N = 2 this gives (2,0,0), (0,1,0), (0,0,1).

#include <cstddef>
#include <string>
#include <vector>

#include "amol/errors.hpp"

namespace amol {

struct FockState {
  int n_a = 0;
  int n_g = 0;
  int n_e = 0;

  friend bool operator==(const FockState&, const FockState&) = default;
};

/// Largest total atom number accepted by build_basis. dim(20000) is about 5e7.
inline constexpr int kMaxAtomNumber = 20000;

class FockBasis {
 public:
  explicit FockBasis(int n_atoms) : n_atoms_(n_atoms) {
    if (n_atoms < 0 || n_atoms % 2 != 0) {
      throw InvalidParameter("atom number N must be even and non-negative, got " +
                             std::to_string(n_atoms));
    }
    if (n_atoms > kMaxAtomNumber) {
      throw InvalidParameter("atom number N exceeds the supported ceiling " +
                             std::to_string(kMaxAtomNumber));
    }
    const int half = n_atoms / 2;
    states_.reserve(dimension_for(n_atoms));
    for (int m = 0; m <= half; ++m) {
      for (int ng = m; ng >= 0; --ng) states_.push_back({n_atoms - 2 * m, ng, m - ng});
    }
  }

  /// (N/2+1)(N/2+2)/2
  static std::size_t dimension_for(int n_atoms) {
    const auto h = static_cast<std::size_t>(n_atoms / 2);
    return (h + 1) * (h + 2) / 2;
  }

  int atom_number() const noexcept { return n_atoms_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<FockState>& states() const noexcept { return states_; }
  const FockState& operator[](std::size_t i) const { return states_[i]; }

  bool contains(const FockState& s) const noexcept {
    return s.n_a >= 0 && s.n_g >= 0 && s.n_e >= 0 &&
           s.n_a + 2 * (s.n_g + s.n_e) == n_atoms_;
  }

  /// Position of s in the canonical ordering. Constant time.
  std::size_t index_of(const FockState& s) const {
    if (!contains(s)) {
      throw NotFound("state (" + std::to_string(s.n_a) + "," + std::to_string(s.n_g) +
                     "," + std::to_string(s.n_e) + ") is not in the N=" +
                     std::to_string(n_atoms_) + " basis");
    }
    const auto m = static_cast<std::size_t>(s.n_g + s.n_e);
    return m * (m + 1) / 2 + static_cast<std::size_t>(s.n_e);
  }

  auto begin() const noexcept { return states_.begin(); }
  auto end() const noexcept { return states_.end(); }

 private:
  int n_atoms_;
  std::vector<FockState> states_;
};

inline FockBasis build_basis(int n_atoms) { return FockBasis(n_atoms); }

inline std::size_t index_of(const FockBasis& basis, const FockState& s) {
  return basis.index_of(s);
}

}  // namespace amol
