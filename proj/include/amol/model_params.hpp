#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "amol/errors.hpp"

namespace amol {

/// Interaction-picture parameters. Energies and couplings are in the same
/// (arbitrary) unit; every public observable is reported rescaled by rho.
///
///   delta  detuning of the pump from the atom -> excited-molecule transition
///   z      coupling between the two molecular modes (dump pulse)
///   rho    modulus of the atom-pair -> excited-molecule coupling
///   phi    phase of that coupling, in [0, 2 pi)
struct ModelParams {
  int n_atoms = 2;
  double delta = 0.0;
  double z = 1.0;
  double rho = 1.0;
  double phi = 0.0;

  void validate() const {
    if (n_atoms < 0 || n_atoms % 2 != 0) {
      throw InvalidParameter("N must be even and non-negative, got " + std::to_string(n_atoms));
    }
    validate_couplings();
  }

  /// Checks everything but N; used by the mean-field (N -> infinity) code.
  void validate_couplings() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidParameter("rho must be finite and > 0");
    if (!std::isfinite(delta)) throw InvalidParameter("delta must be finite");
    if (!std::isfinite(z)) throw InvalidParameter("z must be finite");
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
      throw InvalidParameter("phi must lie in [0, 2 pi)");
    }
  }
};

}  // namespace amol
