#pragma once

#include <cmath>
#include <utility>

#include "amol/errors.hpp"

namespace amol {

struct ScalarMinimum {
  double x;
  double value;
  int evaluations;
};

/// Golden-section search for a unimodal f on [lo, hi]; stops once the
/// bracket is no wider than tol.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol) {
  if (!(hi > lo)) throw InvalidParameter("golden section: empty bracket");
  if (!(tol > 0.0)) throw InvalidParameter("golden section: tolerance must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? ScalarMinimum{c, fc, evals} : ScalarMinimum{d, fd, evals};
}

}  // namespace amol
