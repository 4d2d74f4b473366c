#pragma once

// Adaptive Dormand-Prince 5(4) integrator with FSAL and PI step control,
// for fixed-size real Eigen state vectors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "amol/errors.hpp"

namespace amol {

/// Defaults keep |a|^2 + 2(|b_g|^2 + |b_e|^2) within 1e-8 over loops up to T = 2000.
struct StepControl {
  double rtol = 1e-12;
  double atol = 1e-14;
  double h_initial = 1e-3;
  double h_max = 0.25;
  double h_min = 1e-14;
  long max_steps = 50'000'000;
};

template <class State>
class DormandPrince54 {
 public:
  explicit DormandPrince54(StepControl control = {}) : ctl_(control), h_(control.h_initial) {}

  long accepted() const noexcept { return accepted_; }
  long rejected() const noexcept { return rejected_; }

  /// Advance y from t to t_end. on_step(t_old, y_old, t_new, y_new) runs after
  /// each accepted step and may throw to abort.
  template <class Rhs, class OnStep>
  void advance(Rhs&& f, double& t, State& y, double t_end, OnStep&& on_step) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!(t_end > t)) return;
    State k1 = f(t, y);
    while (t < t_end) {
      if (steps_++ > ctl_.max_steps) throw IntegrationFailure("step budget exhausted");
      double h = std::min({h_, ctl_.h_max, t_end - t});
      const bool last = (t + h >= t_end);
      if (last) h = t_end - t;

      const State k2 = f(t + c2 * h, State(y + h * a21 * k1));
      const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
      const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const double t_new = last ? t_end : t + h;
      const State k6 = f(t_new, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      const State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = f(t_new, y_new);
      const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double sq = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = ctl_.atol + ctl_.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
        sq += (err(i) / scale) * (err(i) / scale);
      }
      const double e = std::sqrt(sq / static_cast<double>(y.size()));
      if (!std::isfinite(e)) throw IntegrationFailure("non-finite error estimate");

      if (e <= 1.0) {
        // PI controller (Hairer, Norsett & Wanner)
        const double fac = e == 0.0 ? 5.0
                                    : std::clamp(0.9 * std::pow(e, -0.17) * std::pow(e_prev_, 0.04),
                                                 0.2, 5.0);
        e_prev_ = std::max(e, 1e-4);
        on_step(t, y, t_new, y_new);
        t = t_new;
        y = y_new;
        k1 = k7;
        ++accepted_;
        if (!last) h_ = h * fac;
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(e, -0.2));
        ++rejected_;
        if (h_ < ctl_.h_min) throw IntegrationFailure("step size underflow");
      }
    }
  }

 private:
  StepControl ctl_;
  double h_;
  double e_prev_ = 1e-4;
  long accepted_ = 0;
  long rejected_ = 0;
  long steps_ = 0;
};

}  // namespace amol
