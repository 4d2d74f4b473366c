// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amol/amol.hpp"

using namespace amol;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<void(Verdict&)> body;
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

double max_drift = 0.0;  // norm drift over every loop run in criteria 8 and 9

LoopResult loop(double z, double period) {
  const LoopResult r = integrate_loop(ModelParams{.z = z, .rho = 1.0}, period);
  max_drift = std::max(max_drift, r.max_norm_drift);
  return r;
}

void degeneracy(Verdict& v) {
  int checked = 0;
  for (int n = 2; n <= 40; n += 2) {
    const int expected = (n - n % 4) / 4 + 1;
    const int got = zero_degeneracy(n, 1.0, 1.0);
    v.check(got == expected, "N=" + std::to_string(n) + " got " + std::to_string(got));
    ++checked;
  }
  v.detail << " N checked: " << checked;
}

void small_n_oracle(Verdict& v) {
  const FockBasis b = build_basis(2);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double z = 4.0 * i / 49.0;
    const auto e = eigensolve_dense(build_hamiltonian_real({.n_atoms = 2, .z = z, .rho = 1.0}, b), false)
                       .energies;
    const double r = std::hypot(z, 1.0);
    worst = std::max({worst, std::abs(e[0] + r), std::abs(e[1]), std::abs(e[2] - r)});
  }
  v.check(worst <= 1e-12, "spectrum error");
  v.detail << " max error " << worst;
}

void meanfield_residual(Verdict& v) {
  double worst = 0.0;
  for (double delta : {0.0, 0.5}) {
    for (int i = 0; i <= 80; ++i) {
      const ModelParams p{.delta = delta, .z = 0.05 * i, .rho = 1.0};
      const GroundSolution num = ground_state_numeric(p);
      worst = std::max(worst, eigen_residual(num.state, num.mu, p));
      if (delta == 0.0) {
        const GroundSolution ana = ground_state_analytic(p.z, 1.0, 0.0);
        worst = std::max(worst, eigen_residual(ana.state, ana.mu, p));
      }
    }
  }
  v.check(worst <= 1e-10, "residual");
  v.detail << " max residual " << worst;
}

void transition_signature(Verdict& v) {
  const double h = 1e-3;
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(1.9 + h * i);
  const EnergyProfile p0 = energy_derivative_profile(grid, ModelParams{.rho = 1.0}, h);
  double below = std::nan(""), above = std::nan("");
  for (const auto& pt : p0.points) {
    if (std::abs(pt.z - (2.0 - 2 * h)) < 1e-9) below = pt.d2_energy;
    if (std::abs(pt.z - (2.0 + 2 * h)) < 1e-9) above = pt.d2_energy;
  }
  v.check(std::abs(below + 1.0 / 3.0) <= 1e-3, "d2E at 2-");
  v.check(std::abs(above) <= 1e-3, "d2E at 2+");
  v.check(std::abs(p0.discontinuity_z - 2.0) <= 2 * h, "discontinuity at delta=0");

  std::vector<double> grid5;
  for (int i = 0; i <= 200; ++i) grid5.push_back(2.4 + h * i);
  const EnergyProfile p5 = energy_derivative_profile(grid5, ModelParams{.delta = 0.5, .rho = 1.0}, h);
  v.check(std::abs(p5.discontinuity_z - 2.5) <= 2 * h, "discontinuity at delta=0.5");
  v.detail << " d2E(2-)=" << below << " d2E(2+)=" << above << " z*(0)=" << p0.discontinuity_z
           << " z*(0.5)=" << p5.discontinuity_z;
}

void finite_size(Verdict& v) {
  double previous = 1.0;
  for (int n : {20, 50, 100, 200}) {
    const double dev =
        std::abs(ground_observables(ModelParams{.n_atoms = n, .z = 1.0, .rho = 1.0}).atomic_fraction - 0.5);
    v.check(dev < previous, "not decreasing at N=" + std::to_string(n));
    v.detail << " N=" << n << ":" << dev;
    previous = dev;
  }
  v.check(previous < 0.03, "deviation at N=200");
}

void scaling(Verdict& v) {
  const std::vector<int> ns = log_spaced_even(100, 1000, 8);
  const ScalingStudy st = scaling_study(ns, 0.0, 1.0, worker_count());
  if (!st.nu || !st.zeta) {
    v.check(false, "fit failed: " + st.fit_error);
    return;
  }
  const ScalingFit& nu = *st.nu;
  const ScalingFit& zeta = *st.zeta;
  v.check(nu.exponent >= 1.45 && nu.exponent <= 1.65, "nu range");
  v.check(zeta.exponent >= 1.25 && zeta.exponent <= 1.40, "zeta range");
  v.check(nu.r_squared >= 0.99, "r2 nu");
  v.check(zeta.r_squared >= 0.99, "r2 zeta");
  const auto within2 = [](double x, double ref) { return x >= ref / 2.0 && x <= ref * 2.0; };
  v.check(within2(nu.prefactor, 0.18273), "kappa");
  v.check(within2(zeta.prefactor, 1.67506), "gamma");
  v.detail << " nu=" << nu.exponent << " kappa=" << nu.prefactor << " r2=" << nu.r_squared
           << " zeta=" << zeta.exponent << " gamma=" << zeta.prefactor << " r2=" << zeta.r_squared;
}

void fidelity_dip(Verdict& v) {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(1.0 + 0.01 * i);
  double previous = 1.0;
  FidelitySweep last;
  for (double alpha : {0.1, 0.2, 0.3, 0.4}) {
    const FidelitySweep s = fidelity_sweep(100, alpha, grid, 1.0, worker_count());
    const bool interior = s.z_min > grid.front() && s.z_min < grid.back() &&
                          s.points.front().fidelity > s.f_min && s.points.back().fidelity > s.f_min;
    v.check(s.local_minima == 1 && interior, "unique interior minimum, alpha=" + std::to_string(alpha));
    v.check(s.f_min < previous, "min F not decreasing at alpha=" + std::to_string(alpha));
    v.detail << " a=" << alpha << ":(" << s.z_min << "," << s.f_min << ")";
    previous = s.f_min;
    last = s;
  }
  const FidelitySweep small = fidelity_sweep(50, 0.4, grid, 1.0, worker_count());
  const double target = 2.0 + 0.4;
  v.check(std::abs(last.z_min - target) < std::abs(small.z_min - target), "dip drift with N");
  v.detail << " N=50 a=0.4 z_min=" << small.z_min;
}

void geometric_phase(Verdict& v) {
  for (double z : {0.5, 1.0, 1.5}) {
    const double err = std::abs(loop(z, 500.0).lambda_g - kPi / 3.0);
    v.check(err <= 0.02, "mixed phase z=" + std::to_string(z));
    v.detail << " z=" << z << ":" << err;
  }
  for (double z : {2.5, 3.0}) {
    const double lg = std::abs(loop(z, 500.0).lambda_g);
    v.check(lg <= 1e-6, "molecule phase z=" + std::to_string(z));
    v.detail << " z=" << z << ":" << lg;
  }
  double previous = 1e300, err500 = 0.0;
  for (double period : {100.0, 500.0, 2000.0}) {
    const double err = std::abs(loop(1.0, period).lambda_g - kPi / 3.0);
    v.check(err < previous, "T convergence at T=" + std::to_string(period));
    if (period == 500.0) err500 = err;
    previous = err;
  }
  const double near = std::abs(loop(1.95, 500.0).lambda_g - kPi / 3.0);
  v.check(near > err500, "critical slowing");
  v.detail << " z=1.95:" << near;
}

void linearized_comparator(Verdict& v) {
  double previous = -1.0;
  for (double z : {0.5, 1.0, 1.5}) {
    const double diff = std::abs(berry_phase_linearized(z, 1.0) - loop(z, 2000.0).lambda_g);
    v.check(diff > previous, "divergence at z=" + std::to_string(z));
    v.detail << " z=" << z << ":" << diff;
    previous = diff;
  }
  v.check(std::abs(berry_phase_linearized(0.0, 1.0) - kPi / 3.0) <= 1e-12, "value at 0");
  v.check(std::abs(berry_phase_linearized(1.0, 1.0) - kPi / 2.0) <= 1e-12, "value at rho");
}

void conservation(Verdict& v) {
  // Loops from criteria 8 and 9 (run them here too if this criterion runs alone).
  if (max_drift == 0.0) {
    for (double z : {0.5, 1.0, 1.5, 1.95, 2.5, 3.0}) loop(z, 500.0);
  }
  v.check(max_drift <= 1e-8, "loop normalization");
  v.detail << " loop drift " << max_drift;

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.1, 1.0), ang(-kPi, kPi);
  auto random_state = [&] {
    MeanFieldState s{std::polar(u(rng), ang(rng)), std::polar(u(rng), ang(rng)),
                     std::polar(u(rng), ang(rng))};
    const double n = std::sqrt(s.norm());
    return MeanFieldState{s.a / n, s.b_g / n, s.b_e / n};
  };
  double worst_energy = 0.0;
  for (int k = 0; k < 4; ++k) {
    const ModelParams p{.delta = 0.25 * k, .z = 0.5 + 0.7 * k, .rho = 1.0, .phi = 1.3 * k};
    const MeanFieldState s = random_state();
    const double e0 = classical_energy(s, p);
    PropagationOptions opts;
    opts.samples = 201;
    for (const auto& smp : propagate(s, p, PhaseRamp{p.phi, 0.0}, 100.0, opts).samples) {
      MeanFieldState x = smp.state;
      const double n = std::sqrt(x.norm());
      worst_energy = std::max(worst_energy,
                              std::abs(classical_energy({x.a / n, x.b_g / n, x.b_e / n}, p) - e0));
    }
  }
  v.check(worst_energy <= 1e-8, "static energy");
  v.detail << " energy drift " << worst_energy;

  double worst_gauge = 0.0;
  const ModelParams p{.delta = 0.3, .z = 1.2, .rho = 1.0};
  const PhaseRamp ramp{0.0, 2.0 * kPi / 100.0};
  for (double theta : {0.3, 1.7, -2.2}) {
    const MeanFieldState s = random_state();
    const MeanFieldState x = propagate(apply_gauge(s, theta), p, ramp, 100.0).final_state;
    const MeanFieldState y = apply_gauge(propagate(s, p, ramp, 100.0).final_state, theta);
    worst_gauge = std::max(worst_gauge, std::sqrt(std::norm(x.a - y.a) + std::norm(x.b_g - y.b_g) +
                                                  std::norm(x.b_e - y.b_e)));
  }
  v.check(worst_gauge <= 1e-8, "gauge commutation");
  v.detail << " gauge error " << worst_gauge;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "zero-energy degeneracy law", 5.0, degeneracy},
      {2, "N=2 exact spectrum", 1.0, small_n_oracle},
      {3, "mean-field eigen-residual", 5.0, meanfield_residual},
      {4, "second-order transition signature", 5.0, transition_signature},
      {5, "finite-size convergence", 60.0, finite_size},
      {6, "scaling exponents", 1200.0, scaling},
      {7, "fidelity dip", 600.0, fidelity_dip},
      {8, "geometric-phase jump", 300.0, geometric_phase},
      {9, "linearized comparator divergence", 600.0, linearized_comparator},
      {10, "conservation suite", 600.0, conservation},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.check(secs < c.limit_s, "runtime limit " + std::to_string(c.limit_s) + " s");
    if (!v.ok) ++failures;
    std::printf("[%s] %2d %s (%.2f s):%s\n", v.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
