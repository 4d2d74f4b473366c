#pragma once

// Command-line front end: subcommand parsing, config merging, CSV/JSON
// serialization and run manifests.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amol/amol.hpp"

#ifndef AMOL_VERSION
#define AMOL_VERSION "unknown"
#endif

namespace amol::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Shortest text that round-trips through %.17g.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
      out += '\n';
    }
    return out;
  }
};

struct Outcome {
  Table table;
  std::optional<json> report;
  std::string report_suffix;  ///< e.g. "fit" -> <output>.fit.json
};

/// Every flag any subcommand may take. Each subcommand owns one instance so
/// defaults can differ.
struct Settings {
  int n = 2;
  double z = 1.0;
  double delta = 0.0;
  double rho = 1.0;
  double phi = 0.0;
  int k = 0;
  double z_min = 0.0;
  double z_max = 4.0;
  int z_steps = 41;
  double fd_step = 1e-3;
  std::vector<double> z_list{1.0};
  double period = 500.0;
  int samples = 1001;
  double rtol = 1e-12;
  std::vector<int> n_list;
  double alpha = 0.1;
  std::optional<double> z_lo;
  std::optional<double> z_hi;
  int coarse = 41;

  std::string output = "-";
  std::string format = "csv";
  std::string report;
  std::string config;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool raw_units = false;
};

inline std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw InvalidParameter("grid needs at least one point");
  if (!(hi >= lo)) throw InvalidParameter("grid maximum must not be below its minimum");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  return g;
}

inline ModelParams model_from(const Settings& s) {
  ModelParams p{.n_atoms = s.n, .delta = s.delta, .z = s.z, .rho = s.rho, .phi = s.phi};
  p.validate();
  return p;
}

inline ModelParams couplings_from(const Settings& s, double z) {
  ModelParams p{.delta = s.delta, .z = z, .rho = s.rho, .phi = s.phi};
  p.validate_couplings();
  return p;
}

inline StepControl control_from(const Settings& s) {
  if (!(s.rtol > 0.0)) throw InvalidParameter("rtol must be positive");
  StepControl c;
  c.rtol = s.rtol;
  c.atol = s.rtol * 1e-2;
  return c;
}

// ---------------------------------------------------------------------------
// Subcommand bodies

inline Outcome run_basis(const Settings& s) {
  const FockBasis b = build_basis(s.n);
  Outcome o;
  o.table.columns = {"index", "n_a", "n_g", "n_e"};
  for (std::size_t i = 0; i < b.size(); ++i) {
    o.table.rows.push_back({static_cast<double>(i), static_cast<double>(b[i].n_a),
                            static_cast<double>(b[i].n_g), static_cast<double>(b[i].n_e)});
  }
  return o;
}

inline Outcome run_spectrum(const Settings& s) {
  const ModelParams p = model_from(s);
  if (s.k < 0) throw InvalidParameter("--k must be non-negative");
  const FockBasis b = build_basis(p.n_atoms);
  std::vector<double> e;
  if (p.phi == 0.0) {
    const auto h = build_hamiltonian_real(p, b);
    e = s.k == 0 ? eigensolve_dense(h, false).energies : eigensolve_lowest(h, s.k).energies;
  } else {
    const auto h = build_hamiltonian(p, b);
    e = s.k == 0 ? eigensolve_dense(h, false).energies : eigensolve_lowest(h, s.k).energies;
  }
  const double scale = s.raw_units ? 1.0 : p.rho;
  Outcome o;
  o.table.columns = {"index", "energy", "energy_per_N_rho"};
  for (std::size_t i = 0; i < e.size(); ++i) {
    o.table.rows.push_back({static_cast<double>(i), e[i] / scale, e[i] / (p.n_atoms * p.rho)});
  }
  return o;
}

inline Outcome run_sweep(const Settings& s) {
  const ModelParams base = model_from(s);
  const auto zs = linear_grid(s.z_min, s.z_max, s.z_steps);
  const FockBasis b = build_basis(base.n_atoms);
  const double scale = s.raw_units ? 1.0 : base.rho;
  Outcome o;
  o.table.columns = {"z", "E0", "E1", "gap", "atomic_fraction"};
  o.table.rows = parallel_map(zs.size(), s.threads, [&](std::size_t i) {
    ModelParams p = base;
    p.z = zs[i];
    const GroundObservables g = ground_observables(p, b);
    return std::vector<double>{zs[i], g.e0 / scale, g.e1 / scale, (g.e1 - g.e0) / scale,
                               g.atomic_fraction};
  });
  return o;
}

inline Outcome run_meanfield(const Settings& s) {
  const ModelParams base = couplings_from(s, s.z_min);
  const auto zs = linear_grid(s.z_min, s.z_max, s.z_steps);
  const EnergyProfile prof = energy_derivative_profile(zs, base, s.fd_step);
  const double scale = s.raw_units ? 1.0 : base.rho;
  Outcome o;
  o.table.columns = {"z", "mu", "E", "dEdz", "d2Edz2", "a2", "p1", "p2"};
  for (const auto& pt : prof.points) {
    ModelParams p = base;
    p.z = pt.z;
    const GroundSolution g = ground_state(p);
    o.table.rows.push_back({pt.z, g.mu / scale, pt.energy / scale, pt.d_energy, pt.d2_energy,
                            std::norm(g.state.a), std::norm(g.state.b_g), std::norm(g.state.b_e)});
  }
  o.report = json{{"discontinuity_z", prof.discontinuity_z}, {"fd_step", prof.fd_step}};
  o.report_suffix = "profile";
  return o;
}

inline Outcome run_geophase(const Settings& s) {
  if (s.z_list.empty()) throw InvalidParameter("--z needs at least one value");
  for (double z : s.z_list) couplings_from(s, z);
  if (!(s.period > 0.0)) throw InvalidParameter("--period must be positive");
  LoopOptions lo;
  lo.control = control_from(s);
  Outcome o;
  o.table.columns = {"z", "T", "lambda_total", "lambda_dynamic", "lambda_g", "berry_linearized"};
  o.table.rows = parallel_map(s.z_list.size(), s.threads, [&](std::size_t i) {
    const double z = s.z_list[i];
    const LoopResult r = integrate_loop(couplings_from(s, z), s.period, lo);
    return std::vector<double>{z, s.period, r.lambda_total, r.lambda_dynamic, r.lambda_g,
                               berry_phase_linearized(z, s.rho)};
  });
  return o;
}

inline Outcome run_trajectory(const Settings& s) {
  if (s.samples < 2) throw InvalidParameter("--samples must be at least 2");
  if (!(s.period > 0.0)) throw InvalidParameter("--period must be positive");
  LoopOptions lo;
  lo.control = control_from(s);
  lo.samples = s.samples;
  const LoopResult r = integrate_loop(couplings_from(s, s.z), s.period, lo);
  Outcome o;
  o.table.columns = {"t", "phi", "re_a", "im_a", "re_bg", "im_bg", "re_be", "im_be", "norm", "p1", "p2"};
  for (const auto& smp : r.trajectory) {
    const auto& x = smp.state;
    o.table.rows.push_back({smp.t, smp.phi, x.a.real(), x.a.imag(), x.b_g.real(), x.b_g.imag(),
                            x.b_e.real(), x.b_e.imag(), x.norm(), std::norm(x.b_g),
                            std::norm(x.b_e)});
  }
  o.report = json{{"lambda_total", r.lambda_total},
                  {"lambda_dynamic", r.lambda_dynamic},
                  {"lambda_g", r.lambda_g},
                  {"mu0", r.mu0},
                  {"max_norm_drift", r.max_norm_drift}};
  o.report_suffix = "loop";
  return o;
}

inline GapSearchOptions gap_options(const Settings& s) {
  GapSearchOptions g;
  g.coarse_points = s.coarse;
  return g;
}

inline Outcome run_gap_min(const Settings& s) {
  model_from(s);
  auto bracket = default_gap_bracket(s.delta, s.rho);
  if (s.z_lo) bracket.first = *s.z_lo;
  if (s.z_hi) bracket.second = *s.z_hi;
  const GapMinimum g = pseudo_critical_point(s.n, s.delta, s.rho, bracket, gap_options(s));
  Outcome o;
  o.table.columns = {"N", "z_N", "gap_min"};
  o.table.rows.push_back({static_cast<double>(g.n_atoms), g.z_n,
                          s.raw_units ? g.gap_min * s.rho : g.gap_min});
  return o;
}

/// Default N-grid for the scaling fit: 8 even N log-spaced over [100, 1131].
inline std::vector<int> default_scaling_grid() { return log_spaced_even(100, 1131, 8); }

inline Outcome run_scaling(const Settings& s, std::ostream& err) {
  std::vector<int> ns = s.n_list.empty() ? default_scaling_grid() : s.n_list;
  for (int n : ns) model_from([&] { Settings t = s; t.n = n; return t; }());
  const ScalingStudy st = scaling_study(ns, s.delta, s.rho, s.threads, gap_options(s));
  Outcome o;
  o.table.columns = {"N", "z_N", "gap_min"};
  for (const auto& g : st.minima) {
    o.table.rows.push_back({static_cast<double>(g.n_atoms), g.z_n,
                            s.raw_units ? g.gap_min * s.rho : g.gap_min});
  }
  json rep;
  if (st.nu && st.zeta) {
    rep = {{"nu", st.nu->exponent},        {"kappa", st.nu->prefactor},
           {"zeta", st.zeta->exponent},    {"gamma", st.zeta->prefactor},
           {"r2_nu", st.nu->r_squared},    {"r2_zeta", st.zeta->r_squared},
           {"nu_stderr", st.nu->exponent_stderr},
           {"zeta_stderr", st.zeta->exponent_stderr}};
  } else {
    rep = {{"nu", nullptr},   {"kappa", nullptr}, {"zeta", nullptr},
           {"gamma", nullptr}, {"r2_nu", nullptr}, {"r2_zeta", nullptr},
           {"warning", st.fit_error}};
    err << "warning: " << st.fit_error << "; fit report left empty\n";
  }
  o.report = rep;
  o.report_suffix = "fit";
  return o;
}

inline Outcome run_fidelity(const Settings& s) {
  model_from(s);
  const auto zs = linear_grid(s.z_min, s.z_max, s.z_steps);
  const FidelitySweep f = fidelity_sweep(s.n, s.alpha, zs, s.rho, s.threads);
  Outcome o;
  o.table.columns = {"z", "F"};
  for (const auto& pt : f.points) o.table.rows.push_back({pt.z, pt.fidelity});
  o.report = json{{"n_atoms", f.n_atoms},
                  {"alpha", f.alpha},
                  {"z_min", f.z_min},
                  {"f_min", f.f_min},
                  {"local_minima", f.local_minima},
                  {"interior", f.z_min > zs.front() && f.z_min < zs.back()}};
  o.report_suffix = "dip";
  return o;
}

// ---------------------------------------------------------------------------
// Parsing and dispatch

namespace detail {

inline std::string key_of(const CLI::Option* opt) {
  std::string k = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

inline json scalar_from_text(const std::string& text) {
  if (text.empty()) return nullptr;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  if (text == "true") return true;
  if (text == "false") return false;
  return text;
}

inline std::vector<std::string> config_strings(const json& v) {
  std::vector<std::string> out;
  auto one = [](const json& x) {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return std::string(x.get<bool>() ? "true" : "false");
    if (x.is_number_integer()) return std::to_string(x.get<long long>());
    if (x.is_number()) return format_double(x.get<double>());
    throw CLI::ValidationError("config", "unsupported value " + x.dump());
  };
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(one(x));
  } else {
    out.push_back(one(v));
  }
  return out;
}

/// Fill options the user did not give on the command line from a JSON file.
inline void merge_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!cfg.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
  std::map<std::string, CLI::Option*> by_key;
  for (CLI::Option* opt : sub->get_options()) by_key[key_of(opt)] = opt;
  for (const auto& [raw, value] : cfg.items()) {
    std::string k = raw;
    std::replace(k.begin(), k.end(), '-', '_');
    const auto it = by_key.find(k);
    if (it == by_key.end() || k == "config" || k == "help") {
      throw CLI::ValidationError("--config", "unknown key '" + raw + "' for " + sub->get_name());
    }
    if (it->second->count() > 0) continue;  // command line wins
    for (const auto& text : config_strings(value)) it->second->add_result(text);
    it->second->run_callback();
  }
}

inline json resolved_parameters(CLI::App* sub) {
  json out = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string k = key_of(opt);
    if (k == "help") continue;
    const auto& res = opt->results();
    if (res.empty()) {
      out[k] = scalar_from_text(opt->get_default_str());
    } else if (res.size() == 1 && opt->get_items_expected_max() <= 1) {
      out[k] = scalar_from_text(res.front());
    } else {
      json arr = json::array();
      for (const auto& r : res) arr.push_back(scalar_from_text(r));
      out[k] = arr;
    }
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

}  // namespace detail

/// Parse argv, run the selected subcommand and write its artifacts. Data goes
/// to --output (stdout for "-"); manifest and reports go beside it, or to
/// `err` when writing to stdout.
inline int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                              std::ostream& err = std::cerr) {
  CLI::App app{"Atom-molecule conversion: spectra, mean field, criticality and geometric phase",
               "amol"};
  app.require_subcommand(1);
  app.set_version_flag("--version", AMOL_VERSION);
  app.option_defaults()->always_capture_default();

  std::map<std::string, Settings> settings;
  std::map<std::string, std::function<Outcome(const Settings&)>> bodies;

  auto common = [&](CLI::App* sub, Settings& s) {
    sub->add_option("--config", s.config, "JSON file whose keys mirror the flags");
    sub->add_option("--output,-o", s.output, "data file, '-' for stdout");
    sub->add_option("--report", s.report, "path for the JSON report (default <output>.<kind>.json)");
    sub->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--raw-units", s.raw_units, "report energies unscaled by rho");
  };
  auto model = [](CLI::App* sub, Settings& s, bool with_z, bool with_phi) {
    sub->add_option("--n", s.n, "atom number N (even)");
    if (with_z) sub->add_option("--z", s.z, "molecular coupling z");
    sub->add_option("--delta", s.delta, "detuning");
    sub->add_option("--rho", s.rho, "atom-molecule coupling rho");
    if (with_phi) sub->add_option("--phi", s.phi, "coupling phase in [0, 2 pi)");
  };
  auto zgrid = [](CLI::App* sub, Settings& s) {
    sub->add_option("--z-min", s.z_min, "first z");
    sub->add_option("--z-max", s.z_max, "last z");
    sub->add_option("--z-steps", s.z_steps, "number of grid points");
  };
  auto add = [&](const std::string& name, const std::string& help, Settings init,
                 auto&& configure, std::function<Outcome(const Settings&)> body) {
    settings[name] = std::move(init);
    Settings& s = settings[name];
    CLI::App* sub = app.add_subcommand(name, help);
    configure(sub, s);
    common(sub, s);
    bodies[name] = std::move(body);
  };

  add("basis", "list the Fock basis", Settings{.n = 8},
      [&](CLI::App* sub, Settings& s) { sub->add_option("--n", s.n, "atom number N (even)"); },
      run_basis);
  add("spectrum", "exact eigenvalues", Settings{.n = 8},
      [&](CLI::App* sub, Settings& s) {
        model(sub, s, true, true);
        sub->add_option("--k", s.k, "lowest k levels (0 = full spectrum)");
      },
      run_spectrum);
  add("sweep", "ground-state observables over a z grid", Settings{.n = 100},
      [&](CLI::App* sub, Settings& s) {
        model(sub, s, false, false);
        zgrid(sub, s);
      },
      run_sweep);
  add("meanfield", "mean-field ground energy and derivatives", Settings{.z_steps = 401},
      [&](CLI::App* sub, Settings& s) {
        zgrid(sub, s);
        sub->add_option("--delta", s.delta, "detuning");
        sub->add_option("--rho", s.rho, "atom-molecule coupling rho");
        sub->add_option("--fd-step", s.fd_step, "finite-difference step");
      },
      run_meanfield);
  auto dynamics = [](CLI::App* sub, Settings& s) {
    sub->add_option("--delta", s.delta, "detuning");
    sub->add_option("--rho", s.rho, "atom-molecule coupling rho");
    sub->add_option("--period", s.period, "loop period T");
    sub->add_option("--samples", s.samples, "trajectory samples over the loop");
    sub->add_option("--rtol", s.rtol, "integrator relative tolerance");
  };
  add("geophase", "total, dynamic and geometric phase of one phi loop", Settings{},
      [&](CLI::App* sub, Settings& s) {
        sub->add_option("--z", s.z_list, "molecular coupling(s), comma separated")->delimiter(',');
        dynamics(sub, s);
      },
      run_geophase);
  add("trajectory", "sampled mean-field trajectory over one phi loop", Settings{},
      [&](CLI::App* sub, Settings& s) {
        sub->add_option("--z", s.z, "molecular coupling z");
        dynamics(sub, s);
      },
      run_trajectory);
  auto gap = [](CLI::App* sub, Settings& s) {
    sub->add_option("--delta", s.delta, "detuning");
    sub->add_option("--rho", s.rho, "atom-molecule coupling rho");
    sub->add_option("--coarse", s.coarse, "coarse scan points before refinement");
  };
  add("gap-min", "pseudo-critical point of one N", Settings{.n = 100},
      [&](CLI::App* sub, Settings& s) {
        sub->add_option("--n", s.n, "atom number N (even)");
        gap(sub, s);
        sub->add_option("--z-lo", s.z_lo, "bracket start (default z_c - rho/2)");
        sub->add_option("--z-hi", s.z_hi, "bracket end (default z_c + rho/4)");
      },
      run_gap_min);
  add("scaling", "gap minima over an N grid and power-law fits", Settings{},
      [&](CLI::App* sub, Settings& s) {
        sub->add_option("--n-list", s.n_list, "comma separated even N values")->delimiter(',');
        gap(sub, s);
      },
      [&err](const Settings& s) { return run_scaling(s, err); });
  add("fidelity", "ground-state fidelity between delta = 0 and delta = alpha",
      Settings{.n = 100, .z_min = 1.0, .z_max = 3.0, .z_steps = 201},
      [&](CLI::App* sub, Settings& s) {
        sub->add_option("--n", s.n, "atom number N (even)");
        sub->add_option("--alpha", s.alpha, "detuning of the second state");
        sub->add_option("--rho", s.rho, "atom-molecule coupling rho");
        zgrid(sub, s);
      },
      run_fidelity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Settings& s = settings[name];
  const auto start = std::chrono::steady_clock::now();
  Outcome result;
  try {
    if (!s.config.empty()) detail::merge_config(sub, s.config);
    result = bodies[name](s);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string data;
  if (s.format == "json") {
    json doc{{"columns", result.table.columns}, {"rows", result.table.rows}};
    if (result.report) doc[result.report_suffix] = *result.report;
    data = doc.dump(2) + "\n";
  } else {
    data = result.table.to_csv();
  }

  json manifest{{"tool", "amol"},
                {"version", AMOL_VERSION},
                {"subcommand", name},
                {"parameters", detail::resolved_parameters(sub)},
                {"rows", result.table.rows.size()},
                {"wall_time_s", wall},
                {"timestamp", detail::utc_timestamp()}};
  try {
    const bool to_stdout = s.output == "-";
    if (to_stdout) {
      out << data;
      out.flush();
    } else {
      detail::write_text(s.output, data);
    }
    if (result.report && s.format == "csv") {
      const std::string rep = result.report->dump(2) + "\n";
      if (!s.report.empty()) {
        detail::write_text(s.report, rep);
      } else if (to_stdout) {
        err << rep;
      } else {
        detail::write_text(s.output + "." + result.report_suffix + ".json", rep);
      }
    }
    if (to_stdout) {
      err << manifest.dump(2) << "\n";
    } else {
      detail::write_text(s.output + ".manifest.json", manifest.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace amol::cli
