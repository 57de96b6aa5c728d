#pragma once

// Experiment driver: geometry / params / initial data from a config, the run
// itself, sampled inequality batches, sweeps and the output files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "renyi/analytic.hpp"
#include "renyi/config.hpp"
#include "renyi/diagnostics.hpp"
#include "renyi/flow.hpp"
#include "renyi/functionals.hpp"
#include "renyi/geometry.hpp"
#include "renyi/inequalities.hpp"

namespace renyi {

inline std::pair<double, double> extent_of(const ExperimentConfig& c) {
  if (c.geometry.extent) return *c.geometry.extent;
  if (c.geometry.geometry_kind() == GeometryKind::WeightedInterval) return {-0.5, 0.5};
  if (c.geometry.geometry_kind() == GeometryKind::ZonalSphere) return {0.0, std::numbers::pi};
  return {0.0, 1.0};
}

inline Geometry build_geometry(const ExperimentConfig& c) {
  const auto [lo, hi] = extent_of(c);
  const int N = c.geometry.N;
  switch (c.geometry.geometry_kind()) {
    case GeometryKind::Torus1D: return Geometry::torus1d(N, lo, hi);
    case GeometryKind::Torus2D: return Geometry::torus2d(N, lo, hi);
    case GeometryKind::ZonalSphere: return Geometry::zonal_sphere(N);
    case GeometryKind::WeightedInterval: {
      const auto phi = detail::parse_preset(c.geometry.phi, "geometry.phi");
      return Geometry::weighted_interval(N, phi.name == "quadratic" ? *phi.arg : 0.0, lo, hi);
    }
    case GeometryKind::ScaledTorus: {
      const auto s = detail::parse_preset(c.geometry.scale, "geometry.scale");
      return Geometry::scaled_torus(N, *s.arg, c.geometry.dim, lo, hi);
    }
  }
  throw ConfigError("geometry.kind", "unsupported");
}

inline FlowParams build_params(const ExperimentConfig& c) {
  return FlowParams(c.p, c.m_value(), c.geometry.topological_dim(), c.positivity_floor);
}

inline BarenblattSpec barenblatt_spec(const ExperimentConfig& c) {
  const double n = c.geometry.topological_dim();
  return BarenblattSpec{n, c.p, c.initial.arg ? *c.initial.arg : barenblatt_constant(n, c.p).C};
}

namespace detail {

/// Cell averages of the Barenblatt solution centred in the domain.
inline std::vector<double> barenblatt_cells(const Geometry& geo, const BarenblattSpec& s, double t) {
  const double h = geo.spacing();
  const double mid = 0.5 * (geo.lo() + geo.hi());
  std::vector<double> u(geo.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = geo.coord(i, 0) - mid;
    if (geo.axes() == 1) {
      u[i] = barenblatt_cell_average(x - 0.5 * h, x + 0.5 * h, t, s);
    } else {
      const double y = geo.coord(i, 1) - mid;
      u[i] = barenblatt_cell_average(x - 0.5 * h, x + 0.5 * h, y - 0.5 * h, y + 0.5 * h, t, s);
    }
  }
  return u;
}

/// Unit-amplitude first mode of each geometry.
inline double first_mode(const Geometry& geo, std::size_t i) {
  const double L = geo.hi() - geo.lo();
  const double x = (geo.coord(i, 0) - geo.lo()) / L;
  switch (geo.kind()) {
    case GeometryKind::Torus1D: return std::sin(2.0 * std::numbers::pi * x);
    case GeometryKind::ScaledTorus:
    case GeometryKind::Torus2D:
      if (geo.axes() == 1) return std::sin(2.0 * std::numbers::pi * x);
      return std::sin(2.0 * std::numbers::pi * x) *
             std::sin(2.0 * std::numbers::pi * (geo.coord(i, 1) - geo.lo()) / L);
    case GeometryKind::WeightedInterval: return std::cos(std::numbers::pi * x);
    case GeometryKind::ZonalSphere: return std::cos(geo.coord(i, 0));
  }
  return 0.0;
}

/// Smooth random perturbation in [-1, 1] built from the first few modes.
inline std::vector<double> random_modes(const Geometry& geo, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double L = geo.hi() - geo.lo();
  const double tau = 2.0 * std::numbers::pi;
  std::vector<double> f(geo.size(), 0.0);
  for (int k = 1; k <= 4; ++k) {
    const double amp = (2.0 * uniform01(rng) - 1.0) / (k * k);
    const double phase = tau * uniform01(rng);
    const int ky = static_cast<int>(uniform01(rng) * 3.0) - 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double x = (geo.coord(i, 0) - geo.lo()) / L;
      switch (geo.kind()) {
        case GeometryKind::WeightedInterval: f[i] += amp * std::cos(k * std::numbers::pi * x); break;
        case GeometryKind::ZonalSphere: f[i] += amp * std::cos(k * geo.coord(i, 0)); break;
        default:
          if (geo.axes() == 1) {
            f[i] += amp * std::cos(tau * k * x + phase);
          } else {
            const double y = (geo.coord(i, 1) - geo.lo()) / L;
            f[i] += amp * std::cos(tau * (k * x + ky * y) + phase);
          }
      }
    }
  }
  double mx = 0.0;
  for (double v : f) mx = std::max(mx, std::abs(v));
  if (mx > 0.0)
    for (double& v : f) v /= mx;
  return f;
}

}  // namespace detail

/// Initial density from the config preset at time t0.
inline ScalarField initial_data(const ExperimentConfig& c, const Geometry& geo) {
  ScalarField u{std::vector<double>(geo.size()), c.t0};
  const auto& ini = c.initial;
  if (ini.name == "constant") {
    for (double& x : u.values) x = ini.arg ? *ini.arg : 1.0;
  } else if (ini.name == "sine-bump") {
    for (std::size_t i = 0; i < u.size(); ++i) u.values[i] = 1.0 + *ini.arg * detail::first_mode(geo, i);
  } else if (ini.name == "random-smooth") {
    const auto f = detail::random_modes(geo, ini.arg ? static_cast<std::uint64_t>(*ini.arg) : c.seed);
    for (std::size_t i = 0; i < u.size(); ++i) u.values[i] = 1.0 + 0.5 * f[i];
  } else if (ini.name == "gaussian") {
    const double var = *ini.arg;
    const double mid = 0.5 * (geo.lo() + geo.hi());
    for (std::size_t i = 0; i < u.size(); ++i) {
      double r2;
      if (geo.kind() == GeometryKind::ZonalSphere) {
        r2 = geo.coord(i, 0) * geo.coord(i, 0);
      } else {
        const double dx = geo.coord(i, 0) - mid;
        r2 = dx * dx;
        if (geo.axes() == 2) {
          const double dy = geo.coord(i, 1) - mid;
          r2 += dy * dy;
        }
      }
      u.values[i] = std::exp(-0.5 * r2 / var);
    }
    const double mass = integrate(geo, u);
    if (!(mass > 0.0)) throw ConfigError("initial", "gaussian variance too small for the grid");
    for (double& x : u.values) x /= mass;
  } else if (ini.name == "barenblatt") {
    const auto s = barenblatt_spec(c);
    const double half = 0.5 * (geo.hi() - geo.lo());
    const double R = s.support_radius(c.t1);
    if (!(R + 2.0 * geo.spacing() < half))
      throw ConfigError("initial", "Barenblatt support radius " + std::to_string(R) + " at t1 does not fit the domain");
    u.values = detail::barenblatt_cells(geo, s, c.t0);
  } else {
    throw ConfigError("initial", "unknown preset '" + ini.text + "'");
  }
  return u;
}

inline AnalysisOptions analysis_options(const ExperimentConfig& c) {
  AnalysisOptions o;
  o.time_origin = c.time_origin;
  o.min_tau = c.min_tau;
  o.equality_mode = c.barenblatt();
  o.front_fraction = c.front_fraction;
  o.erosion = c.erosion;
  return o;
}

// ---------------------------------------------------------------------------
// Sampled inequality batches

struct InequalityRow {
  int n = 0;
  double p = 0.0;
  std::string inequality;  ///< "isoperimetric" or "gns"
  std::string sample;      ///< "random" or "barenblatt"
  std::uint64_t seed = 0;
  double margin = 0.0;
  double scale = 1.0;
  double relative = 0.0;
};

struct InequalityBatch {
  std::vector<InequalityRow> rows;
  std::vector<IsoperimetricConstants> constants;
  std::vector<GammaValue> gammas;
  std::vector<double> barenblatt_C;
  double worst_random = INFINITY;  ///< min relative margin over random samples
  double worst_extremal = 0.0;     ///< max |relative margin| at the Barenblatt extremal
  double tol_random = 1e-6;
  double tol_extremal = 1e-4;

  bool passed() const { return worst_random >= -tol_random && worst_extremal < tol_extremal; }
};

/// Isoperimetric and GNS margins on `count` seeded random densities and on
/// the Barenblatt extremal, for every (n, p) in `spec`.
inline InequalityBatch run_inequalities(const InequalitySpec& spec, std::uint64_t seed, bool iso, bool gns,
                                        const Tolerances& tol = {}) {
  InequalityBatch out;
  out.tol_random = tol.inequality_random;
  out.tol_extremal = tol.inequality_extremal;
  std::mt19937_64 seeder(seed);
  for (int n : spec.dims) {
    for (double p : spec.ps) {
      const double nd = n;
      const auto g = gamma_mp_detail(nd, p);
      const auto c = convert_constants(g.value, nd, p);
      out.gammas.push_back(g);
      out.constants.push_back(c);
      const auto bb = unit_barenblatt(nd, p);
      out.barenblatt_C.push_back(bb.C);
      const double e = p - 0.5;  // g = u^{p - 1/2} turns N_p I_p >= gamma into GNS
      auto add = [&](const std::string& which, const std::string& sample, std::uint64_t s, const Margin& m) {
        InequalityRow r{n, p, which, sample, s, m.margin, m.scale, m.relative()};
        if (sample == "random") {
          out.worst_random = std::min(out.worst_random, r.relative);
        } else {
          out.worst_extremal = std::max(out.worst_extremal, std::abs(r.relative));
        }
        out.rows.push_back(r);
      };
      const auto fb = barenblatt_density(bb);
      if (iso) add("isoperimetric", "barenblatt", 0, check_isoperimetric(fb, nd, p, g.value));
      if (gns) add("gns", "barenblatt", 0, check_gns(power_transform(fb, e), nd, c));
      for (int k = 0; k < spec.count; ++k) {
        const std::uint64_t s = seeder();
        const auto f = random_bumps(s, nd);
        if (iso) add("isoperimetric", "random", s, check_isoperimetric(f, nd, p, g.value));
        if (gns) add("gns", "random", s, check_gns(power_transform(f, e), nd, c));
      }
    }
  }
  if (out.rows.empty()) out.worst_random = 0.0;
  return out;
}

inline json constants_to_json(const IsoperimetricConstants& c, const GammaValue& g, double C) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return json{{"m", c.m},
              {"p", c.p},
              {"barenblatt_C", C},
              {"gamma_mp", c.gamma_mp},
              {"gamma_time_spread", g.t_spread},
              {"barenblatt_mass_residual", g.mass_residual},
              {"q", c.q},
              {"theta", num(c.theta)},
              {"gns_A", num(c.A)},
              {"gns_exponent", num(c.gns_exponent)},
              {"sobolev_coeff", num(c.sobolev_coeff)},
              {"nash_coeff", c.nash_coeff},
              {"gamma_shannon", c.gamma_shannon},
              {"kappa_star", c.kappa_star},
              {"convention", std::floor(c.m) == c.m ? "integer dimension" : "computed convention"}};
}

inline json inequality_constants_json(const InequalityBatch& b) {
  json arr = json::array();
  for (std::size_t i = 0; i < b.constants.size(); ++i)
    arr.push_back(constants_to_json(b.constants[i], b.gammas[i], b.barenblatt_C[i]));
  return json{{"constants", arr},
              {"worst_random_margin", b.worst_random},
              {"worst_extremal_margin", b.worst_extremal},
              {"tolerance_random", b.tol_random},
              {"tolerance_extremal", b.tol_extremal},
              {"passed", b.passed()}};
}

// ---------------------------------------------------------------------------
// Runs

struct RunResult {
  ExperimentConfig config;
  Analysis analysis;
  std::vector<CheckReport> reports;
  SolverStats stats;
  std::optional<InequalityBatch> inequalities;
  bool checked = false;

  bool passed() const {
    for (const auto& r : reports)
      if (!r.passed()) return false;
    return !inequalities || inequalities->passed();
  }
};

namespace detail {

inline bool wants(const ExperimentConfig& c, const std::string& name) {
  return c.checks.empty() || std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
}

inline std::vector<std::string> trajectory_checks(const ExperimentConfig& c) {
  std::vector<std::string> out;
  for (const auto& n : c.checks)
    if (!is_inequality_check(n) && n != kBarenblattOracle) out.push_back(n);
  return out;
}

/// True when every selected check works on radial test functions only.
inline bool only_inequality_checks(const ExperimentConfig& c) {
  return !c.checks.empty() && std::all_of(c.checks.begin(), c.checks.end(), is_inequality_check);
}

/// Relative L1 distance to the cell-averaged analytic solution at every sample.
inline CheckReport barenblatt_oracle(const ExperimentConfig& c, const Geometry& geo, const Trajectory& traj,
                                     const Analysis& an) {
  const auto s = barenblatt_spec(c);
  auto r = make_report(an, kBarenblattOracle, "residual<=tol", c.tolerances.barenblatt_l1);
  r.verdict = Verdict::Pass;
  const auto& w = geo.weights();
  std::vector<double> res;
  for (const auto& u : traj.samples) {
    const auto ex = barenblatt_cells(geo, s, u.t);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      err += std::abs(u.values[i] - ex[i]) * w[i];
      ref += std::abs(ex[i]) * w[i];
    }
    r.times.push_back(u.t);
    r.values.push_back(err / ref);
    res.push_back(err / ref);
  }
  finish_residual(r, res, 1.0);
  r.note = "relative L1 distance to cell averages of the analytic solution";
  return r;
}

}  // namespace detail

/// Runs the flow and, when `with_checks`, the selected checks.
inline RunResult run_experiment(const ExperimentConfig& c, bool with_checks = true) {
  validate(c);
  RunResult res;
  res.config = c;
  res.checked = with_checks;
  const bool traj_needed = !with_checks || !detail::only_inequality_checks(c);

  if (traj_needed) {
    const auto geo = build_geometry(c);
    const auto params = build_params(c);
    const auto u0 = initial_data(c, geo);
    Trajectory traj;
    try {
      traj = evolve(geo, u0, c.t1, params, c.sample_every);
    } catch (const NumericError& e) {
      throw NumericError(std::string("run failed: ") + e.what());
    }
    res.stats = traj.stats;
    const auto opts = analysis_options(c);
    res.analysis = analyze(geo, traj, params, opts);
    if (with_checks) {
      const auto names = detail::trajectory_checks(c);
      const bool any_traj = c.checks.empty() || !names.empty();
      if (any_traj) {
        res.reports = run_checks(res.analysis, names, c.tolerances);
        const auto refined = analyze(geo, traj, params.with_floor(0.1 * c.positivity_floor), opts);
        apply_floor_stability(res.reports, run_checks(refined, names, c.tolerances));
      }
      if (c.barenblatt() && detail::wants(c, kBarenblattOracle))
        res.reports.push_back(detail::barenblatt_oracle(c, geo, traj, res.analysis));
    }
  }
  if (with_checks) {
    const bool iso = std::find(c.checks.begin(), c.checks.end(), "isoperimetric") != c.checks.end();
    const bool gns = std::find(c.checks.begin(), c.checks.end(), "gns") != c.checks.end();
    if (iso || gns) res.inequalities = run_inequalities(c.inequalities, c.seed, iso, gns, c.tolerances);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace detail

inline const std::vector<std::string>& functionals_columns() {
  static const std::vector<std::string> cols{"t",      "H_p",    "N_p",          "I_p",
                                             "E",      "Eprime", "Edoubleprime", "N_u",
                                             "W_p",    "dW_dt",  "d2Np_dt2_formula", "norm_up"};
  return cols;
}

inline std::string functionals_csv(const std::vector<FunctionalSample>& samples) {
  std::string out;
  for (std::size_t i = 0; i < functionals_columns().size(); ++i)
    out += (i ? "," : "") + functionals_columns()[i];
  out += "\n";
  for (const auto& s : samples) {
    const double row[] = {s.t, s.H_p, s.N_p, s.I_p, s.E, s.Eprime, s.Edoubleprime, s.N_u, s.W_p, s.dW_dt,
                          s.d2Np_dt2_formula, s.norm_up};
    for (std::size_t i = 0; i < std::size(row); ++i) out += (i ? "," : "") + detail::fmt17(row[i]);
    out += "\n";
  }
  return out;
}

inline json report_to_json(const CheckReport& r) {
  json values = json::array();
  for (double v : r.values) values.push_back(detail::number_or_null(v));
  return json{{"name", r.name},
              {"comparison", r.comparison},
              {"tolerance", r.tolerance},
              {"worst", detail::number_or_null(r.worst)},
              {"verdict", to_string(r.verdict)},
              {"curvature_K", r.curvature_K},
              {"curvature_K2", r.curvature_K2},
              {"floor_stable", r.floor_stable},
              {"note", r.note},
              {"times", r.times},
              {"values", values}};
}

inline json run_to_json(const RunResult& res) {
  const auto& c = res.config;
  const auto& an = res.analysis;
  json j;
  j["config"] = config_to_json(c);
  j["metadata"] = {{"geometry", c.geometry.kind},
                   {"N", c.geometry.N},
                   {"h", an.h},
                   {"n", c.geometry.topological_dim()},
                   {"p", c.p},
                   {"m", c.m_value()},
                   {"sigma", an.sigma},
                   {"kappa", an.kappa},
                   {"certified_K", an.K},
                   {"certified_K2", an.K2},
                   {"samples", an.samples.size()},
                   {"equality_mode", an.opts.equality_mode},
                   {"solver_steps", res.stats.steps},
                   {"dt_min", detail::number_or_null(res.stats.dt_min)},
                   {"dt_max", res.stats.dt_max}};
  json checks = json::array();
  for (const auto& r : res.reports) checks.push_back(report_to_json(r));
  j["checks"] = checks;
  if (res.inequalities) j["inequalities"] = inequality_constants_json(*res.inequalities);
  j["checked"] = res.checked;
  j["passed"] = res.passed();
  return j;
}

inline std::string inequality_csv(const InequalityBatch& b) {
  std::string out = "n,p,inequality,sample,seed,margin,scale,relative\n";
  for (const auto& r : b.rows)
    out += std::to_string(r.n) + "," + detail::fmt17(r.p) + "," + r.inequality + "," + r.sample + "," +
           std::to_string(r.seed) + "," + detail::fmt17(r.margin) + "," + detail::fmt17(r.scale) + "," +
           detail::fmt17(r.relative) + "\n";
  return out;
}

/// functionals.csv, report.json and (with inequality checks) constants.json + margins.csv.
inline void write_outputs(const RunResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (!res.analysis.samples.empty()) detail::write_text(dir / "functionals.csv", functionals_csv(res.analysis.samples));
  detail::write_text(dir / "report.json", run_to_json(res).dump(2) + "\n");
  if (res.inequalities) {
    detail::write_text(dir / "constants.json", inequality_constants_json(*res.inequalities).dump(2) + "\n");
    detail::write_text(dir / "margins.csv", inequality_csv(*res.inequalities));
  }
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double value = 0.0;
  RunResult result;
};

/// Config for one sweep point. An N sweep scales the sampling interval by
/// N_base / N so that time and space are refined together.
inline ExperimentConfig sweep_point(const ExperimentConfig& base, const std::string& axis, double v) {
  ExperimentConfig c = base;
  c.sweep.reset();
  if (axis == "p") {
    c.p = v;
  } else if (axis == "m") {
    c.m = v;
  } else if (axis == "K") {
    char buf[64];
    std::snprintf(buf, sizeof buf, "quadratic:%.17g", v);
    c.geometry.phi = buf;
  } else if (axis == "N") {
    c.sample_every = base.sample_every * base.geometry.N / v;
    c.geometry.N = static_cast<int>(v);
  } else {
    throw ConfigError("sweep.axis", "must be one of p, K, m, N");
  }
  return c;
}

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base) {
  if (!base.sweep) throw ConfigError("sweep", "missing sweep block");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < base.sweep->values.size(); ++i) {
    const double v = base.sweep->values[i];
    ExperimentConfig c;
    try {
      c = sweep_point(base, base.sweep->axis, v);
      validate(c);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep.values[" + std::to_string(i) + "]", e.what());
    }
    rows.push_back({v, run_experiment(c, true)});
  }
  return rows;
}

/// One row per sweep value with the worst value of every check.
inline std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
  std::vector<std::string> names;
  for (const auto& row : rows)
    for (const auto& r : row.result.reports)
      if (std::find(names.begin(), names.end(), r.name) == names.end()) names.push_back(r.name);
  std::string out = axis;
  for (const auto& n : names) out += "," + n;
  out += ",passed\n";
  for (const auto& row : rows) {
    out += detail::fmt17(row.value);
    for (const auto& n : names) {
      double w = std::numeric_limits<double>::quiet_NaN();
      for (const auto& r : row.result.reports)
        if (r.name == n) w = r.worst;
      out += "," + detail::fmt17(w);
    }
    out += row.result.passed() ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace renyi
