#pragma once

// JSON experiment configuration. Everything is validated before any compute;
// errors name the offending field as a JSON path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "renyi/diagnostics.hpp"
#include "renyi/error.hpp"

namespace renyi {

using json = nlohmann::json;

struct GeometrySpec {
  std::string kind = "Torus1D";
  int N = 256;
  std::optional<std::pair<double, double>> extent;
  std::string phi = "zero";
  std::string scale;  ///< "exp:c", ScaledTorus only
  int dim = 1;        ///< ScaledTorus only

  GeometryKind geometry_kind() const;
  int topological_dim() const;
};

/// Named preset with an optional numeric argument, e.g. "sine-bump:0.5".
struct Preset {
  std::string name;
  std::optional<double> arg;
  std::string text;
};

struct InequalitySpec {
  std::vector<int> dims{1, 2};
  std::vector<double> ps{1.5, 2.0};
  int count = 100;
};

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name = "experiment";
  GeometrySpec geometry;
  double p = 2.0;
  std::optional<double> m;
  double positivity_floor = 1e-10;
  Preset initial;
  double t0 = 0.0;
  double t1 = 0.0;
  double sample_every = 0.0;
  double time_origin = 0.0;
  double min_tau = 0.0;
  double front_fraction = 0.0;
  int erosion = 2;
  std::vector<std::string> checks;
  Tolerances tolerances;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  InequalitySpec inequalities;
  std::optional<SweepSpec> sweep;

  double m_value() const { return m ? *m : static_cast<double>(geometry.topological_dim()); }
  bool barenblatt() const { return initial.name == "barenblatt"; }
};

/// Checks evaluated on radial test functions rather than a trajectory.
inline const std::vector<std::string>& inequality_check_names() {
  static const std::vector<std::string> names{"isoperimetric", "gns"};
  return names;
}

inline bool is_inequality_check(const std::string& c) {
  const auto& v = inequality_check_names();
  return std::find(v.begin(), v.end(), c) != v.end();
}

/// Analytic-solution comparison, available with the Barenblatt preset.
inline const std::string kBarenblattOracle = "barenblatt_oracle";

inline bool known_check(const std::string& c) {
  const auto& tn = check_names();
  return std::find(tn.begin(), tn.end(), c) != tn.end() || is_inequality_check(c) || c == kBarenblattOracle;
}

inline GeometryKind GeometrySpec::geometry_kind() const {
  if (kind == "Torus1D") return GeometryKind::Torus1D;
  if (kind == "Torus2D") return GeometryKind::Torus2D;
  if (kind == "WeightedInterval") return GeometryKind::WeightedInterval;
  if (kind == "ZonalSphere") return GeometryKind::ZonalSphere;
  if (kind == "ScaledTorus") return GeometryKind::ScaledTorus;
  throw ConfigError("geometry.kind", "unknown geometry '" + kind + "'");
}

inline int GeometrySpec::topological_dim() const {
  switch (geometry_kind()) {
    case GeometryKind::Torus2D:
    case GeometryKind::ZonalSphere: return 2;
    case GeometryKind::ScaledTorus: return dim;
    default: return 1;
  }
}

namespace detail {

inline Preset parse_preset(const std::string& text, const std::string& path) {
  Preset p;
  p.text = text;
  const auto colon = text.find(':');
  p.name = text.substr(0, colon);
  if (colon != std::string::npos) {
    const std::string arg = text.substr(colon + 1);
    try {
      std::size_t used = 0;
      p.arg = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw ConfigError(path, "preset argument '" + arg + "' is not a number");
    }
    if (!std::isfinite(*p.arg)) throw ConfigError(path, "preset argument must be finite");
  }
  return p;
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key, "missing or of the wrong type");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get_field<T>(j, key, path);
}

inline double finite_number(const json& j, const std::string& key, const std::string& path) {
  const double v = get_field<double>(j, key, path);
  if (!std::isfinite(v)) throw ConfigError(path + "." + key, "must be finite");
  return v;
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }) == keys.end())
      throw ConfigError(path + "." + it.key(), "unknown field");
  }
}

struct TolField {
  const char* key;
  double Tolerances::*member;
};

inline const std::vector<TolField>& tolerance_fields() {
  static const std::vector<TolField> f{
      {"dissipation_first", &Tolerances::dissipation_first},
      {"dissipation_second", &Tolerances::dissipation_second},
      {"entropy_fisher", &Tolerances::hip},
      {"d2Np_identity", &Tolerances::thm5},
      {"epci_flat", &Tolerances::epci_flat},
      {"epci", &Tolerances::epci},
      {"epci_equality", &Tolerances::epci_equality},
      {"aronson_benilan", &Tolerances::aronson_benilan},
      {"ab_equality", &Tolerances::ab_equality},
      {"fisher_bound", &Tolerances::fisher},
      {"fisher_equality", &Tolerances::fisher_equality},
      {"w_rate", &Tolerances::w_rate},
      {"w_identity", &Tolerances::w_identity},
      {"ni_rate", &Tolerances::wnu2},
      {"niw_identity", &Tolerances::niw},
      {"niw_inequality", &Tolerances::niw_inequality},
      {"rigidity_ode", &Tolerances::rigidity},
      {"trace_lemma", &Tolerances::lemma},
      {"mass", &Tolerances::mass},
      {"barenblatt_oracle", &Tolerances::barenblatt_l1},
      {"inequality_random", &Tolerances::inequality_random},
      {"inequality_extremal", &Tolerances::inequality_extremal},
  };
  return f;
}

}  // namespace detail

inline json tolerances_to_json(const Tolerances& t) {
  json j = json::object();
  for (const auto& f : detail::tolerance_fields()) j[f.key] = t.*(f.member);
  return j;
}

/// Cross-field validation; throws ConfigError with a field path.
inline void validate(const ExperimentConfig& c) {
  const auto& g = c.geometry;
  const auto kind = g.geometry_kind();
  if (g.N < 4) throw ConfigError("geometry.N", "need at least 4 nodes per axis");
  if (kind == GeometryKind::ScaledTorus && g.dim != 1 && g.dim != 2)
    throw ConfigError("geometry.dim", "ScaledTorus dimension must be 1 or 2");
  if (g.extent) {
    if (!(g.extent->second > g.extent->first)) throw ConfigError("geometry.extent", "need lo < hi");
    if (kind == GeometryKind::ZonalSphere) throw ConfigError("geometry.extent", "ZonalSphere has a fixed extent");
  }
  const auto phi = detail::parse_preset(g.phi, "geometry.phi");
  if (phi.name != "zero" && phi.name != "quadratic") throw ConfigError("geometry.phi", "unknown preset '" + g.phi + "'");
  if (phi.name == "quadratic") {
    if (kind != GeometryKind::WeightedInterval)
      throw ConfigError("geometry.phi", "a quadratic potential needs a WeightedInterval");
    if (!phi.arg || *phi.arg < 0.0) throw ConfigError("geometry.phi", "quadratic:a needs a >= 0");
  }
  if (kind == GeometryKind::ScaledTorus) {
    const auto s = detail::parse_preset(g.scale, "geometry.scale");
    if (s.name != "exp" || !s.arg) throw ConfigError("geometry.scale", "expected \"exp:c\"");
  } else if (!g.scale.empty()) {
    throw ConfigError("geometry.scale", "only ScaledTorus takes a scale law");
  }

  const int n = g.topological_dim();
  const double m = c.m_value();
  if (!(m >= n)) throw ConfigError("flow.m", "m must satisfy m >= n = " + std::to_string(n));
  if (phi.name == "quadratic" && *phi.arg > 0.0 && !(m > n))
    throw ConfigError("flow.m", "a non-constant potential needs m > n");
  if (!(c.p > 1.0 - 2.0 / m)) throw ConfigError("flow.p", "p must exceed 1 - 2/m");
  if (c.p == 1.0) throw ConfigError("flow.p", "p = 1 is the linear heat flow, not supported by the Renyi checks");
  if (!(c.positivity_floor >= 0.0)) throw ConfigError("flow.positivity_floor", "must be >= 0");

  const auto& ini = c.initial;
  if (ini.name == "constant") {
    if (ini.arg && !(*ini.arg > 0.0)) throw ConfigError("initial", "constant value must be positive");
  } else if (ini.name == "sine-bump") {
    if (!ini.arg || !(*ini.arg >= 0.0 && *ini.arg < 1.0))
      throw ConfigError("initial", "sine-bump amplitude must lie in [0, 1)");
  } else if (ini.name == "gaussian") {
    if (!ini.arg || !(*ini.arg > 0.0)) throw ConfigError("initial", "gaussian variance must be positive");
  } else if (ini.name == "random-smooth") {
    if (ini.arg && (*ini.arg < 0.0 || *ini.arg != std::floor(*ini.arg)))
      throw ConfigError("initial", "random-smooth seed must be a nonnegative integer");
  } else if (ini.name == "barenblatt") {
    if (kind != GeometryKind::Torus1D && kind != GeometryKind::Torus2D)
      throw ConfigError("initial", "the Barenblatt preset needs a Torus1D or Torus2D geometry");
    if (!(c.p > 1.0)) throw ConfigError("initial", "the Barenblatt preset needs p > 1 (compact support)");
    if (ini.arg && !(*ini.arg > 0.0)) throw ConfigError("initial", "Barenblatt constant C must be positive");
    if (!(c.t0 > 0.0)) throw ConfigError("time.t0", "the Barenblatt preset starts at t0 > 0");
    if (m != n) throw ConfigError("flow.m", "the Barenblatt preset needs m = n");
  } else {
    throw ConfigError("initial", "unknown preset '" + ini.text + "'");
  }

  if (!(c.t1 > c.t0)) throw ConfigError("time.t1", "must exceed t0");
  if (!(c.sample_every > 0.0)) throw ConfigError("time.sample_every", "must be positive");
  const double ratio = (c.t1 - c.t0) / c.sample_every;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio)
    throw ConfigError("time.sample_every", "must divide t1 - t0");
  if (std::round(ratio) < 4.0) throw ConfigError("time.sample_every", "need at least 5 samples");
  if (!(c.time_origin <= c.t0)) throw ConfigError("time.time_origin", "must not exceed t0");
  if (!(c.min_tau >= 0.0)) throw ConfigError("time.min_tau", "must be >= 0");
  if (!(c.front_fraction >= 0.0 && c.front_fraction < 1.0))
    throw ConfigError("checks_options.front_fraction", "must lie in [0, 1)");
  if (c.erosion < 0) throw ConfigError("checks_options.erosion", "must be >= 0");

  for (std::size_t i = 0; i < c.checks.size(); ++i) {
    const auto& name = c.checks[i];
    if (!known_check(name)) throw ConfigError("checks[" + std::to_string(i) + "]", "unknown check '" + name + "'");
    if (name == kBarenblattOracle && !c.barenblatt())
      throw ConfigError("checks[" + std::to_string(i) + "]", "barenblatt_oracle needs the Barenblatt preset");
  }

  for (std::size_t i = 0; i < c.inequalities.dims.size(); ++i)
    if (c.inequalities.dims[i] < 1) throw ConfigError("inequalities.dims[" + std::to_string(i) + "]", "must be >= 1");
  for (std::size_t i = 0; i < c.inequalities.ps.size(); ++i)
    if (!(c.inequalities.ps[i] > 1.0))
      throw ConfigError("inequalities.ps[" + std::to_string(i) + "]", "sampled inequality checks use p > 1");
  if (c.inequalities.count < 1) throw ConfigError("inequalities.count", "must be >= 1");

  if (c.sweep) {
    const auto& s = *c.sweep;
    if (s.axis != "p" && s.axis != "K" && s.axis != "m" && s.axis != "N")
      throw ConfigError("sweep.axis", "must be one of p, K, m, N");
    if (s.values.empty()) throw ConfigError("sweep.values", "must not be empty");
    if (s.axis == "K" && kind != GeometryKind::WeightedInterval)
      throw ConfigError("sweep.axis", "the K axis varies the WeightedInterval potential");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double v = s.values[i];
      const std::string path = "sweep.values[" + std::to_string(i) + "]";
      if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
      if (s.axis == "N" && (v < 4 || v != std::floor(v))) throw ConfigError(path, "N must be an integer >= 4");
      if (s.axis == "K" && v < 0.0) throw ConfigError(path, "the potential coefficient must be >= 0");
    }
  }
}

/// Parses and validates a config document.
inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("$", "config must be a JSON object");
  detail::reject_unknown(j, "$", {"name", "geometry", "flow", "initial", "time", "checks", "checks_options",
                                  "tolerances", "output", "seed", "inequalities", "sweep"});
  ExperimentConfig c;
  c.name = detail::get_or<std::string>(j, "name", "$", c.name);

  if (!j.contains("geometry") || !j["geometry"].is_object()) throw ConfigError("geometry", "missing object");
  const auto& g = j["geometry"];
  detail::reject_unknown(g, "geometry", {"kind", "N", "extent", "phi", "scale", "dim"});
  c.geometry.kind = detail::get_field<std::string>(g, "kind", "geometry");
  c.geometry.N = detail::get_field<int>(g, "N", "geometry");
  if (g.contains("extent")) {
    const auto& e = g["extent"];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ConfigError("geometry.extent", "expected [lo, hi]");
    c.geometry.extent = std::make_pair(e[0].get<double>(), e[1].get<double>());
  }
  c.geometry.phi = detail::get_or<std::string>(g, "phi", "geometry", "zero");
  c.geometry.scale = detail::get_or<std::string>(g, "scale", "geometry", "");
  c.geometry.dim = detail::get_or<int>(g, "dim", "geometry", 1);
  c.geometry.geometry_kind();

  if (!j.contains("flow") || !j["flow"].is_object()) throw ConfigError("flow", "missing object");
  const auto& f = j["flow"];
  detail::reject_unknown(f, "flow", {"p", "m", "positivity_floor"});
  c.p = detail::finite_number(f, "p", "flow");
  if (f.contains("m")) c.m = detail::finite_number(f, "m", "flow");
  c.positivity_floor = detail::get_or<double>(f, "positivity_floor", "flow", c.positivity_floor);

  c.initial = detail::parse_preset(detail::get_field<std::string>(j, "initial", "$"), "initial");

  if (!j.contains("time") || !j["time"].is_object()) throw ConfigError("time", "missing object");
  const auto& t = j["time"];
  detail::reject_unknown(t, "time", {"t0", "t1", "sample_every", "time_origin", "min_tau"});
  const bool bb = c.initial.name == "barenblatt";
  c.t0 = t.contains("t0") ? detail::finite_number(t, "t0", "time") : (bb ? 1.0 : 0.0);
  c.t1 = detail::finite_number(t, "t1", "time");
  c.sample_every = t.contains("sample_every") ? detail::finite_number(t, "sample_every", "time") : 1e-3 * (c.t1 - c.t0);
  c.time_origin = t.contains("time_origin") ? detail::finite_number(t, "time_origin", "time") : (bb ? 0.0 : c.t0);
  c.min_tau = t.contains("min_tau") ? detail::finite_number(t, "min_tau", "time")
                                    : (bb ? 0.0 : 0.05 * (c.t1 - c.t0));

  c.front_fraction = bb ? 0.1 : 0.0;
  if (j.contains("checks_options")) {
    const auto& o = j["checks_options"];
    if (!o.is_object()) throw ConfigError("checks_options", "expected an object");
    detail::reject_unknown(o, "checks_options", {"front_fraction", "erosion"});
    c.front_fraction = detail::get_or<double>(o, "front_fraction", "checks_options", c.front_fraction);
    c.erosion = detail::get_or<int>(o, "erosion", "checks_options", c.erosion);
  }

  if (j.contains("checks")) {
    const auto& ch = j["checks"];
    if (ch.is_string() && ch.get<std::string>() == "all") {
      c.checks.clear();
    } else if (ch.is_array()) {
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (!ch[i].is_string()) throw ConfigError("checks[" + std::to_string(i) + "]", "expected a string");
        c.checks.push_back(ch[i].get<std::string>());
      }
    } else {
      throw ConfigError("checks", "expected \"all\" or an array of names");
    }
  }

  if (j.contains("tolerances")) {
    const auto& tj = j["tolerances"];
    if (!tj.is_object()) throw ConfigError("tolerances", "expected an object");
    for (auto it = tj.begin(); it != tj.end(); ++it) {
      const auto& fields = detail::tolerance_fields();
      auto fit = std::find_if(fields.begin(), fields.end(), [&](const auto& x) { return it.key() == x.key; });
      if (fit == fields.end()) throw ConfigError("tolerances." + it.key(), "unknown tolerance");
      if (!it->is_number() || !(it->get<double>() >= 0.0))
        throw ConfigError("tolerances." + it.key(), "must be a nonnegative number");
      c.tolerances.*(fit->member) = it->get<double>();
    }
  }

  c.output_dir = detail::get_or<std::string>(j, "output", "$", c.output_dir);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("inequalities")) {
    const auto& q = j["inequalities"];
    if (!q.is_object()) throw ConfigError("inequalities", "expected an object");
    detail::reject_unknown(q, "inequalities", {"dims", "ps", "count"});
    c.inequalities.dims = detail::get_or<std::vector<int>>(q, "dims", "inequalities", c.inequalities.dims);
    c.inequalities.ps = detail::get_or<std::vector<double>>(q, "ps", "inequalities", c.inequalities.ps);
    c.inequalities.count = detail::get_or<int>(q, "count", "inequalities", c.inequalities.count);
  }

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object()) throw ConfigError("sweep", "expected an object");
    detail::reject_unknown(s, "sweep", {"axis", "values"});
    SweepSpec sw;
    sw.axis = detail::get_field<std::string>(s, "axis", "sweep");
    sw.values = detail::get_field<std::vector<double>>(s, "values", "sweep");
    c.sweep = sw;
  }

  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Config echoed into report.json.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["geometry"] = {{"kind", c.geometry.kind}, {"N", c.geometry.N}, {"phi", c.geometry.phi}};
  if (c.geometry.extent) j["geometry"]["extent"] = {c.geometry.extent->first, c.geometry.extent->second};
  if (!c.geometry.scale.empty()) j["geometry"]["scale"] = c.geometry.scale;
  if (c.geometry.geometry_kind() == GeometryKind::ScaledTorus) j["geometry"]["dim"] = c.geometry.dim;
  j["flow"] = {{"p", c.p}, {"m", c.m_value()}, {"positivity_floor", c.positivity_floor}};
  j["initial"] = c.initial.text;
  j["time"] = {{"t0", c.t0},
               {"t1", c.t1},
               {"sample_every", c.sample_every},
               {"time_origin", c.time_origin},
               {"min_tau", c.min_tau}};
  j["checks_options"] = {{"front_fraction", c.front_fraction}, {"erosion", c.erosion}};
  j["checks"] = c.checks;
  j["tolerances"] = tolerances_to_json(c.tolerances);
  j["seed"] = c.seed;
  return j;
}

}  // namespace renyi
