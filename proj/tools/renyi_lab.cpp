// renyi-lab: run experiments described by JSON configs and write reports.
//
// Exit status: 0 all selected checks passed, 1 a check failed,
// 2 invalid config or arguments, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "renyi/renyi.hpp"

namespace fs = std::filesystem;
using namespace renyi;

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::string checks;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonArgs& a, bool config_required) {
  auto* opt = sub->add_option("--config", a.config, "experiment config (JSON)");
  if (config_required) opt->required();
  sub->add_option("--out", a.out, "output directory (overrides the config)");
  sub->add_option("--checks", a.checks, "comma-separated check names, or 'all'");
  sub->add_option("--seed", a.seed, "seed for random presets and samplers");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ExperimentConfig load(const CommonArgs& a) {
  ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  if (!a.out.empty()) c.output_dir = a.out;
  if (!a.checks.empty()) c.checks = a.checks == "all" ? std::vector<std::string>{} : split_commas(a.checks);
  if (a.seed) c.seed = *a.seed;
  return c;
}

void print_reports(const RunResult& r) {
  for (const auto& c : r.reports)
    std::printf("%-26s %-9s worst=% .6e tol=%.3e%s%s\n", c.name.c_str(), to_string(c.verdict).c_str(), c.worst,
                c.tolerance, c.note.empty() ? "" : "  # ", c.note.c_str());
  if (r.inequalities)
    std::printf("%-26s %-9s random=% .6e extremal=%.6e\n", "inequalities",
                r.inequalities->passed() ? "pass" : "fail", r.inequalities->worst_random,
                r.inequalities->worst_extremal);
}

int simulate(const CommonArgs& a) {
  auto c = load(a);
  validate(c);
  const auto r = run_experiment(c, false);
  write_outputs(r, c.output_dir);
  std::printf("%zu samples, %zu steps -> %s\n", r.analysis.samples.size(), r.stats.steps, c.output_dir.c_str());
  return 0;
}

int verify(const CommonArgs& a) {
  auto c = load(a);
  validate(c);
  const auto r = run_experiment(c, true);
  write_outputs(r, c.output_dir);
  print_reports(r);
  std::printf("%s\n", r.passed() ? "PASSED" : "FAILED");
  return r.passed() ? 0 : 1;
}

int sweep(const CommonArgs& a) {
  auto c = load(a);
  validate(c);
  if (!c.sweep) throw ConfigError("sweep", "the config has no sweep block");
  const auto rows = run_sweep(c);
  fs::create_directories(c.output_dir);
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_outputs(rows[i].result, fs::path(c.output_dir) / ("point_" + std::to_string(i)));
    ok = ok && rows[i].result.passed();
  }
  const auto csv = sweep_csv(c.sweep->axis, rows);
  std::ofstream(fs::path(c.output_dir) / "summary.csv", std::ios::binary) << csv;
  std::fputs(csv.c_str(), stdout);
  return ok ? 0 : 1;
}

int gns_check(const CommonArgs& a) {
  auto c = load(a);
  if (a.checks.empty() && std::none_of(c.checks.begin(), c.checks.end(), is_inequality_check))
    c.checks = inequality_check_names();
  const bool iso = std::find(c.checks.begin(), c.checks.end(), "isoperimetric") != c.checks.end();
  const bool gns = std::find(c.checks.begin(), c.checks.end(), "gns") != c.checks.end();
  if (!iso && !gns) throw ConfigError("checks", "gns-check needs 'isoperimetric' and/or 'gns'");
  const auto b = run_inequalities(c.inequalities, c.seed, iso, gns, c.tolerances);
  fs::create_directories(c.output_dir);
  std::ofstream(fs::path(c.output_dir) / "margins.csv", std::ios::binary) << inequality_csv(b);
  std::ofstream(fs::path(c.output_dir) / "constants.json", std::ios::binary)
      << inequality_constants_json(b).dump(2) << "\n";
  std::printf("rows=%zu worst_random=% .6e worst_extremal=%.6e %s\n", b.rows.size(), b.worst_random,
              b.worst_extremal, b.passed() ? "PASSED" : "FAILED");
  return b.passed() ? 0 : 1;
}

int constants(const CommonArgs& a, const std::vector<double>& ms, const std::vector<double>& ps) {
  auto c = load(a);
  std::vector<double> mv = ms, pv = ps;
  if (mv.empty())
    for (int n : c.inequalities.dims) mv.push_back(n);
  if (pv.empty()) pv = c.inequalities.ps;
  json arr = json::array();
  for (double m : mv)
    for (double p : pv) {
      const auto g = gamma_mp_detail(m, p);
      const auto k = convert_constants(g.value, m, p);
      arr.push_back(constants_to_json(k, g, barenblatt_constant(m, p).C));
    }
  const json j{{"constants", arr}};
  fs::create_directories(c.output_dir);
  std::ofstream(fs::path(c.output_dir) / "constants.json", std::ios::binary) << j.dump(2) << "\n";
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi entropy diagnostics for nonlinear diffusion on weighted geometries"};
  app.require_subcommand(1);
  CommonArgs sim_a, ver_a, swp_a, gns_a, con_a;
  std::vector<double> con_m, con_p;
  auto* sim = app.add_subcommand("simulate", "run the flow and write functionals.csv");
  add_common(sim, sim_a, true);
  auto* ver = app.add_subcommand("verify", "run the flow and the selected checks");
  add_common(ver, ver_a, true);
  auto* swp = app.add_subcommand("sweep", "repeat verify over the config's sweep values");
  add_common(swp, swp_a, true);
  auto* gns = app.add_subcommand("gns-check", "sampled isoperimetric / GNS margins");
  add_common(gns, gns_a, false);
  auto* con = app.add_subcommand("constants", "gamma and the equivalent inequality constants");
  add_common(con, con_a, false);
  con->add_option("--m", con_m, "dimensions m (default: config inequalities.dims)");
  con->add_option("--p", con_p, "exponents p (default: config inequalities.ps)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return simulate(sim_a);
    if (*ver) return verify(ver_a);
    if (*swp) return sweep(swp_a);
    if (*gns) return gns_check(gns_a);
    if (*con) return constants(con_a, con_m, con_p);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
