#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "renyi/diagnostics.hpp"
#include "renyi/flow.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

namespace {

Analysis run(const Geometry& g, const FlowParams& p, double amp, double t1, double every, AnalysisOptions o = {}) {
  ScalarField u{std::vector<double>(g.size()), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = 1.0 + amp * std::sin(2 * pi * g.coord(i));
  return analyze(g, evolve(g, u, t1, p, every), p, o);
}

const CheckReport& find(const std::vector<CheckReport>& v, const std::string& name) {
  for (const auto& r : v)
    if (r.name == name) return r;
  throw std::runtime_error("missing report " + name);
}

}  // namespace

TEST(Diagnostics, ConstantTrajectoryHasNoResiduals) {
  auto g = Geometry::torus1d(32);
  FlowParams p(2.0, 1.0, 1);
  AnalysisOptions o;
  o.min_tau = 1e-3;
  const auto an = run(g, p, 0.0, 0.01, 1e-4, o);
  for (const auto& s : an.samples) {
    EXPECT_EQ(s.I_p, 0.0);
    EXPECT_NEAR(s.d2Np_dt2_formula, 0.0, 1e-20);
  }
  const auto reports = run_checks(an, {});
  for (const auto& r : reports) EXPECT_TRUE(r.passed()) << r.name << " worst=" << r.worst;
  EXPECT_EQ(find(reports, "mass").verdict, Verdict::Pass);
}

TEST(Diagnostics, SineBumpOnTorusPasses) {
  auto g = Geometry::torus1d(128);
  FlowParams p(2.0, 1.0, 1);
  AnalysisOptions o;
  o.min_tau = 1e-3;
  const auto an = run(g, p, 0.5, 0.02, 2e-5, o);
  EXPECT_EQ(an.K, 0.0);
  const auto reports = run_checks(an, {"dissipation", "entropy_fisher", "epci", "fisher_bound", "w_entropy"});
  for (const auto& r : reports) EXPECT_TRUE(r.passed()) << r.name << " worst=" << r.worst;
  // concavity of N_p: the second difference is nonpositive along the run
  const auto& e = find(reports, "epci");
  EXPECT_EQ(e.comparison, "margin>=-tol");
  EXPECT_EQ(e.verdict, Verdict::Pass);
}

TEST(Diagnostics, SelectionAndNames) {
  auto g = Geometry::torus1d(16);
  FlowParams p(2.0, 1.0, 1);
  const auto an = run(g, p, 0.2, 0.001, 1e-4);
  EXPECT_THROW(run_checks(an, {"nope"}), DomainError);
  const auto d = run_checks(an, {"dissipation"});
  ASSERT_EQ(d.size(), 2u);
  for (const auto& n : check_names()) EXPECT_FALSE(run_checks(an, {n}).empty()) << n;
}

TEST(Diagnostics, FloorStabilityMarksVerdictChanges) {
  CheckReport a;
  a.name = "epci";
  a.comparison = "margin>=-tol";
  a.verdict = Verdict::Pass;
  CheckReport r = a;
  r.name = "mass";
  r.comparison = "residual<=tol";
  std::vector<CheckReport> primary{a, r};
  auto refined = primary;
  refined[0].verdict = Verdict::Fail;
  refined[1].verdict = Verdict::Fail;
  apply_floor_stability(primary, refined);
  EXPECT_FALSE(primary[0].floor_stable);
  EXPECT_EQ(primary[0].verdict, Verdict::Fail);
  // residual checks are not inequality verdicts
  EXPECT_TRUE(primary[1].floor_stable);
  EXPECT_EQ(primary[1].verdict, Verdict::Pass);
}

TEST(Diagnostics, TooFewSamples) {
  auto g = Geometry::torus1d(16);
  FlowParams p(2.0, 1.0, 1);
  Trajectory t;
  ScalarField u{std::vector<double>(16, 1.0), 0.0};
  t.samples = {u};
  t.sample_every = 1e-3;
  const auto an = analyze(g, t, p, {});
  EXPECT_THROW(check_dissipation(an), DataError);
}
