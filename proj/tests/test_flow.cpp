#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "renyi/flow.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

namespace {

ScalarField bump(const Geometry& g, double amp, double t = 0.0) {
  ScalarField u{std::vector<double>(g.size()), t};
  for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = 1.0 + amp * std::sin(2 * pi * g.coord(i));
  return u;
}

}  // namespace

TEST(FlowParams, DerivedConstants) {
  FlowParams p(2.0, 1.0, 1);
  EXPECT_DOUBLE_EQ(p.sigma(), 3.0);
  EXPECT_DOUBLE_EQ(p.kappa(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.a(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.b(), 1.0);
  EXPECT_DOUBLE_EQ(p.nu(), 3.0);
  for (double pp : {0.6, 0.9, 1.5, 2.0, 3.0})
    for (double m : {2.0, 3.0, 4.5}) {
      FlowParams q(pp, m, 2);
      EXPECT_NEAR(q.kappa() * q.sigma(), 1.0, 1e-15);
    }
  EXPECT_THROW(FlowParams(0.0, 2.0, 2), DomainError);   // p = 1 - 2/m
  EXPECT_THROW(FlowParams(2.0, 1.0, 2), DomainError);   // m < n
  EXPECT_THROW(FlowParams(2.0, 2.0, 2, -1.0), DomainError);
}

TEST(Flow, LinearCaseMatchesDiscreteHeatKernel) {
  // p = 1: the sine mode decays like exp(lambda t), lambda the discrete eigenvalue
  auto g = Geometry::torus1d(64);
  const double h = g.spacing();
  const double lam = -4.0 / (h * h) * std::pow(std::sin(pi * h), 2);
  FlowParams p(1.0, 1.0, 1);
  auto traj = evolve(g, bump(g, 0.3), 0.01, p, 0.005);
  ASSERT_EQ(traj.size(), 3u);
  const auto& u = traj.samples.back();
  EXPECT_DOUBLE_EQ(u.t, 0.01);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(u.values[i], 1.0 + 0.3 * std::exp(lam * 0.01) * std::sin(2 * pi * g.coord(i)), 1e-9);
}

TEST(Flow, MassConservedAndConstantsStationary) {
  auto g = Geometry::zonal_sphere(64);
  FlowParams p(1.5, 2.0, 2);
  ScalarField c{std::vector<double>(g.size(), 2.0), 0.0};
  auto tc = evolve(g, c, 0.05, p, 0.01);
  for (double x : tc.samples.back().values) EXPECT_NEAR(x, 2.0, 1e-13);

  ScalarField u{std::vector<double>(g.size()), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = 1.0 + 0.5 * std::cos(g.coord(i));
  const double m0 = integrate(g, u);
  auto tr = evolve(g, u, 0.05, p, 0.01);
  for (const auto& s : tr.samples) EXPECT_NEAR(integrate(g, s), m0, 1e-12 * m0);
  EXPECT_GT(tr.stats.steps, 0u);
  // max u decays, so the stability bound is largest at the end
  EXPECT_LE(tr.stats.dt_max, cfl_dt(g, tr.samples.back(), p) * (1 + 1e-9));
}

TEST(Flow, PorousMediumKeepsFiniteSpeed) {
  // compactly supported data stays zero far away over a short time
  auto g = Geometry::torus1d(128, -2.0, 2.0);
  FlowParams p(2.0, 1.0, 1);
  ScalarField u{std::vector<double>(g.size(), 0.0), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = std::max(0.0, 1.0 - g.coord(i) * g.coord(i));
  auto tr = evolve(g, u, 0.01, p, 0.005);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g.coord(i)) > 1.5) { EXPECT_LT(tr.samples.back().values[i], 1e-12); }
  for (double x : tr.samples.back().values) EXPECT_GE(x, 0.0);
}

TEST(Flow, SampleTimesAreExact) {
  auto g = Geometry::torus1d(32);
  FlowParams p(2.0, 1.0, 1);
  auto tr = evolve(g, bump(g, 0.2, 1.0), 1.1, p, 0.025);
  ASSERT_EQ(tr.size(), 5u);
  for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_DOUBLE_EQ(tr.samples[k].t, 1.0 + 0.025 * k);
}

TEST(Flow, Errors) {
  auto g = Geometry::torus1d(32);
  FlowParams p(2.0, 1.0, 1);
  auto u = bump(g, 0.2);
  EXPECT_THROW(step(g, u, 10 * cfl_dt(g, u, p), p), NumericError);
  EXPECT_THROW(step(g, u, -1e-6, p), NumericError);
  EXPECT_THROW(evolve(g, u, 0.1, p, 0.03), DomainError);
  EXPECT_THROW(evolve(g, u, -0.1, p, 0.01), DomainError);
  u.values[4] = -1.0;
  EXPECT_THROW(evolve(g, u, 0.1, p, 0.01), DataError);
  ScalarField z{std::vector<double>(g.size(), 0.0), 0.0};
  EXPECT_THROW(cfl_dt(g, z, p), DataError);
}

TEST(Flow, FastDiffusionStepBoundUsesFloor) {
  auto g = Geometry::torus1d(32);
  FlowParams p(0.5, 1.0, 1);
  auto u = bump(g, 0.9);
  const double h = g.spacing();
  double umin = 1e9;
  for (double x : u.values) umin = std::min(umin, x);
  EXPECT_NEAR(cfl_dt(g, u, p), kCflSafety * h * h / (0.5 * std::pow(umin, -0.5)), 1e-15);
}
