#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "renyi/flow.hpp"
#include "renyi/functionals.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

namespace {

ScalarField field(const Geometry& g, auto f, double t = 0.0) {
  ScalarField u{std::vector<double>(g.size()), t};
  for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = f(g.coord(i));
  return u;
}

}  // namespace

TEST(Functionals, PressurePointValues) {
  FlowParams p2(2.0, 1.0, 1), ph(0.5, 1.0, 1);
  const std::vector<double> u{3.0, 4.0, 0.0};
  auto v2 = pressure(u, p2);
  EXPECT_DOUBLE_EQ(v2[0], 6.0);
  EXPECT_DOUBLE_EQ(v2[2], 0.0);
  auto vh = pressure(std::vector<double>{4.0}, ph);
  EXPECT_DOUBLE_EQ(vh[0], -0.5);
  EXPECT_THROW(pressure(u, FlowParams(1.0, 1.0, 1)), DomainError);
}

TEST(Functionals, ConstantDensity) {
  auto g = Geometry::torus1d(16);
  FlowParams p(2.0, 1.0, 1);
  auto u = field(g, [](double) { return 1.5; });
  const auto d = pressure_data(g, u, p);
  EXPECT_NEAR(renyi_entropy(g, u, p), -std::log(2.25), 1e-14);
  EXPECT_NEAR(entropy_power(g, u, p), std::exp(-3.0 * std::log(2.25)), 1e-13);
  EXPECT_EQ(fisher_information(d, g), 0.0);
  EXPECT_EQ(E_prime(d, g), 0.0);
  EXPECT_NEAR(E_doubleprime(d, g, p), 0.0, 1e-20);
  EXPECT_NEAR(d2Np_formula(d, g, p), 0.0, 1e-20);
}

TEST(Functionals, WEntropyOfConstantByHand) {
  // p = 2, m = 1, u = c on the unit torus: v = 2c, kappa = a = 1/3,
  // W = -(4/3) tau^{1/3} 2 c^2 and dW/dt = -(8/9) c^2 tau^{-2/3}
  auto g = Geometry::torus1d(16);
  FlowParams p(2.0, 1.0, 1);
  const double c = 0.7, tau = 0.3;
  const auto d = pressure_data(g, field(g, [&](double) { return c; }), p);
  EXPECT_NEAR(w_entropy(d, g, p, tau), -(8.0 / 3.0) * c * c * std::cbrt(tau), 1e-14);
  EXPECT_NEAR(w_entropy_rate(d, g, p, tau), -(8.0 / 9.0) * c * c * std::pow(tau, -2.0 / 3.0), 1e-13);
  EXPECT_NEAR(ni_entropy(d, g, p, tau), -2 * c * c * std::cbrt(tau), 1e-14);
  EXPECT_NEAR(ni_entropy_rate(d, g, p, tau), -(2.0 / 3.0) * c * c * std::pow(tau, -2.0 / 3.0), 1e-14);
  EXPECT_THROW(w_entropy(d, g, p, 0.0), DomainError);
}

TEST(Functionals, FisherInformationConverges) {
  // I_p = int |grad u^p|^2 / u / int u^p for u = 1 + A sin(2 pi x), p = 2:
  // int 4 u (u')^2 = 4 A^2 (2 pi)^2 * 1/2, int u^2 = 1 + A^2/2
  const double A = 0.4;
  FlowParams p(2.0, 1.0, 1);
  const double exact = 4 * A * A * 4 * pi * pi * 0.5 / (1 + A * A / 2);
  double prev = 0;
  for (int N : {64, 128, 256}) {
    auto g = Geometry::torus1d(N);
    const double err = std::abs(fisher_information(g, field(g, [&](double x) { return 1 + A * std::sin(2 * pi * x); }), p) - exact);
    if (prev > 0) { EXPECT_GT(prev / err, 3.5); }
    prev = err;
  }
  EXPECT_LT(prev / exact, 1e-4);
}

TEST(Functionals, FAlphaDefinition) {
  auto g = Geometry::torus1d(32);
  FlowParams p(2.0, 1.0, 1);
  auto u = field(g, [](double x) { return 1.2 + 0.3 * std::cos(2 * pi * x); });
  const auto d = pressure_data(g, u, p);
  const auto f1 = F_alpha(d, p, 1.0), f2 = F_alpha(d, p, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_DOUBLE_EQ(f1[i], d.lv[i]);
    EXPECT_NEAR(f2[i], 2 * d.lv[i] + d.grad_sq[i] / d.v[i], 1e-12 * (1 + std::abs(f2[i])));
  }
  EXPECT_THROW(F_alpha(d, p, 0.5), DomainError);
}

TEST(Functionals, VarianceFormulaNonPositiveOnFlatTorus) {
  auto g = Geometry::torus2d(24);
  FlowParams p(1.5, 2.0, 2);
  ScalarField u{std::vector<double>(g.size()), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i)
    u.values[i] = 1 + 0.4 * std::sin(2 * pi * g.coord(i, 0)) * std::cos(2 * pi * g.coord(i, 1));
  EXPECT_LT(d2Np_formula(g, u, p), 0.0);
}

TEST(Functionals, EvaluateSampleConsistency) {
  auto g = Geometry::weighted_interval(64, 1.0);
  FlowParams p(1.5, 3.0, 1);
  auto u = field(g, [](double x) { return 1 + 0.3 * std::cos(pi * (x + 0.5)); });
  const auto s = evaluate_sample(g, u, p, 0.5);
  EXPECT_DOUBLE_EQ(s.N_p, std::exp(p.sigma() * s.H_p));
  EXPECT_NEAR(s.I_p * s.norm_up, s.Eprime, 1e-14 * s.Eprime);
  EXPECT_NEAR(s.E, s.norm_up / 0.5, 1e-14);
  EXPECT_GE(s.I_p, 0.0);
  EXPECT_TRUE(std::isfinite(s.W_p) && std::isfinite(s.dW_dt) && std::isfinite(s.N_u));
  // identity W = p tau^{a+1} E' - (a+1) tau^a int v u
  const auto d = pressure_data(g, u, p);
  const double a = p.a();
  EXPECT_NEAR(s.W_p, p.p() * std::pow(0.5, a + 1) * s.Eprime - (a + 1) * std::pow(0.5, a) * pressure_moment(d, g), 1e-12);
  const auto n0 = evaluate_sample(g, u, p, 0.0);
  EXPECT_TRUE(std::isnan(n0.W_p));
  EXPECT_THROW(w_entropy_rate(pressure_data(Geometry::scaled_torus(16, 0.1), ScalarField{std::vector<double>(16, 1.0), 0.0}, FlowParams(2.0, 1.0, 1)),
                              Geometry::scaled_torus(16, 0.1), FlowParams(2.0, 1.0, 1), 1.0),
               DomainError);
}

TEST(Functionals, ShannonOfUniform) {
  auto g = Geometry::torus1d(20, 0.0, 2.0);
  auto u = field(g, [](double) { return 0.5; });
  EXPECT_NEAR(shannon_entropy(g, u), std::log(2.0), 1e-14);
  EXPECT_NEAR(shannon_power(g, u, 1.0), 4.0, 1e-13);
  EXPECT_EQ(shannon_fisher(g, u), 0.0);
}

TEST(Functionals, RenyiApproachesShannon) {
  auto g = Geometry::torus1d(128);
  auto u = field(g, [](double x) { return 1 + 0.5 * std::sin(2 * pi * x); });
  const double H = shannon_entropy(g, u);
  for (double d : {1e-4, -1e-4}) EXPECT_NEAR(renyi_entropy(g, u, FlowParams(1 + d, 1.0, 1)), H, 1e-4);
}

TEST(Functionals, ZeroDensityRejected) {
  auto g = Geometry::torus1d(8);
  ScalarField z{std::vector<double>(8, 0.0), 0.0};
  EXPECT_THROW(pressure_data(g, z, FlowParams(2.0, 1.0, 1)), DataError);
  EXPECT_THROW(shannon_entropy(g, z), DataError);
}
