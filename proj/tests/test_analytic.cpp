#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "renyi/analytic.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

namespace {

// int_0^R (C - beta r^2)^k r^{n+j-1} dr in closed form, k = exponent of the
// integrand, via the Beta function (p > 1: compact support).
double pme_radial_moment(double C, double beta, double k, double n) {
  return 0.5 * std::pow(C, k + 0.5 * n) * std::pow(beta, -0.5 * n) * std::beta(0.5 * n, k + 1.0);
}

// same for the fast-diffusion tail (C + |beta| r^2)^k with k < -n/2
double fde_radial_moment(double C, double beta, double k, double n) {
  return 0.5 * std::pow(C, k + 0.5 * n) * std::pow(std::abs(beta), -0.5 * n) * std::beta(0.5 * n, -k - 0.5 * n);
}

}  // namespace

TEST(Analytic, BarenblattExponents) {
  BarenblattSpec s{1, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(s.nu(), 3.0);
  EXPECT_DOUBLE_EQ(s.alpha(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.beta(), 1.0 / 12.0);
  EXPECT_NEAR(s.support_radius(1.0), std::sqrt(12.0), 1e-14);
  EXPECT_DOUBLE_EQ(barenblatt_profile(0.0, BarenblattSpec{2, 1.5, 2.0}), 4.0);
  EXPECT_EQ(barenblatt_profile(10.0, s), 0.0);
  EXPECT_THROW(check_barenblatt(BarenblattSpec{2, 0.0, 1.0}), DomainError);
  EXPECT_THROW(check_barenblatt(BarenblattSpec{2, 1.0, 1.0}), DomainError);
}

TEST(Analytic, UnitMassConstantMatchesBetaFunction) {
  for (double n : {1.0, 2.0, 3.0}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto C = barenblatt_constant(n, p);
      const BarenblattSpec s{n, p, C.C};
      const double mass = sphere_area(n) * pme_radial_moment(C.C, s.beta(), 1.0 / (p - 1.0), n);
      EXPECT_NEAR(mass, 1.0, 1e-10) << "n=" << n << " p=" << p;
      EXPECT_LT(C.residual, 1e-10);
    }
  }
  // n = 1, p = 2: (4/3) C sqrt(12 C) = 1
  EXPECT_NEAR(barenblatt_constant(1, 2).C, std::pow(std::sqrt(3.0) / 8.0, 2.0 / 3.0), 1e-13);
}

TEST(Analytic, FastDiffusionMass) {
  for (double n : {1.0, 2.0}) {
    const double p = 0.8;
    if (!(p > n / (n + 2.0))) continue;
    const BarenblattSpec s{n, p, 0.7};
    const double k = 1.0 / (p - 1.0);
    EXPECT_NEAR(barenblatt_mass(s), sphere_area(n) * fde_radial_moment(0.7, s.beta(), k, n), 1e-9);
  }
}

TEST(Analytic, MassIsTimeInvariant) {
  const auto s = unit_barenblatt(2, 1.7);
  for (double t : {0.3, 1.0, 7.0}) EXPECT_NEAR(barenblatt_mass(s, t), 1.0, 1e-10);
}

TEST(Analytic, BarenblattFunctionalsClosedForm) {
  // norm_up and the Fisher numerator are Beta integrals too
  for (double n : {1.0, 2.0}) {
    for (double p : {1.5, 2.0}) {
      const auto s = unit_barenblatt(n, p);
      const double t = 2.5;
      const auto f = barenblatt_functionals(s, t);
      const double k = 1.0 / (p - 1.0);
      // u(r, t) = t^{-alpha} (C - beta r^2 t^{-2/nu})^k; substitute r = t^{1/nu} rho
      const double area = sphere_area(n);
      const double nup = area * std::pow(t, -s.alpha() * p + n / s.nu()) * pme_radial_moment(s.C, s.beta(), k * p, n);
      EXPECT_NEAR(f.norm_up, nup, 1e-10 * nup);
      // I_p = int u r^2 / (nu t)^2 / norm_up
      const double second = area * std::pow(t, -s.alpha() + (n + 2) / s.nu()) / (s.nu() * s.nu() * t * t) *
                            0.5 * std::pow(s.C, k + 0.5 * (n + 2)) * std::pow(s.beta(), -0.5 * (n + 2)) *
                            std::beta(0.5 * (n + 2), k + 1.0);
      EXPECT_NEAR(f.I_p, second / nup, 1e-9 * f.I_p);
      // equality in the Fisher bound: I_p = kappa / t with m = n
      EXPECT_NEAR(f.I_p, n / (n * (p - 1) + 2) / t, 1e-10);
    }
  }
}

TEST(Analytic, CellAverages) {
  const auto s = unit_barenblatt(1, 2.0);
  // sum over a covering grid is the mass
  double sum = 0.0;
  const double h = 0.1;
  for (int i = -40; i < 40; ++i) sum += barenblatt_cell_average(i * h, (i + 1) * h, 1.3, s) * h;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  // a small cell inside the support averages to the midpoint value to O(h^2)
  const double mid = barenblatt_solution(0.5, 1.0, s);
  EXPECT_NEAR(barenblatt_cell_average(0.5 - 1e-3, 0.5 + 1e-3, 1.0, s), mid, 1e-7);
  const auto s2 = unit_barenblatt(2, 2.0);
  double sum2 = 0.0;
  const double h2 = 0.25;
  for (int i = -16; i < 16; ++i)
    for (int j = -16; j < 16; ++j)
      sum2 += barenblatt_cell_average(i * h2, (i + 1) * h2, j * h2, (j + 1) * h2, 1.0, s2) * h2 * h2;
  EXPECT_NEAR(sum2, 1.0, 1e-3);
  EXPECT_THROW(barenblatt_cell_average(0.0, 1.0, 1.0, s2), DomainError);
}

TEST(Analytic, GaussianReference) {
  for (double n : {1.0, 2.0, 3.0}) {
    const auto g = gaussian_reference(n, 0.7, 0.2);
    EXPECT_NEAR(g.quadrature.H, g.closed_form.H, 1e-12);
    EXPECT_NEAR(g.quadrature.I, g.closed_form.I, 1e-12);
    EXPECT_NEAR(g.closed_form.NI, 2 * pi * std::numbers::e * n, 1e-12);
    EXPECT_NEAR(radial_mass(g.density, n), 1.0, 1e-13);
  }
}

TEST(Analytic, RadialQuadratureKnownIntegrals) {
  // int_{R^3} exp(-r^2) = pi^{3/2}
  EXPECT_NEAR(radial_integral([](double r) { return std::exp(-r * r); }, 3.0, {0.0, 1.0, 4.0, INFINITY}),
              std::pow(pi, 1.5), 1e-12);
  EXPECT_NEAR(sphere_area(2), 2 * pi, 1e-15);
  EXPECT_NEAR(sphere_area(3), 4 * pi, 1e-14);
}
