#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "renyi/inequalities.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

TEST(Constants, ThetaValues) {
  EXPECT_NEAR(theta_of(1.0 / 3.0, 4.0), 0.6, 1e-14);
  EXPECT_EQ(theta_of(1.0, 3.0), 0.0);
  for (double m : {1.0, 2.0, 3.0, 4.5})
    for (double q : {0.2, 0.5, 0.9})
      EXPECT_NEAR(theta_residual(q, m, theta_of(q, m)), 0.0, 1e-14) << m << " " << q;
  EXPECT_THROW(theta_of(3.0, 3.0), DomainError);
  EXPECT_THROW(theta_of(0.5, 0.0), DomainError);
  EXPECT_DOUBLE_EQ(gns_q(2.0), 1.0 / 3.0);
  EXPECT_THROW(gns_q(0.5), DomainError);
}

TEST(Constants, GnsRoundTrip) {
  for (double m : {1.0, 2.0, 3.0})
    for (double p : {1.5, 2.0, 3.0}) {
      const double g = 7.3;
      EXPECT_NEAR(gamma_from_gns(gns_constant(g, m, p), m, p), g, 1e-12 * g);
    }
}

TEST(Constants, GammaIsTimeInvariant) {
  for (double n : {1.0, 2.0})
    for (double p : {1.5, 2.0}) {
      const auto g = gamma_mp_detail(n, p);
      EXPECT_LT(g.t_spread, 1e-8);
      EXPECT_LT(g.mass_residual, 1e-9);
    }
}

TEST(Constants, GammaOneDimensionalClosedForm) {
  // n = 1, p = 2: N_p I_p = (int u^2)^{-3} / 3 at t = 1
  const auto s = unit_barenblatt(1, 2.0);
  const double nup = 2 * 0.5 * std::pow(s.C, 2.5) * std::pow(s.beta(), -0.5) * std::beta(0.5, 3.0);
  EXPECT_NEAR(gamma_mp(1, 2), std::pow(nup, -3.0) / 3.0, 1e-10);
}

TEST(Constants, ShannonLimit) {
  for (double n : {1.0, 2.0}) {
    const double ref = 2 * pi * std::numbers::e * n;
    EXPECT_NEAR(gamma_shannon(n), ref, 1e-12);
    for (double d : {1e-4, -1e-4}) EXPECT_NEAR(gamma_mp(n, 1 + d), ref, 1e-4 * ref);
  }
}

TEST(Constants, SobolevEndpoint) {
  // m = 3, p = 2/3 gives the sharp Sobolev constant 3 (pi/2)^{4/3}
  const double m = 3, p = 2.0 / 3.0;
  const auto c = convert_constants(gamma_mp(m, p), m, p);
  EXPECT_TRUE(c.sobolev_endpoint);
  EXPECT_EQ(c.gns_exponent, 0.0);
  EXPECT_TRUE(std::isnan(c.A));
  EXPECT_NEAR(sharp_sobolev(3), 3 * std::pow(pi / 2, 4.0 / 3.0), 1e-12);
  EXPECT_NEAR(c.sobolev_coeff, sharp_sobolev(3), 1e-6 * sharp_sobolev(3));
}

TEST(Constants, ConversionFields) {
  const auto c = convert_constants(5.0, 2.0, 2.0);
  EXPECT_DOUBLE_EQ(c.q, 1.0 / 3.0);
  EXPECT_NEAR(c.gns_exponent, 3.0, 1e-15);
  EXPECT_NEAR(c.nash_coeff, 2 / std::sqrt(4 * pi * std::numbers::e), 1e-14);
  EXPECT_TRUE(std::isnan(c.sobolev_coeff));
  EXPECT_THROW(convert_constants(-1.0, 2.0, 2.0), DomainError);
  EXPECT_THROW(convert_constants(1.0, 2.0, 0.4), DomainError);
}

TEST(Samples, RandomBumpsDeterministicAndNormalised) {
  for (double n : {1.0, 2.0}) {
    const auto a = random_bumps(42, n), b = random_bumps(42, n), c = random_bumps(43, n);
    for (double r : {0.0, 0.7, 2.5}) {
      EXPECT_EQ(a.value(r), b.value(r));
      EXPECT_EQ(a.derivative(r), b.derivative(r));
    }
    EXPECT_NE(a.value(0.7), c.value(0.7));
    EXPECT_NEAR(radial_mass(a, n), 1.0, 1e-10);
    // derivative by central difference
    const double r = 1.3, e = 1e-5;
    EXPECT_NEAR(a.derivative(r), (a.value(r + e) - a.value(r - e)) / (2 * e), 1e-7);
  }
}

TEST(Samples, BarenblattIsExtremal) {
  for (double n : {1.0, 2.0})
    for (double p : {1.5, 2.0}) {
      const auto s = unit_barenblatt(n, p);
      const double g = gamma_mp(n, p);
      const auto f = barenblatt_density(s);
      EXPECT_LT(std::abs(check_isoperimetric(f, n, p, g).relative()), 1e-8);
      const auto c = convert_constants(g, n, p);
      EXPECT_LT(std::abs(check_gns(power_transform(f, p - 0.5), n, c).relative()), 1e-6);
    }
}

TEST(Samples, RandomMarginsNonNegative) {
  for (double n : {1.0, 2.0})
    for (double p : {1.5, 2.0}) {
      const double g = gamma_mp(n, p);
      const auto c = convert_constants(g, n, p);
      for (std::uint64_t s = 1; s <= 5; ++s) {
        const auto f = random_bumps(s, n);
        EXPECT_GT(check_isoperimetric(f, n, p, g).relative(), 0.0);
        EXPECT_GT(check_gns(power_transform(f, p - 0.5), n, c).relative(), 0.0);
      }
    }
}

TEST(Samples, LogSobolevGaussianEquality) {
  for (double n : {1.0, 2.0}) {
    const auto g = gaussian_reference(n, 0.6);
    EXPECT_NEAR(check_log_sobolev(g.density, n, gamma_shannon(n)).margin, 0.0, 1e-10);
    EXPECT_GT(check_log_sobolev(random_bumps(9, n), n, gamma_shannon(n)).margin, 0.0);
  }
}

TEST(Samples, NonUnitMassRejected) {
  const auto g = gaussian_density(1, 1.0);
  RadialDensity twice = g;
  twice.value = [g](double r) { return 2 * g.value(r); };
  EXPECT_THROW(check_isoperimetric(twice, 1, 2.0, 1.0), DataError);
}
