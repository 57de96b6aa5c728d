#pragma once

// Entropy-isoperimetric constants, their Gagliardo-Nirenberg-Sobolev /
// Sobolev / Nash forms, and margin checks on radial test functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "renyi/analytic.hpp"
#include "renyi/error.hpp"

namespace renyi {

/// GNS interpolation exponent theta(q, m) = m(1-q) / ((1+q)(m - (m-2)q)).
/// Defined for every m > 0; the Sobolev endpoint q = m/(m-2) is singular.
inline double theta_of(double q, double m) {
  if (!(m > 0.0)) throw DomainError("theta_of: m must be positive");
  if (!(q > 0.0)) throw DomainError("theta_of: q must be positive");
  const double den = (1.0 + q) * (m - (m - 2.0) * q);
  if (std::abs(den) < 1e-300 || std::abs(m - (m - 2.0) * q) < 1e-12 * m)
    throw DomainError("theta_of: q = m/(m-2) is the Sobolev endpoint, theta is undefined");
  return m * (1.0 - q) / den;
}

/// Residual of 1/(q+1) = theta/2^* + (1-theta)/(2q) with 1/2^* = (m-2)/(2m).
inline double theta_residual(double q, double m, double theta) {
  return 1.0 / (q + 1.0) - theta * (m - 2.0) / (2.0 * m) - (1.0 - theta) / (2.0 * q);
}

/// q = 1/(2p-1).
inline double gns_q(double p) {
  if (!(p > 0.5)) throw DomainError("gns_q: p must exceed 1/2");
  return 1.0 / (2.0 * p - 1.0);
}

struct GammaValue {
  double value = 0.0;
  double t_spread = 0.0;  ///< |gamma(t=1) - gamma(t=5)| / gamma
  double mass_residual = 0.0;
};

/// N_p I_p of the unit-mass Barenblatt solution in dimension n (n may be non-integer).
inline GammaValue gamma_mp_detail(double n, double p) {
  if (!(p > n / (n + 2.0))) throw DomainError("gamma_mp: p must exceed n/(n+2)");
  const auto bc = barenblatt_constant(n, p);
  const BarenblattSpec s{n, p, bc.C};
  const double g1 = barenblatt_functionals(s, 1.0).NI;
  const double g5 = barenblatt_functionals(s, 5.0).NI;
  GammaValue g;
  g.value = g1;
  g.t_spread = std::abs(g1 - g5) / std::abs(g1);
  g.mass_residual = bc.residual;
  if (!(g.t_spread < 1e-8)) throw NumericError("gamma_mp: N_p I_p is not time invariant");
  return g;
}

inline double gamma_mp(double n, double p) { return gamma_mp_detail(n, p).value; }

/// 2 pi e m kappa_*^{2/m}.
inline double gamma_shannon(double m, double kappa_star = 1.0) {
  if (!(m > 0.0) || !(kappa_star >= 0.0)) throw DomainError("gamma_shannon: need m > 0 and kappa_* >= 0");
  return 2.0 * std::numbers::pi * std::numbers::e * m * std::pow(kappa_star, 2.0 / m);
}

/// A = (2p/(2p-1))^theta gamma^{-theta/2}.
inline double gns_constant(double gamma, double m, double p) {
  const double q = gns_q(p);
  const double th = theta_of(q, m);
  return std::pow(2.0 * p / (2.0 * p - 1.0), th) * std::pow(gamma, -0.5 * th);
}

/// Inverse of gns_constant in gamma.
inline double gamma_from_gns(double A, double m, double p) {
  const double q = gns_q(p);
  const double th = theta_of(q, m);
  if (th == 0.0) throw DomainError("gamma_from_gns: theta = 0 carries no information on gamma");
  return std::pow(std::pow(2.0 * p / (2.0 * p - 1.0), th) / A, 2.0 / th);
}

struct IsoperimetricConstants {
  double m = 0.0;
  double p = 0.0;
  double q = 0.0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double gamma_mp = 0.0;
  double A = std::numeric_limits<double>::quiet_NaN();
  double sobolev_coeff = std::numeric_limits<double>::quiet_NaN();
  double nash_coeff = 0.0;
  double gamma_shannon = 0.0;
  double kappa_star = 1.0;
  double gns_exponent = 0.0;  ///< (2 + 2m(p-1)) / (m(p-1))
  bool sobolev_endpoint = false;
};

/// Converts an entropy-isoperimetric constant gamma for (m, p) into the
/// equivalent functional-inequality constants.
inline IsoperimetricConstants convert_constants(double gamma, double m, double p, double kappa_star = 1.0) {
  if (!(gamma > 0.0)) throw DomainError("convert_constants: gamma must be positive");
  if (!(m > 0.0)) throw DomainError("convert_constants: m must be positive");
  if (!(p > m / (m + 2.0))) throw DomainError("convert_constants: p must exceed m/(m+2)");
  IsoperimetricConstants c;
  c.m = m;
  c.p = p;
  c.q = gns_q(p);
  c.gamma_mp = gamma;
  c.kappa_star = kappa_star;
  c.gamma_shannon = gamma_shannon(m, kappa_star);
  c.nash_coeff = 2.0 / std::sqrt(c.gamma_shannon);
  c.gns_exponent = p == 1.0 ? std::numeric_limits<double>::infinity()
                            : (2.0 + 2.0 * m * (p - 1.0)) / (m * (p - 1.0));
  c.sobolev_endpoint = m > 2.0 && std::abs(p - (1.0 - 1.0 / m)) < 1e-12;
  if (c.sobolev_endpoint) c.gns_exponent = 0.0;
  if (m > 2.0) {
    const double r = (m - 2.0) / (2.0 * m - 2.0);
    c.sobolev_coeff = r * r * gamma;
  }
  if (!c.sobolev_endpoint && p != 1.0) {
    c.theta = theta_of(c.q, m);
    c.A = gns_constant(gamma, m, p);
  }
  return c;
}

/// Sharp Euclidean Sobolev constant S_m with |grad f|_2^2 >= S_m |f|_{2m/(m-2)}^2.
inline double sharp_sobolev(double m) {
  if (!(m > 2.0)) throw DomainError("sharp_sobolev: m must exceed 2");
  return std::numbers::pi * m * (m - 2.0) * std::pow(std::tgamma(0.5 * m) / std::tgamma(m), 2.0 / m);
}

struct Margin {
  double margin = 0.0;
  double scale = 1.0;
  double relative() const { return margin / scale; }
};

/// N_p(f) I_p(f) - gamma for a unit-mass radial density on R^n.
inline Margin check_isoperimetric(const RadialDensity& f, double n, double p, double gamma) {
  const auto fn = radial_functionals(f, n, p);
  if (std::abs(fn.mass - 1.0) > 1e-8) throw DataError("check_isoperimetric: density must have unit mass");
  return Margin{fn.NI - gamma, gamma};
}

struct GnsNorms {
  double lhs = 0.0;       ///< |g|_{q+1}
  double grad = 0.0;      ///< |grad g|_2
  double low = 0.0;       ///< |g|_{2q}
};

inline GnsNorms gns_norms(const RadialDensity& g, double n, double p) {
  const double q = gns_q(p);
  auto pw = [&](double e) {
    return radial_integral([&](double r) { return std::pow(std::max(g.value(r), 0.0), e); }, n, g.breaks);
  };
  GnsNorms out;
  out.lhs = std::pow(pw(q + 1.0), 1.0 / (q + 1.0));
  out.low = std::pow(pw(2.0 * q), 1.0 / (2.0 * q));
  out.grad = std::sqrt(radial_integral(
      [&](double r) {
        const double d = g.derivative(r);
        return d * d;
      },
      n, g.breaks));
  return out;
}

/// A |grad g|_2^theta |g|_{2q}^{1-theta} - |g|_{q+1}.
inline Margin check_gns(const RadialDensity& g, double n, const IsoperimetricConstants& c) {
  if (std::isnan(c.A)) throw DomainError("check_gns: no GNS constant at this (m, p)");
  const auto nm = gns_norms(g, n, c.p);
  if (!(nm.lhs > 0.0) || !(nm.grad > 0.0) || !(nm.low > 0.0)) throw DataError("check_gns: degenerate norms");
  const double rhs = c.A * std::pow(nm.grad, c.theta) * std::pow(nm.low, 1.0 - c.theta);
  return Margin{rhs - nm.lhs, nm.lhs};
}

/// Logarithmic Sobolev (Stam) margin for a unit-mass density rho = f^2:
/// (n/2) log((4/gamma) int |grad f|^2) - int f^2 log f^2.
inline Margin check_log_sobolev(const RadialDensity& rho, double n, double gamma) {
  if (std::abs(radial_mass(rho, n) - 1.0) > 1e-8) throw DataError("check_log_sobolev: density must have unit mass");
  const auto s = radial_shannon(rho, n);
  // int |grad sqrt(rho)|^2 = I / 4
  return Margin{0.5 * n * std::log(s.I / gamma) + s.H, 1.0};
}

/// Unit-mass Barenblatt density at t = 1 as a RadialDensity.
inline RadialDensity barenblatt_density(const BarenblattSpec& s) {
  RadialDensity f;
  f.value = [s](double r) { return barenblatt_solution(r, 1.0, s); };
  f.derivative = [s](double r) {
    const double u = barenblatt_solution(r, 1.0, s);
    if (!(u > 0.0)) return 0.0;
    return -barenblatt_pressure_slope(r, 1.0, s) * std::pow(u, 2.0 - s.p) / s.p;
  };
  f.breaks = geometric_breaks(s.core_width(1.0), s.support_radius(1.0));
  return f;
}

/// g = f^e with g' = e f^{e-1} f'.
inline RadialDensity power_transform(const RadialDensity& f, double e) {
  RadialDensity g;
  g.value = [f, e](double r) {
    const double v = f.value(r);
    return v > 0.0 ? std::pow(v, e) : 0.0;
  };
  g.derivative = [f, e](double r) {
    const double v = f.value(r);
    return v > 0.0 ? e * std::pow(v, e - 1.0) * f.derivative(r) : 0.0;
  };
  g.breaks = f.breaks;
  return g;
}

/// Portable uniform draw in [0, 1) from the 53 high bits of a 64-bit Mersenne twister.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Seeded sum of 3-6 even-symmetrised Gaussian bumps, scaled to unit mass on R^n.
inline RadialDensity random_bumps(std::uint64_t seed, double n) {
  std::mt19937_64 rng(seed);
  const int count = 3 + static_cast<int>(uniform01(rng) * 4.0);
  std::vector<double> amp(count), ctr(count), wid(count);
  double wmin = INFINITY, wmax = 0.0, cmax = 0.0;
  for (int k = 0; k < count; ++k) {
    amp[k] = 0.2 + 0.8 * uniform01(rng);
    ctr[k] = 3.0 * uniform01(rng);
    wid[k] = 0.3 + 0.9 * uniform01(rng);
    wmin = std::min(wmin, wid[k]);
    wmax = std::max(wmax, wid[k]);
    cmax = std::max(cmax, ctr[k]);
  }
  auto value = [=](double r) {
    double s = 0.0;
    for (int k = 0; k < count; ++k) {
      const double a = (r - ctr[k]) / wid[k], b = (r + ctr[k]) / wid[k];
      s += amp[k] * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    }
    return s;
  };
  auto deriv = [=](double r) {
    double s = 0.0;
    for (int k = 0; k < count; ++k) {
      const double a = (r - ctr[k]) / wid[k], b = (r + ctr[k]) / wid[k];
      s -= amp[k] / wid[k] * (a * std::exp(-0.5 * a * a) + b * std::exp(-0.5 * b * b));
    }
    return s;
  };
  RadialDensity f;
  const double inner = cmax + 8.0 * wmax;
  for (double x = 0.0; x < inner; x += wmin) f.breaks.push_back(x);
  f.breaks.push_back(inner);
  f.breaks.push_back(cmax + 40.0 * wmax);
  f.value = value;
  f.derivative = deriv;
  const double mass = radial_mass(f, n);
  f.value = [value, mass](double r) { return value(r) / mass; };
  f.derivative = [deriv, mass](double r) { return deriv(r) / mass; };
  return f;
}

}  // namespace renyi
