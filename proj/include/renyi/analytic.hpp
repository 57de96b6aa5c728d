#pragma once

// Closed-form reference solutions on R^n and their functionals by radial
// quadrature. Radial integrals are int_{R^n} f(|x|) dx = |S^{n-1}| int f(r) r^{n-1} dr,
// with n allowed to be non-integer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "renyi/error.hpp"

namespace renyi {

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(double n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

namespace detail {

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

inline boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
  thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  return rule;
}

}  // namespace detail

inline constexpr double kQuadTol = 1e-13;

/// int_0^R f(r) r^{n-1} dr * |S^{n-1}| over pieces [b_k, b_{k+1}]; R may be +inf.
/// Breakpoints should bracket the features of f (bumps, fronts).
inline double radial_integral(const std::function<double(double)>& f, double n, std::vector<double> breaks) {
  if (breaks.size() < 2) throw DomainError("radial_integral: need at least two breakpoints");
  std::sort(breaks.begin(), breaks.end());
  auto g = [&](double r) {
    const double val = f(r);
    return val == 0.0 ? 0.0 : val * std::pow(r, n - 1.0);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (!(b > a)) continue;
    double err = 0.0, l1 = 0.0;
    double part;
    if (std::isinf(b))
      part = detail::exp_sinh_rule().integrate(g, a, b, kQuadTol, &err, &l1);
    else
      part = detail::tanh_sinh_rule().integrate(g, a, b, kQuadTol, &err, &l1);
    if (!std::isfinite(part) || err > 1e-8 * std::max(l1, 1e-300))
      throw NumericError("radial_integral: quadrature did not converge on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "], error estimate " + std::to_string(err));
    total += part;
  }
  return total * sphere_area(n);
}

/// Geometric breakpoints w, 2w, 4w, ... below R (R itself and 0 included).
inline std::vector<double> geometric_breaks(double width, double R, int max_pieces = 40) {
  std::vector<double> b{0.0};
  double x = width;
  for (int k = 0; k < max_pieces && x < R; ++k, x *= 2.0) b.push_back(x);
  b.push_back(R);
  return b;
}

/// Source-type self-similar solution of du/dt = Delta u^p on R^n.
struct BarenblattSpec {
  double n = 1.0;
  double p = 2.0;
  double C = 1.0;

  double nu() const { return 2.0 + n * (p - 1.0); }
  double alpha() const { return n / nu(); }
  double beta() const { return (p - 1.0) / (2.0 * p * nu()); }
  /// Support radius sqrt(C/beta) t^{1/nu}; +inf in the fast-diffusion range.
  double support_radius(double t) const {
    return p > 1.0 ? std::sqrt(C / beta()) * std::pow(t, 1.0 / nu()) : std::numeric_limits<double>::infinity();
  }
  /// Radius over which the profile at time t varies appreciably.
  double core_width(double t) const {
    return std::sqrt(C / std::abs(beta()) * std::abs(p - 1.0)) * std::pow(t, 1.0 / nu());
  }
};

inline void check_barenblatt(const BarenblattSpec& s) {
  if (!(s.n > 0.0)) throw DomainError("Barenblatt: n must be positive");
  if (s.p == 1.0) throw DomainError("Barenblatt: p = 1 is the Gaussian case");
  if (!(s.p > 1.0 - 2.0 / s.n)) throw DomainError("Barenblatt: p must exceed 1 - 2/n");
  if (!(s.C > 0.0)) throw DomainError("Barenblatt: C must be positive");
}

/// (C - beta r^2)_+^{1/(p-1)}.
inline double barenblatt_profile(double r, const BarenblattSpec& s) {
  const double base = s.C - s.beta() * r * r;
  if (base <= 0.0) return 0.0;
  return std::exp(std::log(base) / (s.p - 1.0));
}

/// t^{-alpha} profile(r t^{-1/nu}).
inline double barenblatt_solution(double r, double t, const BarenblattSpec& s) {
  if (!(t > 0.0)) throw DomainError("barenblatt_solution: t must be positive");
  return std::pow(t, -s.alpha()) * barenblatt_profile(r * std::pow(t, -1.0 / s.nu()), s);
}

/// |grad v| = r / (nu t) for the pressure v = p/(p-1) u^{p-1} inside the support.
inline double barenblatt_pressure_slope(double r, double t, const BarenblattSpec& s) { return r / (s.nu() * t); }

inline double barenblatt_mass(const BarenblattSpec& s, double t = 1.0) {
  check_barenblatt(s);
  const double R = s.support_radius(t);
  return radial_integral([&](double r) { return barenblatt_solution(r, t, s); }, s.n,
                         geometric_breaks(s.core_width(t), R));
}

/// Mean of the n = 1 Barenblatt solution centred at 0 over the cell [a, b].
inline double barenblatt_cell_average(double a, double b, double t, const BarenblattSpec& s) {
  if (s.n != 1.0) throw DomainError("barenblatt_cell_average: n must be 1");
  if (!(b > a)) throw DomainError("barenblatt_cell_average: empty cell");
  const double R = s.support_radius(t);
  std::vector<double> cuts{a};
  for (double c : {-R, 0.0, R})
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  auto f = [&](double x) { return barenblatt_solution(std::abs(x), t, s); };
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 0, 1e-14);
  return sum / (b - a);
}

/// Mean of the n = 2 Barenblatt solution centred at the origin over a
/// rectangle, by an 8 x 8 Gauss-Legendre rule.
inline double barenblatt_cell_average(double ax, double bx, double ay, double by, double t, const BarenblattSpec& s) {
  if (s.n != 2.0) throw DomainError("barenblatt_cell_average: n must be 2");
  using rule = boost::math::quadrature::gauss<double, 8>;
  const double inner = rule::integrate(
      [&](double y) {
        return rule::integrate([&](double x) { return barenblatt_solution(std::hypot(x, y), t, s); }, ax, bx);
      },
      ay, by);
  return inner / ((bx - ax) * (by - ay));
}

struct BarenblattConstant {
  double C = 0.0;
  double residual = 0.0;  ///< |mass - 1|
};

/// C giving unit mass, by bisection on the radial-quadrature mass. Cached per (n, p).
inline BarenblattConstant barenblatt_constant(double n, double p) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, BarenblattConstant> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, p});
    if (it != cache.end()) return it->second;
  }
  BarenblattSpec s{n, p, 1.0};
  check_barenblatt(s);
  // mass grows with C for p > 1 and decreases for p < 1
  const bool increasing = 1.0 / (p - 1.0) + 0.5 * n > 0.0;
  auto excess = [&](double C) {
    s.C = C;
    const double m = barenblatt_mass(s);
    return increasing ? m - 1.0 : 1.0 - m;
  };
  // mass ~ C^{1/(p-1) + n/2}; steps of exp(|p-1|) keep the profile representable near p = 1
  const double grow = std::exp(std::min(1.0, std::abs(p - 1.0)));
  double lo = 1.0, hi = 1.0;
  for (int k = 0; excess(lo) > 0.0; ++k) {
    if (k > 400) throw NumericError("barenblatt_constant: cannot bracket the unit-mass constant");
    lo /= grow;
  }
  for (int k = 0; excess(hi) < 0.0; ++k) {
    if (k > 400) throw NumericError("barenblatt_constant: cannot bracket the unit-mass constant");
    hi *= grow;
  }
  for (int k = 0; k < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  BarenblattConstant out;
  out.C = 0.5 * (lo + hi);
  s.C = out.C;
  out.residual = std::abs(barenblatt_mass(s) - 1.0);
  if (!(out.residual < 1e-9)) throw NumericError("barenblatt_constant: unit mass not attained");
  std::lock_guard<std::mutex> lock(mu);
  cache[{n, p}] = out;
  return out;
}

/// Unit-mass Barenblatt specification for (n, p).
inline BarenblattSpec unit_barenblatt(double n, double p) { return BarenblattSpec{n, p, barenblatt_constant(n, p).C}; }

/// Entropy functionals of a radial density on R^n (m = n in sigma).
struct RadialFunctionals {
  double mass = 0.0;
  double norm_up = 0.0;
  double H_p = 0.0;
  double N_p = 0.0;
  double I_p = 0.0;
  double NI = 0.0;
};

inline RadialFunctionals radial_renyi(double n, double p, double mass, double norm_up, double fisher_num) {
  RadialFunctionals f;
  f.mass = mass;
  f.norm_up = norm_up;
  f.H_p = std::log(norm_up) / (1.0 - p);
  f.N_p = std::exp((p - 1.0 + 2.0 / n) * f.H_p);
  f.I_p = fisher_num / norm_up;
  f.NI = f.N_p * f.I_p;
  return f;
}

/// H_p, N_p, I_p of the Barenblatt solution at time t by radial quadrature.
inline RadialFunctionals barenblatt_functionals(const BarenblattSpec& s, double t) {
  check_barenblatt(s);
  if (!(t > 0.0)) throw DomainError("barenblatt_functionals: t must be positive");
  const auto breaks = geometric_breaks(s.core_width(t), s.support_radius(t));
  auto u = [&](double r) { return barenblatt_solution(r, t, s); };
  const double mass = radial_integral(u, s.n, breaks);
  const double nup = radial_integral([&](double r) { return std::pow(u(r), s.p); }, s.n, breaks);
  const double fis = radial_integral(
      [&](double r) {
        const double g = barenblatt_pressure_slope(r, t, s);
        return u(r) * g * g;
      },
      s.n, breaks);
  return radial_renyi(s.n, s.p, mass, nup, fis);
}

/// Radial density with its derivative and support bound (+inf allowed).
struct RadialDensity {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::vector<double> breaks;  ///< quadrature breakpoints, first 0, last the support bound
};

inline double radial_mass(const RadialDensity& f, double n) { return radial_integral(f.value, n, f.breaks); }

/// Renyi functionals of a radial density; |grad f^p|^2 / f = p^2 f^{2p-3} f'^2.
inline RadialFunctionals radial_functionals(const RadialDensity& f, double n, double p) {
  if (p == 1.0) throw DomainError("radial_functionals: p = 1 is the Shannon case");
  const double mass = radial_mass(f, n);
  const double nup = radial_integral([&](double r) { return std::pow(std::max(f.value(r), 0.0), p); }, n, f.breaks);
  const double fis = radial_integral(
      [&](double r) {
        const double v = f.value(r);
        if (!(v > 0.0)) return 0.0;
        const double g = f.derivative(r) / v;
        return p * p * std::pow(v, 2.0 * p - 1.0) * g * g;
      },
      n, f.breaks);
  return radial_renyi(n, p, mass, nup, fis);
}

struct ShannonFunctionals {
  double H = 0.0;
  double N = 0.0;  ///< exp(2H/n)
  double I = 0.0;
  double NI = 0.0;
};

/// -int f log f and int |grad f|^2 / f of a radial density.
inline ShannonFunctionals radial_shannon(const RadialDensity& f, double n) {
  ShannonFunctionals s;
  s.H = radial_integral(
      [&](double r) {
        const double v = f.value(r);
        return v > 0.0 ? -v * std::log(v) : 0.0;
      },
      n, f.breaks);
  s.I = radial_integral(
      [&](double r) {
        const double v = f.value(r);
        if (!(v > 0.0)) return 0.0;
        const double d = f.derivative(r);
        return d * d / v;
      },
      n, f.breaks);
  s.N = std::exp(2.0 * s.H / n);
  s.NI = s.N * s.I;
  return s;
}

/// Centred Gaussian of the given variance on R^n.
inline RadialDensity gaussian_density(double n, double variance) {
  if (!(variance > 0.0)) throw DomainError("gaussian_density: variance must be positive");
  const double norm = std::pow(2.0 * std::numbers::pi * variance, -0.5 * n);
  RadialDensity g;
  g.value = [=](double r) { return norm * std::exp(-0.5 * r * r / variance); };
  g.derivative = [=](double r) { return -r / variance * norm * std::exp(-0.5 * r * r / variance); };
  const double sd = std::sqrt(variance);
  g.breaks = {0.0, sd, 2.0 * sd, 4.0 * sd, 8.0 * sd, 16.0 * sd, 40.0 * sd};
  return g;
}

struct GaussianReference {
  RadialDensity density;
  ShannonFunctionals closed_form;
  ShannonFunctionals quadrature;
};

/// Heat-kernel Gaussian of variance `variance + 2 t_offset` with H, N, I in
/// closed form and by quadrature.
inline GaussianReference gaussian_reference(double n, double variance, double t_offset = 0.0) {
  const double s2 = variance + 2.0 * t_offset;
  GaussianReference g;
  g.density = gaussian_density(n, s2);
  g.closed_form.H = 0.5 * n * std::log(2.0 * std::numbers::pi * std::numbers::e * s2);
  g.closed_form.I = n / s2;
  g.closed_form.N = std::exp(2.0 * g.closed_form.H / n);
  g.closed_form.NI = g.closed_form.N * g.closed_form.I;
  g.quadrature = radial_shannon(g.density, n);
  return g;
}

}  // namespace renyi
