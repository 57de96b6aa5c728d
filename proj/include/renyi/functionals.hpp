#pragma once

// Entropy-type functionals of a density u on a Geometry.
//
// Notation: v = p/(p-1) u^{p-1} is the pressure (= e'(u)), |u|_p^p = int u^p dmu,
// d gamma = u^p dmu / |u|_p^p, and tau = t - time origin is the time variable
// entering the t-weighted functionals.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/geometry.hpp"
#include "renyi/params.hpp"

namespace renyi {

struct FunctionalSample {
  double t = 0.0;
  double H_p = 0.0;
  double N_p = 0.0;
  double I_p = 0.0;
  double E = 0.0;
  double Eprime = 0.0;
  double Edoubleprime = 0.0;
  double N_u = 0.0;
  double W_p = 0.0;
  double dW_dt = 0.0;
  double d2Np_dt2_formula = 0.0;
  double norm_up = 0.0;
};

/// eps = floor_rel * max u; nodes with u <= eps are outside the support mask.
inline double support_threshold(std::span<const double> u, const FlowParams& params) {
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, x);
  return params.floor_rel() * umax;
}

/// v = p/(p-1) u^{p-1}. For p < 1 the floor eps replaces u below it.
inline std::vector<double> pressure(std::span<const double> u, const FlowParams& params) {
  params.require_nonlinear("pressure");
  const double p = params.p();
  const double c = p / (p - 1.0);
  const double eps = support_threshold(u, params);
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::max(u[i], 0.0);
    v[i] = p > 1.0 ? c * std::pow(x, p - 1.0) : c * std::pow(std::max(x, eps), p - 1.0);
  }
  return v;
}

/// int u^p dmu (negative values count as zero).
inline double norm_up(const Geometry& geo, std::span<const double> u, double p) {
  std::vector<double> up(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) up[i] = u[i] > 0.0 ? std::pow(u[i], p) : 0.0;
  return integrate(geo, up);
}

/// Every pointwise quantity built from the pressure of one field.
struct PressureData {
  double t = 0.0;
  double norm_up = 0.0;
  double eps = 0.0;
  std::vector<double> u, up, v, grad_sq, lv;
  std::vector<char> mask;
  HessianField hess;
};

inline PressureData pressure_data(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  detail::check_size(geo, u.view(), "pressure_data");
  params.require_nonlinear("pressure_data");
  PressureData d;
  d.t = u.t;
  d.u = u.values;
  d.eps = support_threshold(u.view(), params);
  d.up.resize(u.size());
  d.mask.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d.up[i] = u.values[i] > 0.0 ? std::pow(u.values[i], params.p()) : 0.0;
    d.mask[i] = u.values[i] > d.eps;
  }
  d.norm_up = integrate(geo, d.up);
  if (!(d.norm_up > 0.0)) throw DataError("pressure_data: int u^p dmu vanishes");
  d.v = pressure(u.view(), params);
  d.grad_sq = grad_norm_sq(geo, d.v, u.t);
  d.lv = witten_laplacian(geo, d.v, u.t);
  d.hess = hessian_data(geo, d.v, u.t);
  return d;
}

namespace detail {

/// int f dmu restricted to the support mask.
inline double masked_integral(const Geometry& geo, const std::vector<double>& f, const std::vector<char>& mask) {
  const auto& w = geo.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) s += f[i] * w[i];
  return s;
}

inline void require_tau(double tau, const char* who) {
  if (!(tau > 0.0)) throw DomainError(std::string(who) + ": requires t - t_origin > 0");
}

}  // namespace detail

inline double renyi_entropy(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  params.require_nonlinear("renyi_entropy");
  const double nu = norm_up(geo, u.view(), params.p());
  if (!(nu > 0.0)) throw DataError("renyi_entropy: int u^p dmu vanishes");
  return std::log(nu) / (1.0 - params.p());
}

inline double entropy_power(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  return std::exp(params.sigma() * renyi_entropy(geo, u, params));
}

/// E'(u) = int |grad v|^2 u dmu over the support mask.
inline double E_prime(const PressureData& d, const Geometry& geo) {
  std::vector<double> f(d.u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = d.grad_sq[i] * std::max(d.u[i], 0.0);
  return detail::masked_integral(geo, f, d.mask);
}

/// I_p = (1/|u|_p^p) int_{u>eps} |grad u^p|^2 / u dmu, evaluated as
/// int |grad v|^2 u since grad u^p = u grad v.
inline double fisher_information(const PressureData& d, const Geometry& geo) { return E_prime(d, geo) / d.norm_up; }

inline double fisher_information(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  return fisher_information(pressure_data(geo, u, params), geo);
}

/// E(u) = int u^p / (p-1) dmu.
inline double E_value(const PressureData& d, const FlowParams& params) { return d.norm_up / (params.p() - 1.0); }

/// E''(u) with the Ric(L) = Ric + Hess phi curvature and, on scaled tori,
/// the d/dt g (grad v, grad v) u term.
inline double E_doubleprime(const PressureData& d, const Geometry& geo, const FlowParams& params) {
  const double p = params.p();
  const double k2 = geo.metric_rate(d.t);
  std::vector<double> f(d.u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double g2 = d.grad_sq[i];
    f[i] = 2.0 * (d.hess.hs_sq[i] + geo.ricci_inf(i) * g2) * d.up[i] +
           2.0 * (p - 1.0) * d.lv[i] * d.lv[i] * d.up[i] + 2.0 * k2 * g2 * std::max(d.u[i], 0.0);
  }
  return integrate(geo, f);
}

inline double E_doubleprime(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  return E_doubleprime(pressure_data(geo, u, params), geo, params);
}

/// Closed-form right-hand side of the second derivative of N_p along the flow.
inline double d2Np_formula(const PressureData& d, const Geometry& geo, const FlowParams& params) {
  const double m = params.m();
  const double n = geo.dim();
  geo.check_dimension(m);
  const double sigma = params.sigma();
  const double Np = std::exp(sigma * std::log(d.norm_up) / (1.0 - params.p()));
  const auto& w = geo.weights();

  double mean = 0.0, second = 0.0, ric = 0.0, rest = 0.0, k2term = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double wg = d.up[i] * w[i];
    const double lv = d.lv[i];
    mean += lv * wg;
    second += lv * lv * wg;
    ric += geo.ricci_mn(i, m) * d.grad_sq[i] * wg;
    double r = d.hess.traceless_sq[i];
    if (m > n) {
      const double s = lv + m / (m - n) * d.hess.drift_dot[i];
      r += (m - n) / (m * n) * s * s;
    }
    rest += r * wg;
    k2term += d.grad_sq[i] * std::max(d.u[i], 0.0) * w[i];
  }
  mean /= d.norm_up;
  second /= d.norm_up;
  ric /= d.norm_up;
  rest /= d.norm_up;
  k2term *= 2.0 * geo.metric_rate(d.t) / d.norm_up;
  const double var = second - mean * mean;
  return -2.0 * sigma * Np * ((params.p() - 1.0 + 1.0 / m) * var + ric + rest) - sigma * Np * k2term;
}

inline double d2Np_formula(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  return d2Np_formula(pressure_data(geo, u, params), geo, params);
}

/// F_alpha = alpha (p-1) L v + (alpha - 1) |grad v|^2 / v on the support mask, 0 elsewhere.
inline std::vector<double> F_alpha(const PressureData& d, const FlowParams& params, double alpha) {
  if (!(alpha >= 1.0)) throw DomainError("F_alpha: alpha must be >= 1");
  std::vector<double> f(d.u.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!d.mask[i]) continue;
    f[i] = alpha * (params.p() - 1.0) * d.lv[i];
    if (alpha != 1.0) f[i] += (alpha - 1.0) * d.grad_sq[i] / d.v[i];
  }
  return f;
}

inline std::vector<double> F_alpha(const Geometry& geo, const ScalarField& u, const FlowParams& params,
                                   double alpha) {
  return F_alpha(pressure_data(geo, u, params), params, alpha);
}

/// int v u dmu.
inline double pressure_moment(const PressureData& d, const Geometry& geo) {
  std::vector<double> f(d.u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = d.v[i] * std::max(d.u[i], 0.0);
  return integrate(geo, f);
}

/// N_u(tau) = -tau^a int v u dmu.
inline double ni_entropy(const PressureData& d, const Geometry& geo, const FlowParams& params, double tau) {
  detail::require_tau(tau, "ni_entropy");
  return -std::pow(tau, params.a()) * pressure_moment(d, geo);
}

/// W_p(tau) = tau^{a+1} int (p |grad v|^2 / v - (a+1)/tau) v u dmu.
inline double w_entropy(const PressureData& d, const Geometry& geo, const FlowParams& params, double tau) {
  detail::require_tau(tau, "w_entropy");
  const double a = params.a();
  return params.p() * std::pow(tau, a + 1.0) * E_prime(d, geo) - (a + 1.0) * std::pow(tau, a) * pressure_moment(d, geo);
}

/// dW_p/dt as the negative sum of squares; static metrics only.
inline double w_entropy_rate(const PressureData& d, const Geometry& geo, const FlowParams& params, double tau) {
  detail::require_tau(tau, "w_entropy_rate");
  if (geo.scale_law()) throw DomainError("w_entropy_rate: time-dependent metrics are not supported");
  const double p = params.p();
  const double m = params.m();
  const double n = geo.dim();
  geo.check_dimension(m);
  const double c = 1.0 / ((params.b() + 2.0) * tau);
  const double kt = params.kappa() / tau;
  std::vector<double> f(d.u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = d.hess.hs_sq[i] + 2.0 * c * d.hess.laplacian[i] + n * c * c;
    if (m > n) {
      const double r = d.hess.drift_dot[i] - (m - n) * c;
      s += r * r / (m - n);
    }
    s += geo.ricci_mn(i, m) * d.grad_sq[i];
    const double q = d.lv[i] + kt;
    f[i] = (2.0 * p * s + 2.0 * p * (p - 1.0) * q * q) * d.up[i];
  }
  return -std::pow(tau, params.a() + 1.0) * integrate(geo, f);
}

/// d N_u / dt from the F_1 representation: -tau^a int (F_1 + a/tau) v u dmu.
inline double ni_entropy_rate(const PressureData& d, const Geometry& geo, const FlowParams& params, double tau) {
  detail::require_tau(tau, "ni_entropy_rate");
  const double a = params.a();
  std::vector<double> f(d.u.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = ((params.p() - 1.0) * d.lv[i] + a / tau) * d.v[i] * std::max(d.u[i], 0.0);
  return -std::pow(tau, a) * integrate(geo, f);
}

/// All functionals of one sample. Entries that need tau > 0, or a static
/// metric, are NaN when unavailable.
inline FunctionalSample evaluate_sample(const Geometry& geo, const ScalarField& u, const FlowParams& params,
                                        double tau) {
  const auto d = pressure_data(geo, u, params);
  FunctionalSample s;
  s.t = u.t;
  s.norm_up = d.norm_up;
  s.H_p = std::log(d.norm_up) / (1.0 - params.p());
  s.N_p = std::exp(params.sigma() * s.H_p);
  s.E = E_value(d, params);
  s.Eprime = E_prime(d, geo);
  s.I_p = s.Eprime / d.norm_up;
  s.Edoubleprime = E_doubleprime(d, geo, params);
  s.d2Np_dt2_formula = d2Np_formula(d, geo, params);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  s.N_u = s.W_p = s.dW_dt = nan;
  if (tau > 0.0) {
    s.N_u = ni_entropy(d, geo, params, tau);
    s.W_p = w_entropy(d, geo, params, tau);
    if (!geo.scale_law()) s.dW_dt = w_entropy_rate(d, geo, params, tau);
  }
  return s;
}

// Shannon (p -> 1) counterparts.

inline double shannon_entropy(const Geometry& geo, const ScalarField& u, double floor_rel = 1e-10) {
  double umax = 0.0;
  for (double x : u.values) umax = std::max(umax, x);
  if (!(umax > 0.0)) throw DataError("shannon_entropy: zero mass");
  const double eps = floor_rel * umax;
  std::vector<double> f(u.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (u.values[i] > eps) f[i] = -u.values[i] * std::log(u.values[i]);
  return integrate(geo, f);
}

inline double shannon_power(const Geometry& geo, const ScalarField& u, double m, double floor_rel = 1e-10) {
  return std::exp(2.0 * shannon_entropy(geo, u, floor_rel) / m);
}

/// int |grad log u|^2 u dmu on the support mask (the p -> 1 limit of the pressure form).
inline double shannon_fisher(const Geometry& geo, const ScalarField& u, double floor_rel = 1e-10) {
  double umax = 0.0;
  for (double x : u.values) umax = std::max(umax, x);
  if (!(umax > 0.0)) throw DataError("shannon_fisher: zero mass");
  const double eps = floor_rel * umax;
  std::vector<double> lg(u.size());
  std::vector<char> mask(u.size());
  for (std::size_t i = 0; i < lg.size(); ++i) {
    lg[i] = std::log(std::max(u.values[i], eps));
    mask[i] = u.values[i] > eps;
  }
  auto g = grad_norm_sq(geo, lg, u.t);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= u.values[i];
  return detail::masked_integral(geo, g, mask);
}

}  // namespace renyi
