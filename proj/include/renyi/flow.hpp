#pragma once

// Explicit RK4 integration of du/dt = L(u^p) with exact mass bookkeeping.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renyi/error.hpp"
#include "renyi/geometry.hpp"
#include "renyi/params.hpp"

namespace renyi {

inline constexpr double kCflSafety = 0.2;

struct SolverStats {
  std::size_t steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
};

/// Fields sampled at t0 + k * sample_every.
struct Trajectory {
  std::vector<ScalarField> samples;
  double sample_every = 0.0;
  SolverStats stats;

  std::size_t size() const noexcept { return samples.size(); }
  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples) t.push_back(s.t);
    return t;
  }
};

/// Largest stable explicit step for u at metric time t.
inline double cfl_dt(const Geometry& geo, std::span<const double> u, double t, const FlowParams& params) {
  detail::check_size(geo, u, "cfl_dt");
  double umax = 0.0;
  for (double x : u) {
    if (!std::isfinite(x)) throw DataError("cfl_dt: non-finite density");
    umax = std::max(umax, x);
  }
  if (!(umax > 0.0)) throw DataError("cfl_dt: density vanishes identically");
  const double p = params.p();
  const double eps = params.floor_rel() * umax;
  // u^{p-1} is maximal at the largest u for p >= 1 and at the smallest for p < 1
  double umin = umax;
  for (double x : u) umin = std::min(umin, std::max(x, eps));
  const double worst = p >= 1.0 ? std::pow(umax, p - 1.0) : std::pow(umin, p - 1.0);
  const double h = geo.spacing();
  return kCflSafety * h * h / (p * worst * geo.stiffness_factor(t));
}

inline double cfl_dt(const Geometry& geo, const ScalarField& u, const FlowParams& params) {
  return cfl_dt(geo, u.view(), u.t, params);
}

namespace detail {

inline std::vector<double> flow_rhs(const Geometry& geo, std::span<const double> u, double t, double p) {
  std::vector<double> up(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) up[i] = u[i] > 0.0 ? std::pow(u[i], p) : 0.0;
  return witten_laplacian(geo, up, t);
}

}  // namespace detail

/// Clamps negative values and rescales the positive part to carry `mass`.
inline void restore_mass(const Geometry& geo, std::vector<double>& u, double mass) {
  const auto& w = geo.weights();
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0) u[i] = 0.0;
    m += u[i] * w[i];
  }
  if (!(m > 0.0)) throw NumericError("restore_mass: no positive mass left");
  const double s = mass / m;
  for (double& x : u) x *= s;
}

/// One RK4 step of length dt. The mass of the result equals `mass` when
/// given, otherwise the mass of u.
inline ScalarField step(const Geometry& geo, const ScalarField& u, double dt, const FlowParams& params,
                        std::optional<double> mass = std::nullopt) {
  const double limit = cfl_dt(geo, u, params);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-9))
    throw NumericError("step: dt=" + std::to_string(dt) + " violates the stability bound " +
                       std::to_string(limit) + " at t=" + std::to_string(u.t));
  const double p = params.p();
  const std::size_t n = u.size();
  const double t = u.t;
  const double target = mass ? *mass : integrate(geo, u);

  std::vector<double> tmp(n);
  const auto k1 = detail::flow_rhs(geo, u.values, t, p);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u.values[i] + 0.5 * dt * k1[i];
  const auto k2 = detail::flow_rhs(geo, tmp, t + 0.5 * dt, p);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u.values[i] + 0.5 * dt * k2[i];
  const auto k3 = detail::flow_rhs(geo, tmp, t + 0.5 * dt, p);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u.values[i] + dt * k3[i];
  const auto k4 = detail::flow_rhs(geo, tmp, t + dt, p);

  ScalarField out{std::vector<double>(n), t + dt};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = u.values[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(out.values[i]))
      throw NumericError("step: non-finite value at node " + std::to_string(i) + ", t=" + std::to_string(t));
  }
  restore_mass(geo, out.values, target);
  return out;
}

/// Integrates from u0.t to t1, storing a sample every `sample_every`.
/// (t1 - t0) must be a whole number of sampling intervals.
inline Trajectory evolve(const Geometry& geo, const ScalarField& u0, double t1, const FlowParams& params,
                         double sample_every) {
  const double t0 = u0.t;
  if (!(t1 > t0)) throw DomainError("evolve: t1 must exceed t0");
  if (!(sample_every > 0.0)) throw DomainError("evolve: sample interval must be positive");
  const double ratio = (t1 - t0) / sample_every;
  const auto intervals = static_cast<std::size_t>(std::llround(ratio));
  if (intervals == 0 || std::abs(ratio - static_cast<double>(intervals)) > 1e-6 * ratio)
    throw DomainError("evolve: (t1 - t0) is not a multiple of the sample interval");
  for (double x : u0.values)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DataError("evolve: initial density must be finite and >= 0");

  Trajectory traj;
  traj.sample_every = sample_every;
  traj.samples.reserve(intervals + 1);
  traj.samples.push_back(u0);
  const double mass = integrate(geo, u0);
  traj.stats.dt_min = INFINITY;

  ScalarField u = u0;
  for (std::size_t k = 1; k <= intervals; ++k) {
    const double target = t0 + static_cast<double>(k) * sample_every;
    while (u.t < target) {
      const double remaining = target - u.t;
      const double dt_cfl = cfl_dt(geo, u, params);
      const double sub = std::ceil(remaining / dt_cfl * (1.0 - 1e-12));
      const double dt = remaining / std::max(sub, 1.0);
      try {
        u = step(geo, u, dt, params, mass);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (evolve, t=" + std::to_string(u.t) + ")");
      }
      ++traj.stats.steps;
      traj.stats.dt_min = std::min(traj.stats.dt_min, dt);
      traj.stats.dt_max = std::max(traj.stats.dt_max, dt);
      if (sub <= 1.0) u.t = target;
    }
    u.t = target;
    traj.samples.push_back(u);
  }
  return traj;
}

}  // namespace renyi
