#pragma once

// Discretized model geometries for the weighted diffusion lab.
//
// Every geometry is a structured grid of cell-centred nodes. The Witten
// Laplacian is assembled in flux (finite-volume) form
//
//   (L f)_i = (1/w_i) * sum_faces A_f (f_nb - f_i) / h,
//
// where w_i is the mu-measure of cell i and A_f the weighted face area. This
// makes sum_i w_i (L f)_i g_i symmetric in (f, g) and annihilate constants
// exactly. Gradient products at nodes average the two one-sided differences,
// so on tori the discrete Dirichlet form matches -<L f, g> to round-off.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renyi/error.hpp"

namespace renyi {

enum class GeometryKind { Torus1D, Torus2D, WeightedInterval, ZonalSphere, ScaledTorus };

inline std::string to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::Torus1D: return "Torus1D";
    case GeometryKind::Torus2D: return "Torus2D";
    case GeometryKind::WeightedInterval: return "WeightedInterval";
    case GeometryKind::ZonalSphere: return "ZonalSphere";
    case GeometryKind::ScaledTorus: return "ScaledTorus";
  }
  return "?";
}

/// Values sampled on a geometry's nodes at time t.
struct ScalarField {
  std::vector<double> values;
  double t = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
};

/// Per-node second-order data of a field.
struct HessianField {
  std::vector<double> hs_sq;         ///< |Hess f|^2 (Hilbert-Schmidt)
  std::vector<double> laplacian;     ///< trace of Hess f (metric Laplacian, no drift)
  std::vector<double> traceless_sq;  ///< |Hess f - (Lap f / n) g|^2
  std::vector<double> drift_dot;     ///< grad phi . grad f
};

/// Homothetic scale law s(t) = exp(c t) of a scaled torus.
struct ScaleLaw {
  double rate = 0.0;
  double s(double t) const { return std::exp(rate * t); }
  /// s'(t) / s(t); equals K2 in d/dt g >= 2 K2 g.
  double log_rate(double /*t*/) const { return rate; }
};

class Geometry {
 public:
  /// Flat periodic circle [lo, hi) with N nodes.
  static Geometry torus1d(int N, double lo = 0.0, double hi = 1.0) {
    Geometry g(GeometryKind::Torus1D, 1, N, 1, lo, hi);
    g.init_flat();
    return g;
  }

  /// Flat periodic square [lo, hi)^2 with N x N nodes.
  static Geometry torus2d(int N, double lo = 0.0, double hi = 1.0) {
    Geometry g(GeometryKind::Torus2D, 2, N, N, lo, hi);
    g.init_flat();
    return g;
  }

  /// Torus of dimension `dim` carrying the metric s(t)^2 g_flat and the
  /// potential phi(t) = dim * log s(t), so that d mu = dx is time invariant.
  static Geometry scaled_torus(int N, double rate, int dim = 1, double lo = 0.0, double hi = 1.0) {
    if (dim != 1 && dim != 2) throw DomainError("scaled_torus: dim must be 1 or 2");
    Geometry g(GeometryKind::ScaledTorus, dim, N, dim == 2 ? N : 1, lo, hi);
    g.scale_ = ScaleLaw{rate};
    g.init_flat();
    return g;
  }

  /// Interval [lo, hi] with potential phi(x) = a x^2 and Neumann closure.
  static Geometry weighted_interval(int N, double a, double lo = -0.5, double hi = 0.5) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw DomainError("weighted_interval: quadratic coefficient must be finite and >= 0");
    Geometry g(GeometryKind::WeightedInterval, 1, N, 1, lo, hi);
    g.quad_ = a;
    g.init_weighted();
    return g;
  }

  /// Unit round sphere restricted to axisymmetric fields on a theta grid.
  static Geometry zonal_sphere(int N) {
    Geometry g(GeometryKind::ZonalSphere, 2, N, 1, 0.0, std::numbers::pi);
    g.init_sphere();
    return g;
  }

  GeometryKind kind() const noexcept { return kind_; }
  /// Topological dimension n.
  int dim() const noexcept { return dim_; }
  /// Number of grid axes (2 only for the two-dimensional tori).
  int axes() const noexcept { return ny_ > 1 ? 2 : 1; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  double spacing() const noexcept { return h_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool periodic() const noexcept {
    return kind_ == GeometryKind::Torus1D || kind_ == GeometryKind::Torus2D ||
           kind_ == GeometryKind::ScaledTorus;
  }
  /// True when grad phi is not identically zero.
  bool has_drift() const noexcept { return kind_ == GeometryKind::WeightedInterval && quad_ != 0.0; }
  double quadratic_coefficient() const noexcept { return quad_; }
  const std::optional<ScaleLaw>& scale_law() const noexcept { return scale_; }

  const std::vector<double>& weights() const noexcept { return w_; }
  /// Chart coordinate of node i along `axis`.
  double coord(std::size_t i, int axis = 0) const {
    const int ix = static_cast<int>(i % nx_);
    const int iy = static_cast<int>(i / nx_);
    return lo_ + ((axis == 0 ? ix : iy) + 0.5) * h_;
  }
  const std::vector<double>& phi() const noexcept { return phi_; }
  const std::vector<double>& dphi() const noexcept { return dphi_; }
  const std::vector<double>& d2phi() const noexcept { return d2phi_; }

  double total_measure() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
  }

  /// Closed-form mu-volume of the geometry.
  double analytic_measure() const {
    const double len = hi_ - lo_;
    switch (kind_) {
      case GeometryKind::Torus1D:
      case GeometryKind::ScaledTorus: return dim_ == 2 ? len * len : len;
      case GeometryKind::Torus2D: return len * len;
      case GeometryKind::ZonalSphere: return 4.0 * std::numbers::pi;
      case GeometryKind::WeightedInterval: return gauss_mass(lo_, hi_);
    }
    return 0.0;
  }

  /// s(t) for scaled tori, 1 otherwise.
  double scale(double t) const { return scale_ ? scale_->s(t) : 1.0; }
  /// K2(t) = s'/s, the rate in d/dt g = 2 K2 g; zero for static metrics.
  double metric_rate(double t) const { return scale_ ? scale_->log_rate(t) : 0.0; }
  /// Conformal factor s(t)^{-2} applied to flat first and second derivatives.
  double metric_factor(double t) const {
    const double s = scale(t);
    return 1.0 / (s * s);
  }
  /// Spatially constant potential dim*log s(t) of a scaled torus.
  double scaled_potential(double t) const { return scale_ ? dim_ * std::log(scale(t)) : 0.0; }

  /// Bound on the Gershgorin radius of -L scaled by h^2/4 (1 for the 1D flat torus).
  double stiffness_factor(double t) const { return stiffness_ * metric_factor(t); }

  /// Neighbour of node i one step along `axis` in direction dir = +1/-1,
  /// wrapping on tori and mirroring (ghost = self) at Neumann ends.
  std::size_t neighbor(std::size_t i, int axis, int dir) const {
    const auto& t = dir > 0 ? nplus_ : nminus_;
    return t[static_cast<std::size_t>(axis) * size() + i];
  }

  /// Flux coefficient A_f / (h w_i) of the face of cell i in direction (axis, dir).
  double face_coefficient(std::size_t i, int axis, int dir) const {
    const auto& c = dir > 0 ? cplus_ : cminus_;
    return c[static_cast<std::size_t>(axis) * size() + i];
  }

  /// Isotropic factor k with Ric(L) = Ric + Hess phi = k g at node i.
  double ricci_inf(std::size_t i) const {
    switch (kind_) {
      case GeometryKind::ZonalSphere: return 1.0;
      case GeometryKind::WeightedInterval: return d2phi_[i];
      default: return 0.0;
    }
  }

  /// Isotropic factor k with Ric_{m,n}(L) = k g at node i.
  double ricci_mn(std::size_t i, double m) const {
    check_dimension(m);
    double k = ricci_inf(i);
    if (m > dim_) k -= dphi_[i] * dphi_[i] / (m - dim_);
    return k;
  }

  /// Rejects m < n, and m = n on a geometry with non-constant potential.
  void check_dimension(double m) const {
    if (m < dim_) throw DomainError("Ric_{m,n}: m must be >= n = " + std::to_string(dim_));
    if (m == dim_ && has_drift()) throw DomainError("Ric_{m,n}: m = n requires phi to be constant");
  }

 private:
  Geometry(GeometryKind kind, int dim, int nx, int ny, double lo, double hi)
      : kind_(kind), dim_(dim), nx_(nx), ny_(ny), lo_(lo), hi_(hi) {
    if (nx < 4 || ny < 1) throw DomainError("Geometry: at least 4 nodes per axis are required");
    if (!(hi > lo)) throw DomainError("Geometry: empty extent");
    h_ = (hi - lo) / nx;
  }

  std::size_t compute_neighbor(std::size_t i, int axis, int dir) const {
    int ix = static_cast<int>(i % nx_);
    int iy = static_cast<int>(i / nx_);
    int& c = axis == 0 ? ix : iy;
    const int len = axis == 0 ? nx_ : ny_;
    c += dir;
    if (c < 0 || c >= len) c = periodic() ? (c + len) % len : c - dir;
    return static_cast<std::size_t>(iy) * nx_ + ix;
  }

  void allocate() {
    const std::size_t n = size();
    w_.assign(n, 0.0);
    phi_.assign(n, 0.0);
    dphi_.assign(n, 0.0);
    d2phi_.assign(n, 0.0);
    cplus_.assign(2 * n, 0.0);
    cminus_.assign(2 * n, 0.0);
    nplus_.assign(2 * n, 0);
    nminus_.assign(2 * n, 0);
    for (int ax = 0; ax < axes(); ++ax)
      for (std::size_t i = 0; i < n; ++i) {
        nplus_[ax * n + i] = compute_neighbor(i, ax, +1);
        nminus_[ax * n + i] = compute_neighbor(i, ax, -1);
      }
  }

  void init_flat() {
    allocate();
    const double cell = axes() == 2 ? h_ * h_ : h_;
    std::fill(w_.begin(), w_.end(), cell);
    const double c = 1.0 / (h_ * h_);
    for (int ax = 0; ax < axes(); ++ax)
      for (std::size_t i = 0; i < size(); ++i) {
        cplus_[ax * size() + i] = c;
        cminus_[ax * size() + i] = c;
      }
    stiffness_ = axes();
  }

  double gauss_mass(double x0, double x1) const {
    if (quad_ == 0.0) return x1 - x0;
    const double r = std::sqrt(quad_);
    return 0.5 * std::sqrt(std::numbers::pi) / r * (std::erf(r * x1) - std::erf(r * x0));
  }

  void init_weighted() {
    allocate();
    for (int i = 0; i < nx_; ++i) {
      const double xl = lo_ + i * h_;
      const double x = xl + 0.5 * h_;
      w_[i] = gauss_mass(xl, xl + h_);
      phi_[i] = quad_ * x * x;
      dphi_[i] = 2.0 * quad_ * x;
      d2phi_[i] = 2.0 * quad_;
    }
    double worst = 0.0;
    for (int i = 0; i < nx_; ++i) {
      const double xl = lo_ + i * h_;
      const double xr = xl + h_;
      const double rl = i == 0 ? 0.0 : std::exp(-quad_ * xl * xl);
      const double rr = i == nx_ - 1 ? 0.0 : std::exp(-quad_ * xr * xr);
      cplus_[i] = rr / (h_ * w_[i]);
      cminus_[i] = rl / (h_ * w_[i]);
      worst = std::max(worst, (cplus_[i] + cminus_[i]) * h_ * h_ / 2.0);
    }
    stiffness_ = worst;
  }

  void init_sphere() {
    allocate();
    const double two_pi = 2.0 * std::numbers::pi;
    double worst = 0.0;
    for (int i = 0; i < nx_; ++i) {
      const double th = (i + 0.5) * h_;
      w_[i] = 2.0 * two_pi * std::sin(th) * std::sin(0.5 * h_);
    }
    for (int i = 0; i < nx_; ++i) {
      const double tl = i * h_;
      const double tr = (i + 1) * h_;
      const double al = i == 0 ? 0.0 : two_pi * std::sin(tl);
      const double ar = i == nx_ - 1 ? 0.0 : two_pi * std::sin(tr);
      cplus_[i] = ar / (h_ * w_[i]);
      cminus_[i] = al / (h_ * w_[i]);
      worst = std::max(worst, (cplus_[i] + cminus_[i]) * h_ * h_ / 2.0);
    }
    stiffness_ = worst;
  }

  GeometryKind kind_;
  int dim_;
  int nx_;
  int ny_;
  double lo_;
  double hi_;
  double h_ = 0.0;
  double quad_ = 0.0;
  double stiffness_ = 1.0;
  std::optional<ScaleLaw> scale_;
  std::vector<double> w_, phi_, dphi_, d2phi_;
  std::vector<double> cplus_, cminus_;
  std::vector<std::size_t> nplus_, nminus_;
};

namespace detail {

inline void check_size(const Geometry& geo, std::span<const double> f, const char* who) {
  if (f.size() != geo.size())
    throw DataError(std::string(who) + ": field has " + std::to_string(f.size()) +
                    " values but the geometry has " + std::to_string(geo.size()) + " nodes");
}

}  // namespace detail

/// Quadrature sum_i f_i w_i in fixed node order.
inline double integrate(const Geometry& geo, std::span<const double> f) {
  detail::check_size(geo, f, "integrate");
  const auto& w = geo.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw DataError("integrate: non-finite value at node " + std::to_string(i));
    s += f[i] * w[i];
  }
  return s;
}

inline double integrate(const Geometry& geo, const ScalarField& f) { return integrate(geo, f.view()); }

/// Discrete L f = Lap f - grad phi . grad f at metric time t.
inline std::vector<double> witten_laplacian(const Geometry& geo, std::span<const double> f, double t = 0.0) {
  detail::check_size(geo, f, "witten_laplacian");
  const std::size_t n = geo.size();
  std::vector<double> out(n, 0.0);
  const double mf = geo.metric_factor(t);
  for (int ax = 0; ax < geo.axes(); ++ax) {
    for (std::size_t i = 0; i < n; ++i) {
      const double fp = f[geo.neighbor(i, ax, +1)];
      const double fm = f[geo.neighbor(i, ax, -1)];
      out[i] += geo.face_coefficient(i, ax, +1) * (fp - f[i]) + geo.face_coefficient(i, ax, -1) * (fm - f[i]);
    }
  }
  if (mf != 1.0)
    for (double& x : out) x *= mf;
  return out;
}

inline std::vector<double> witten_laplacian(const Geometry& geo, const ScalarField& f) {
  return witten_laplacian(geo, f.view(), f.t);
}

/// Pointwise <grad f, grad g> in the metric at time t.
inline std::vector<double> grad_dot(const Geometry& geo, std::span<const double> f, std::span<const double> g,
                                    double t = 0.0) {
  detail::check_size(geo, f, "grad_dot");
  detail::check_size(geo, g, "grad_dot");
  const std::size_t n = geo.size();
  const double h = geo.spacing();
  const double c = 0.5 * geo.metric_factor(t) / (h * h);
  std::vector<double> out(n, 0.0);
  for (int ax = 0; ax < geo.axes(); ++ax) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = geo.neighbor(i, ax, +1);
      const std::size_t im = geo.neighbor(i, ax, -1);
      out[i] += c * ((f[ip] - f[i]) * (g[ip] - g[i]) + (f[i] - f[im]) * (g[i] - g[im]));
    }
  }
  return out;
}

/// Pointwise |grad f|^2 in the metric at time t.
inline std::vector<double> grad_norm_sq(const Geometry& geo, std::span<const double> f, double t = 0.0) {
  return grad_dot(geo, f, f, t);
}

inline std::vector<double> grad_norm_sq(const Geometry& geo, const ScalarField& f) {
  return grad_norm_sq(geo, f.view(), f.t);
}

/// Centred first difference of f along `axis` (chart units).
inline std::vector<double> centered_derivative(const Geometry& geo, std::span<const double> f, int axis = 0) {
  detail::check_size(geo, f, "centered_derivative");
  std::vector<double> out(geo.size());
  const double inv = 0.5 / geo.spacing();
  for (std::size_t i = 0; i < geo.size(); ++i)
    out[i] = (f[geo.neighbor(i, axis, +1)] - f[geo.neighbor(i, axis, -1)]) * inv;
  return out;
}

/// Hessian norms, metric Laplacian and drift term of f at metric time t.
///
/// The discrete Hessian is built so that its trace minus the drift term equals
/// witten_laplacian(f) node by node; pointwise algebraic identities between
/// these quantities then hold to round-off.
inline HessianField hessian_data(const Geometry& geo, std::span<const double> f, double t = 0.0) {
  detail::check_size(geo, f, "hessian_data");
  const std::size_t n = geo.size();
  const double h = geo.spacing();
  HessianField out;
  out.hs_sq.assign(n, 0.0);
  out.laplacian.assign(n, 0.0);
  out.traceless_sq.assign(n, 0.0);
  out.drift_dot.assign(n, 0.0);
  const std::vector<double> lf = witten_laplacian(geo, f, t);

  switch (geo.kind()) {
    case GeometryKind::Torus1D:
    case GeometryKind::Torus2D:
    case GeometryKind::ScaledTorus: {
      const double mf = geo.metric_factor(t);
      if (geo.axes() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
          out.laplacian[i] = lf[i];
          out.hs_sq[i] = lf[i] * lf[i];
        }
        break;
      }
      const double inv = mf / (h * h);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t xp = geo.neighbor(i, 0, +1), xm = geo.neighbor(i, 0, -1);
        const double hxx = (f[xp] - 2.0 * f[i] + f[xm]) * inv;
        const double hyy = lf[i] - hxx;
        const double hxy = (f[geo.neighbor(xp, 1, +1)] - f[geo.neighbor(xp, 1, -1)] -
                            f[geo.neighbor(xm, 1, +1)] + f[geo.neighbor(xm, 1, -1)]) *
                           0.25 * inv;
        out.laplacian[i] = lf[i];
        out.hs_sq[i] = hxx * hxx + hyy * hyy + 2.0 * hxy * hxy;
        const double d = hxx - hyy;
        out.traceless_sq[i] = 0.5 * d * d + 2.0 * hxy * hxy;
      }
      break;
    }
    case GeometryKind::WeightedInterval: {
      const auto df = centered_derivative(geo, f);
      const auto& dphi = geo.dphi();
      for (std::size_t i = 0; i < n; ++i) {
        out.drift_dot[i] = dphi[i] * df[i];
        const double lap = lf[i] + out.drift_dot[i];
        out.laplacian[i] = lap;
        out.hs_sq[i] = lap * lap;
      }
      break;
    }
    case GeometryKind::ZonalSphere: {
      const auto df = centered_derivative(geo, f);
      for (std::size_t i = 0; i < n; ++i) {
        const double th = geo.coord(i);
        const double hpp = std::cos(th) / std::sin(th) * df[i];
        const double htt = lf[i] - hpp;
        out.laplacian[i] = lf[i];
        out.hs_sq[i] = htt * htt + hpp * hpp;
        const double d = htt - hpp;
        out.traceless_sq[i] = 0.5 * d * d;
      }
      break;
    }
  }
  return out;
}

inline HessianField hessian_data(const Geometry& geo, const ScalarField& f) {
  return hessian_data(geo, f.view(), f.t);
}

/// grad phi . grad f with centred differences (zero on unweighted geometries).
inline std::vector<double> drift_dot(const Geometry& geo, std::span<const double> f) {
  detail::check_size(geo, f, "drift_dot");
  std::vector<double> out(geo.size(), 0.0);
  if (!geo.has_drift()) return out;
  const auto df = centered_derivative(geo, f);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = geo.dphi()[i] * df[i];
  return out;
}

/// Minimum over nodes of the smallest eigenvalue of Ric_{m,n}(L).
inline double certify_curvature(const Geometry& geo, double m) {
  geo.check_dimension(m);
  switch (geo.kind()) {
    case GeometryKind::Torus1D:
    case GeometryKind::Torus2D:
    case GeometryKind::ScaledTorus: return 0.0;
    case GeometryKind::ZonalSphere: return 1.0;
    case GeometryKind::WeightedInterval: break;
  }
  double k = geo.ricci_mn(0, m);
  for (std::size_t i = 1; i < geo.size(); ++i) k = std::min(k, geo.ricci_mn(i, m));
  return k;
}

}  // namespace renyi
