#pragma once

#include <cmath>
#include <string>

#include "renyi/error.hpp"

namespace renyi {

/// Exponents of the nonlinear diffusion equation du/dt = L(u^p) together with
/// the constants derived from them. Derived values are recomputed on access.
class FlowParams {
 public:
  FlowParams(double p, double m, int n, double floor_rel = 1e-10)
      : p_(p), m_(m), n_(n), floor_rel_(floor_rel) {
    if (!std::isfinite(p) || !std::isfinite(m)) throw DomainError("FlowParams: non-finite exponent");
    if (n < 1) throw DomainError("FlowParams: dimension n must be >= 1");
    if (m < n) throw DomainError("FlowParams: m must satisfy m >= n");
    if (!(p > 1.0 - 2.0 / m))
      throw DomainError("FlowParams: p must exceed 1 - 2/m (got p=" + std::to_string(p) +
                        ", m=" + std::to_string(m) + ")");
    if (!(floor_rel >= 0.0)) throw DomainError("FlowParams: positivity floor must be >= 0");
  }

  double p() const noexcept { return p_; }
  double m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  /// Relative positivity floor: eps = floor_rel * max u.
  double floor_rel() const noexcept { return floor_rel_; }

  double sigma() const noexcept { return p_ - 1.0 + 2.0 / m_; }
  double kappa() const noexcept { return m_ / (m_ * (p_ - 1.0) + 2.0); }
  double a() const noexcept { return (p_ - 1.0) * kappa(); }
  double b() const noexcept { return m_ * (p_ - 1.0); }
  double nu() const noexcept { return 2.0 + n_ * (p_ - 1.0); }

  bool is_linear() const noexcept { return p_ == 1.0; }

  FlowParams with_floor(double floor_rel) const { return FlowParams(p_, m_, n_, floor_rel); }

  /// Rejects p = 1, where the Renyi formulas have a removable singularity.
  void require_nonlinear(const char* who) const {
    if (is_linear()) throw DomainError(std::string(who) + ": p = 1 is handled by the Shannon variants");
  }

 private:
  double p_;
  double m_;
  int n_;
  double floor_rel_;
};

}  // namespace renyi
