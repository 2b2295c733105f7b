#pragma once

#include <cmath>
#include <string>

#include "sabrnet/errors.hpp"

namespace sabrnet {

/// One pricing configuration (T, F0, K, alpha, beta, rho, nu).
struct SabrPoint {
  double T = 1.0;
  double F0 = 1.0;
  double K = 1.0;
  double alpha = 0.2;
  double beta = 0.5;
  double rho = 0.0;
  double nu = 0.0;

  static constexpr double kRhoBound = 0.95;

  /// Throws DomainError when a field is non-finite or out of range.
  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(T) && finite(F0) && finite(K) && finite(alpha) && finite(beta) &&
          finite(rho) && finite(nu)))
      throw DomainError("SabrPoint: non-finite field");
    if (T <= 0.0) throw DomainError("SabrPoint: T must be > 0");
    if (F0 <= 0.0) throw DomainError("SabrPoint: F0 must be > 0");
    if (K <= 0.0) throw DomainError("SabrPoint: K must be > 0");
    if (alpha <= 0.0) throw DomainError("SabrPoint: alpha must be > 0");
    if (beta < 0.0 || beta > 1.0) throw DomainError("SabrPoint: beta outside [0,1]");
    if (std::abs(rho) > kRhoBound) throw DomainError("SabrPoint: |rho| > 0.95");
    if (nu < 0.0) throw DomainError("SabrPoint: nu must be >= 0");
  }

  [[nodiscard]] SabrPoint with_strike(double strike) const {
    SabrPoint p = *this;
    p.K = strike;
    return p;
  }
};

}  // namespace sabrnet
