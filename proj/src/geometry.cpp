#include "sabrnet/geometry.hpp"

#include <cmath>

#include "sabrnet/hagan.hpp"

namespace sabrnet {

namespace {

void check_alpha_rho(double alpha, double rho) {
  if (!(alpha > 0.0)) throw DomainError("geometry: alpha must be > 0");
  if (!(std::abs(rho) <= SabrPoint::kRhoBound)) throw DomainError("geometry: |rho| > 0.95");
}

}  // namespace

double q_transform(double F0, double K, double beta) {
  if (!(F0 > 0.0 && K > 0.0)) throw DomainError("q_transform: F0, K must be > 0");
  if (beta < 0.0 || beta > 1.0) throw DomainError("q_transform: beta outside [0,1]");
  const double log_kf = std::log(K / F0);
  const double omb = 1.0 - beta;
  if (omb < 1e-9) return log_kf;
  // (K^omb - F0^omb) / omb without cancellation near K = F0
  return std::pow(F0, omb) * std::expm1(omb * log_kf) / omb;
}

double sigma_min(double alpha, double rho, double q) {
  check_alpha_rho(alpha, rho);
  return std::hypot(q + rho * alpha, alpha * std::sqrt(1.0 - rho * rho));
}

double geodesic_distance(double alpha, double rho, double q) {
  const double smin = sigma_min(alpha, rho, q);
  // numerator - (1+rho) alpha = smin - alpha + q, with smin - alpha rationalised
  const double excess = q * ((2.0 * rho * alpha + q) / (smin + alpha) + 1.0);
  const double arg_minus_one = excess / ((1.0 + rho) * alpha);
  if (!(arg_minus_one > -1.0)) throw DomainError("geodesic_distance: nonpositive log argument");
  return std::log1p(arg_minus_one);
}

double sigma0_leading(const SabrPoint& p, double q, double d_h) {
  (void)q;
  const double log_kf = std::log(p.K / p.F0);
  if (std::abs(log_kf) < kAtmLogMoneyness) {
    return p.beta == 1.0 ? p.alpha : p.alpha * std::pow(p.F0, p.beta - 1.0);
  }
  if (d_h == 0.0) throw DomainError("sigma0_leading: zero geodesic distance off the money");
  return log_kf / d_h;
}

GeomFeatures features(const SabrPoint& p) {
  p.validate();
  GeomFeatures g;
  g.q = q_transform(p.F0, p.K, p.beta);
  g.sigma_min = sigma_min(p.alpha, p.rho, g.q);
  g.d_h = geodesic_distance(p.alpha, p.rho, g.q);
  g.sigma0 = sigma0_leading(p, g.q, g.d_h);
  return g;
}

HalfPlanePoint to_halfplane(double q, double sigma, double rho) {
  if (!(sigma > 0.0)) throw DomainError("to_halfplane: sigma must be > 0");
  if (!(std::abs(rho) <= SabrPoint::kRhoBound)) throw DomainError("to_halfplane: |rho| > 0.95");
  return {(q - rho * sigma) / std::sqrt(1.0 - rho * rho), sigma};
}

}  // namespace sabrnet
