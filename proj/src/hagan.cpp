#include "sabrnet/hagan.hpp"

#include <cmath>
#include <string>

namespace sabrnet {

std::string_view to_string(HaganBracket b) {
  return b == HaganBracket::numerator ? "numerator" : "denominator";
}

HaganBracket hagan_bracket_from_string(std::string_view s) {
  if (s == "numerator") return HaganBracket::numerator;
  if (s == "denominator") return HaganBracket::denominator;
  throw ConfigError("unknown hagan bracket '" + std::string(s) + "'");
}

double zx_ratio(double z, double rho) {
  if (!(std::abs(rho) <= SabrPoint::kRhoBound)) throw DomainError("zx_ratio: |rho| > 0.95");
  if (z == 0.0) return 1.0;
  if (std::abs(z) < 1e-6) return 1.0 - 0.5 * rho * z;
  const double disc = 1.0 - 2.0 * rho * z + z * z;
  if (disc < 0.0) throw DomainError("zx_ratio: negative discriminant");
  const double root = std::sqrt(disc);
  // ln(arg) written as log1p(arg - 1) with sqrt(disc) - 1 rationalised.
  const double arg_minus_one = ((z * z - 2.0 * rho * z) / (root + 1.0) + z) / (1.0 - rho);
  const double x = std::log1p(arg_minus_one);
  return z / x;
}

double hagan_atm(const SabrPoint& p) {
  p.validate();
  const double omb = 1.0 - p.beta;
  const double f_omb = omb == 0.0 ? 1.0 : std::pow(p.F0, omb);
  const double c1 = omb * omb * p.alpha * p.alpha / (24.0 * f_omb * f_omb);
  const double c2 = p.rho * p.beta * p.nu * p.alpha / (4.0 * f_omb);
  const double c3 = (2.0 - 3.0 * p.rho * p.rho) * p.nu * p.nu / 24.0;
  const double sigma = p.alpha / f_omb * (1.0 + p.T * (c1 + c2 + c3));
  if (!(sigma > 0.0)) throw NegativeVol("hagan_atm: nonpositive volatility");
  return sigma;
}

HaganEval hagan_eval(const SabrPoint& p, const HaganOptions& opts) {
  p.validate();
  HaganEval out;
  const double log_fk = std::log(p.F0 / p.K);
  if (std::abs(log_fk) < kAtmLogMoneyness) {
    out.sigma = hagan_atm(p);
    return out;
  }
  const double omb = 1.0 - p.beta;
  const double fk_half = omb == 0.0 ? 1.0 : std::pow(p.F0 * p.K, 0.5 * omb);

  out.z = p.nu / p.alpha * fk_half * log_fk;
  out.ratio = zx_ratio(out.z, p.rho);
  out.x_of_z = out.z == 0.0 ? 0.0 : out.z / out.ratio;

  const double l2 = log_fk * log_fk;
  const double omb2 = omb * omb;
  const double bracket = 1.0 + omb2 / 24.0 * l2 + omb2 * omb2 / 1920.0 * l2 * l2;
  const double correction =
      1.0 + p.T * (omb2 * p.alpha * p.alpha / (24.0 * fk_half * fk_half) +
                   p.rho * p.beta * p.nu * p.alpha / (4.0 * fk_half) +
                   (2.0 - 3.0 * p.rho * p.rho) * p.nu * p.nu / 24.0);

  const double lead = opts.bracket == HaganBracket::numerator ? p.alpha / fk_half * bracket
                                                              : p.alpha / (fk_half * bracket);
  out.sigma = lead * out.ratio * correction;
  if (!(out.sigma > 0.0)) throw NegativeVol("hagan_vol: nonpositive volatility");
  return out;
}

double hagan_vol(const SabrPoint& p, const HaganOptions& opts) { return hagan_eval(p, opts).sigma; }

}  // namespace sabrnet
