#pragma once

#include <string_view>

#include "sabrnet/sabr_point.hpp"

namespace sabrnet {

/// Placement of the {1 + (1-b)^2/24 L^2 + (1-b)^4/1920 L^4} factor.
/// `numerator` multiplies it in; `denominator` divides by it.
enum class HaganBracket { numerator, denominator };

std::string_view to_string(HaganBracket b);
HaganBracket hagan_bracket_from_string(std::string_view s);

struct HaganOptions {
  HaganBracket bracket = HaganBracket::numerator;
};

/// |ln(F0/K)| below this routes to the ATM formula (shared with geometry).
inline constexpr double kAtmLogMoneyness = 1e-8;

/// Intermediate values of one Hagan evaluation.
struct HaganEval {
  double z = 0.0;
  double x_of_z = 0.0;
  double ratio = 1.0;  // z / x(z)
  double sigma = 0.0;
};

/// z / x(z) with x(z) = ln((sqrt(1 - 2 rho z + z^2) + z - rho) / (1 - rho)).
/// Equals 1 at z = 0; uses 1 - rho z / 2 for |z| < 1e-6.
double zx_ratio(double z, double rho);

HaganEval hagan_eval(const SabrPoint& p, const HaganOptions& opts = {});
double hagan_vol(const SabrPoint& p, const HaganOptions& opts = {});

/// Strict at-the-money limit; K is ignored. Throws NegativeVol when the
/// maturity correction drives the result to zero or below.
double hagan_atm(const SabrPoint& p);

}  // namespace sabrnet
