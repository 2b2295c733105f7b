#include "sabrnet/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sabrnet/errors.hpp"

namespace sabrnet {

void BlackInputs::validate() const {
  if (!(std::isfinite(T) && std::isfinite(F0) && std::isfinite(K) && std::isfinite(sigma)))
    throw DomainError("black: non-finite input");
  if (T <= 0.0 || F0 <= 0.0 || K <= 0.0) throw DomainError("black: T, F0, K must be > 0");
  if (sigma < 0.0) throw DomainError("black: negative sigma");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double black_price(const BlackInputs& in) {
  in.validate();
  const double intrinsic = std::max(in.F0 - in.K, 0.0);
  const double sd = in.sigma * std::sqrt(in.T);
  if (sd < 1e-10) return intrinsic;
  const double d1 = (std::log(in.F0 / in.K) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  const double price = in.F0 * normal_cdf(d1) - in.K * normal_cdf(d2);
  return std::clamp(price, intrinsic, in.F0);
}

double black_vega(const BlackInputs& in) {
  in.validate();
  const double sqrt_t = std::sqrt(in.T);
  const double sd = in.sigma * sqrt_t;
  if (sd < 1e-10) return 0.0;
  const double d1 = (std::log(in.F0 / in.K) + 0.5 * sd * sd) / sd;
  return in.F0 * normal_pdf(d1) * sqrt_t;
}

double implied_vol(double price, double T, double F0, double K, const ImpliedVolOptions& opts) {
  BlackInputs in{T, F0, K, 0.0};
  in.validate();
  if (!std::isfinite(price)) throw PriceOutOfBounds("implied_vol: non-finite price");
  const double intrinsic = std::max(F0 - K, 0.0);
  if (!(price > intrinsic && price < F0))
    throw PriceOutOfBounds("implied_vol: price outside (intrinsic, F0)");

  auto value_at = [&](double s) {
    in.sigma = s;
    return black_price(in);
  };

  double lo = opts.lower;
  double hi = opts.upper;
  while (value_at(hi) < price) {
    if (hi >= opts.upper_cap) throw NoConvergence("implied_vol: price above the vol cap");
    hi = std::min(2.0 * hi, opts.upper_cap);
  }
  if (value_at(lo) > price) throw NoConvergence("implied_vol: price below the lower vol bound");

  // Newton from the inflection point of C(sigma) is monotone for the Black formula.
  const double log_m = std::abs(std::log(F0 / K));
  double sigma = log_m > 1e-12 ? std::sqrt(2.0 * log_m / T)
                               : price / F0 * std::sqrt(2.0 * std::numbers::pi / T);
  if (!(sigma > lo && sigma < hi)) sigma = 0.5 * (lo + hi);

  for (int it = 0; it < opts.max_iterations; ++it) {
    const double f = value_at(sigma) - price;
    if (f == 0.0) return sigma;
    if (f > 0.0) {
      hi = sigma;
    } else {
      lo = sigma;
    }
    in.sigma = sigma;
    const double vega = black_vega(in);
    double next = vega > 0.0 ? sigma - f / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);

    const bool step_converged = std::abs(next - sigma) <= 4e-16 * sigma;
    const bool bracket_converged = hi - lo <= 4e-16 * hi;
    sigma = next;
    if (step_converged || bracket_converged) {
      if (std::abs(value_at(sigma) - price) > opts.price_tolerance * F0)
        throw NoConvergence("implied_vol: converged bracket misses the price tolerance");
      return sigma;
    }
  }
  throw NoConvergence("implied_vol: iteration budget exhausted");
}

}  // namespace sabrnet
