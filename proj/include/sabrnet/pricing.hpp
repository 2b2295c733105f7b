#pragma once

namespace sabrnet {

/// Inputs of the undiscounted Black call on a forward.
struct BlackInputs {
  double T = 1.0;      // year fraction, > 0
  double F0 = 1.0;     // forward, > 0
  double K = 1.0;      // strike, > 0
  double sigma = 0.2;  // lognormal vol per sqrt(year), >= 0

  /// Throws DomainError on non-finite or nonpositive T/F0/K, or negative sigma.
  void validate() const;
};

/// Standard normal CDF, accurate to ~1 ulp relative in both tails.
double normal_cdf(double x);
double normal_pdf(double x);

/// F0 N(d1) - K N(d2). Returns the intrinsic value when sigma*sqrt(T) < 1e-10.
/// The result is kept inside [(F0-K)+, F0].
double black_price(const BlackInputs& in);

/// dC/dsigma = F0 phi(d1) sqrt(T).
double black_vega(const BlackInputs& in);

struct ImpliedVolOptions {
  double lower = 1e-8;
  double upper = 5.0;
  double upper_cap = 100.0;
  int max_iterations = 200;
  double price_tolerance = 1e-12;  // relative to F0
};

/// Black implied volatility by a bracketed, safeguarded Newton iteration.
/// Throws PriceOutOfBounds unless (F0-K)+ < price < F0, NoConvergence when
/// the bracket cannot be established or the iteration budget runs out.
double implied_vol(double price, double T, double F0, double K,
                   const ImpliedVolOptions& opts = {});

}  // namespace sabrnet
