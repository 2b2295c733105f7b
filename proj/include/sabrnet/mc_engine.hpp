#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sabrnet/sabr_point.hpp"
#include "sabrnet/simd/path_kernels.hpp"

namespace sabrnet {

using simd::SigmaScheme;

/// Volatility of the lognormal control variate.
enum class CvVolMode {
  paper_alpha,    // sigma_bar = alpha
  effective_atm,  // sigma_bar = alpha * F0^(beta-1)
};

std::string_view to_string(CvVolMode m);
std::string_view to_string(SigmaScheme s);
CvVolMode cv_vol_mode_from_string(std::string_view s);
SigmaScheme sigma_scheme_from_string(std::string_view s);

struct McConfig {
  std::size_t paths = 100000;
  double steps_per_year = 50.0;
  std::size_t min_steps = 10;
  CvVolMode cv_vol_mode = CvVolMode::paper_alpha;
  std::uint64_t base_seed = 42;
  SigmaScheme sigma_scheme = SigmaScheme::log_exact;
  unsigned workers = 1;

  static constexpr std::size_t kMinPaths = 1000;
  static constexpr std::size_t kBlockSize = 4096;

  /// Throws ConfigError.
  void validate() const;
  /// N = max(min_steps, ceil(steps_per_year * T)).
  [[nodiscard]] std::size_t steps(double T) const;
  [[nodiscard]] double sigma_bar(const SabrPoint& p) const;
};

struct PriceEstimate {
  double price = 0.0;
  double std_error = 0.0;
  std::size_t paths_used = 0;
};

/// Terminal values of the coupled SABR and lognormal-control paths. The
/// same terminals price every strike of a configuration.
struct Terminals {
  SabrPoint params;  // strike ignored
  double sigma_bar = 0.0;
  std::size_t steps = 0;
  std::uint64_t normals_drawn = 0;
  std::vector<double> fwd;
  std::vector<double> black;
};

/// Simulates cfg.paths paths in blocks of kBlockSize. Block b draws from a
/// generator seeded by (base_seed, config_index, b), so output is
/// independent of the worker count.
Terminals simulate_terminals(const SabrPoint& p, const McConfig& cfg,
                             std::uint64_t config_index = 0);

/// mean(Pi_sabr - Pi_black) + C_black(T, F0, K, sigma_bar).
PriceEstimate cv_price(const Terminals& t, double strike);
/// mean(Pi_sabr), for comparison with the control-variate estimator.
PriceEstimate plain_price(const Terminals& t, double strike);
PriceEstimate cv_price(const SabrPoint& p, const McConfig& cfg, std::uint64_t config_index = 0);

struct McVol {
  double sigma = 0.0;
  double std_error = 0.0;  // price std error / vega
  PriceEstimate estimate;
};

/// Inverts the control-variate price. Throws PriceOutOfBounds when the
/// estimate falls outside (intrinsic, F0).
McVol mc_implied_vol(const Terminals& t, double strike);
McVol mc_implied_vol(const SabrPoint& p, const McConfig& cfg, std::uint64_t config_index = 0);

}  // namespace sabrnet
