#include "sabrnet/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "sabrnet/errors.hpp"
#include "sabrnet/parallel.hpp"
#include "sabrnet/pricing.hpp"

namespace sabrnet {

std::string_view to_string(CvVolMode m) {
  return m == CvVolMode::paper_alpha ? "paper-alpha" : "effective-atm";
}

std::string_view to_string(SigmaScheme s) {
  return s == SigmaScheme::log_exact ? "log-exact" : "euler-strict";
}

CvVolMode cv_vol_mode_from_string(std::string_view s) {
  if (s == "paper-alpha" || s == "paper_alpha") return CvVolMode::paper_alpha;
  if (s == "effective-atm" || s == "effective_atm") return CvVolMode::effective_atm;
  throw ConfigError("unknown control-variate vol mode '" + std::string(s) + "'");
}

SigmaScheme sigma_scheme_from_string(std::string_view s) {
  if (s == "log-exact" || s == "log_exact") return SigmaScheme::log_exact;
  if (s == "euler-strict" || s == "euler_strict") return SigmaScheme::euler_strict;
  throw ConfigError("unknown sigma scheme '" + std::string(s) + "'");
}

void McConfig::validate() const {
  if (paths < kMinPaths) throw ConfigError("McConfig: paths must be >= 1000");
  if (!(steps_per_year > 0.0) || !std::isfinite(steps_per_year))
    throw ConfigError("McConfig: steps_per_year must be > 0");
  if (min_steps < 1) throw ConfigError("McConfig: min_steps must be >= 1");
}

std::size_t McConfig::steps(double T) const {
  const auto scaled = static_cast<std::size_t>(std::ceil(steps_per_year * T));
  return std::max(min_steps, scaled);
}

double McConfig::sigma_bar(const SabrPoint& p) const {
  if (cv_vol_mode == CvVolMode::paper_alpha || p.beta == 1.0) return p.alpha;
  return p.alpha * std::pow(p.F0, p.beta - 1.0);
}

namespace {

std::mt19937_64 block_generator(std::uint64_t base_seed, std::uint64_t config_index,
                                std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(config_index),
                    static_cast<std::uint32_t>(config_index >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

PriceEstimate finish(const Moments& m, std::size_t n, double offset) {
  const double count = static_cast<double>(n);
  const double mean = m.sum / count;
  const double var = std::max(0.0, (m.sum_sq - m.sum * mean) / (count - 1.0));
  PriceEstimate est{mean + offset, std::sqrt(var / count), n};
  if (!std::isfinite(est.price) || !std::isfinite(est.std_error))
    throw NonFinite("mc: non-finite payoff statistics");
  return est;
}

// Block-wise sums combined in block order.
simd::PayoffSums reduce_payoffs(const Terminals& t, double strike) {
  const auto& kernels = simd::path_kernels();
  const std::span<const double> fwd(t.fwd);
  const std::span<const double> black(t.black);
  simd::PayoffSums total;
  for (std::size_t start = 0; start < fwd.size(); start += McConfig::kBlockSize) {
    const std::size_t len = std::min(McConfig::kBlockSize, fwd.size() - start);
    const auto s = kernels.payoff_sums(fwd.subspan(start, len), black.subspan(start, len), strike);
    total.diff += s.diff;
    total.diff_sq += s.diff_sq;
    total.plain += s.plain;
    total.plain_sq += s.plain_sq;
  }
  return total;
}

}  // namespace

Terminals simulate_terminals(const SabrPoint& p, const McConfig& cfg,
                             std::uint64_t config_index) {
  cfg.validate();
  p.with_strike(p.F0).validate();

  Terminals t;
  t.params = p;
  t.sigma_bar = cfg.sigma_bar(p);
  t.steps = cfg.steps(p.T);
  t.fwd.assign(cfg.paths, p.F0);
  t.black.assign(cfg.paths, p.F0);

  const double dt = p.T / static_cast<double>(t.steps);
  const simd::StepCoefficients coeff{p.beta,        p.nu, p.rho, std::sqrt(1.0 - p.rho * p.rho),
                                     std::sqrt(dt), dt,   t.sigma_bar, cfg.sigma_scheme};
  const auto& kernels = simd::path_kernels();
  const std::size_t blocks = (cfg.paths + McConfig::kBlockSize - 1) / McConfig::kBlockSize;

  parallel_for(blocks, cfg.workers, [&](std::size_t b) {
    const std::size_t start = b * McConfig::kBlockSize;
    const std::size_t len = std::min(McConfig::kBlockSize, cfg.paths - start);
    std::vector<double> vol(len, p.alpha);
    std::vector<double> g_w(len), g_perp(len);
    auto gen = block_generator(cfg.base_seed, config_index, b);
    std::normal_distribution<double> normal;
    const simd::PathBlock block{std::span(t.fwd).subspan(start, len), std::span(vol),
                                std::span(t.black).subspan(start, len)};
    for (std::size_t k = 0; k < t.steps; ++k) {
      for (auto& g : g_w) g = normal(gen);
      for (auto& g : g_perp) g = normal(gen);
      kernels.step(coeff, block, g_w, g_perp);
    }
  });

  t.normals_drawn = 2ull * cfg.paths * t.steps;
  return t;
}

PriceEstimate cv_price(const Terminals& t, double strike) {
  const auto s = reduce_payoffs(t, strike);
  const double black =
      black_price(BlackInputs{t.params.T, t.params.F0, strike, t.sigma_bar});
  return finish(Moments{s.diff, s.diff_sq}, t.fwd.size(), black);
}

PriceEstimate plain_price(const Terminals& t, double strike) {
  const auto s = reduce_payoffs(t, strike);
  return finish(Moments{s.plain, s.plain_sq}, t.fwd.size(), 0.0);
}

PriceEstimate cv_price(const SabrPoint& p, const McConfig& cfg, std::uint64_t config_index) {
  p.validate();
  return cv_price(simulate_terminals(p, cfg, config_index), p.K);
}

McVol mc_implied_vol(const Terminals& t, double strike) {
  McVol out;
  out.estimate = cv_price(t, strike);
  out.sigma = implied_vol(out.estimate.price, t.params.T, t.params.F0, strike);
  const double vega = black_vega(BlackInputs{t.params.T, t.params.F0, strike, out.sigma});
  out.std_error = vega > 0.0 ? out.estimate.std_error / vega
                             : std::numeric_limits<double>::infinity();
  return out;
}

McVol mc_implied_vol(const SabrPoint& p, const McConfig& cfg, std::uint64_t config_index) {
  p.validate();
  return mc_implied_vol(simulate_terminals(p, cfg, config_index), p.K);
}

}  // namespace sabrnet
