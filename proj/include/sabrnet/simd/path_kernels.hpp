#pragma once

#include <cstddef>
#include <span>

#include "sabrnet/simd/isa.hpp"

namespace sabrnet::simd {

enum class SigmaScheme { log_exact, euler_strict };

/// Per-step constants of the coupled SABR / lognormal-control recursion.
struct StepCoefficients {
  double beta = 0.5;
  double nu = 0.0;
  double rho = 0.0;
  double rho_perp = 1.0;  // sqrt(1 - rho^2)
  double sqrt_dt = 0.1;
  double dt = 0.01;
  double sigma_bar = 0.2;  // control-variate volatility
  SigmaScheme scheme = SigmaScheme::log_exact;
};

/// Mutable structure-of-arrays view over a block of paths.
struct PathBlock {
  std::span<double> fwd;    // SABR forward F
  std::span<double> vol;    // SABR volatility sigma
  std::span<double> black;  // lognormal control forward
};

/// Sums over a block needed by the control-variate and plain estimators.
struct PayoffSums {
  double diff = 0.0;     // sum (Pi_sabr - Pi_black)
  double diff_sq = 0.0;  // sum (Pi_sabr - Pi_black)^2
  double plain = 0.0;    // sum Pi_sabr
  double plain_sq = 0.0;
};

/// Advance every path by one Euler step. `g_w` and `g_perp` are independent
/// standard normals; the forward is driven by g_w, the volatility by
/// rho*g_w + rho_perp*g_perp. F^beta uses max(F,0) and a forward that is
/// nonpositive before the step stays absorbed at zero.
using StepFn = void (*)(const StepCoefficients&, PathBlock, std::span<const double> g_w,
                        std::span<const double> g_perp);

using PayoffFn = PayoffSums (*)(std::span<const double> fwd, std::span<const double> black,
                                double strike);

struct PathKernels {
  StepFn step;
  PayoffFn payoff_sums;
};

namespace scalar {
void step(const StepCoefficients& c, PathBlock b, std::span<const double> g_w,
          std::span<const double> g_perp);
PayoffSums payoff_sums(std::span<const double> fwd, std::span<const double> black,
                       double strike);
}  // namespace scalar

#if defined(SABRNET_HAVE_AVX2)
namespace avx2 {
void step(const StepCoefficients& c, PathBlock b, std::span<const double> g_w,
          std::span<const double> g_perp);
PayoffSums payoff_sums(std::span<const double> fwd, std::span<const double> black,
                       double strike);
}  // namespace avx2
#endif

const PathKernels& path_kernels(Isa isa);
inline const PathKernels& path_kernels() { return path_kernels(active_isa()); }

}  // namespace sabrnet::simd
