#include <cmath>

#include "sabrnet/simd/path_kernels.hpp"

namespace sabrnet::simd {

namespace scalar {

void step(const StepCoefficients& c, PathBlock b, std::span<const double> g_w,
          std::span<const double> g_perp) {
  const std::size_t n = b.fwd.size();
  const double half_nu2_dt = 0.5 * c.nu * c.nu * c.dt;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = b.fwd[i];
    const double s = b.vol[i];
    const double dw = c.sqrt_dt * g_w[i];

    const double fpos = f > 0.0 ? f : 0.0;
    double fpow;
    if (c.beta == 1.0) {
      fpow = fpos;
    } else if (c.beta == 0.0) {
      fpow = 1.0;
    } else {
      fpow = fpos > 0.0 ? std::pow(fpos, c.beta) : 0.0;
    }
    const double fn = f + s * fpow * dw;
    b.fwd[i] = (f > 0.0 && fn > 0.0) ? fn : 0.0;

    const double bl = b.black[i];
    const double bn = bl + c.sigma_bar * bl * dw;
    b.black[i] = bn > 0.0 ? bn : 0.0;

    const double dz = c.sqrt_dt * (c.rho * g_w[i] + c.rho_perp * g_perp[i]);
    if (c.scheme == SigmaScheme::log_exact) {
      b.vol[i] = s * std::exp(c.nu * dz - half_nu2_dt);
    } else {
      const double sn = s + c.nu * s * dz;
      b.vol[i] = sn > 0.0 ? sn : 0.0;
    }
  }
}

PayoffSums payoff_sums(std::span<const double> fwd, std::span<const double> black,
                       double strike) {
  PayoffSums out;
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    const double ps = fwd[i] > strike ? fwd[i] - strike : 0.0;
    const double pb = black[i] > strike ? black[i] - strike : 0.0;
    const double d = ps - pb;
    out.diff += d;
    out.diff_sq += d * d;
    out.plain += ps;
    out.plain_sq += ps * ps;
  }
  return out;
}

}  // namespace scalar

const PathKernels& path_kernels(Isa isa) {
  static const PathKernels scalar_table{&scalar::step, &scalar::payoff_sums};
#if defined(SABRNET_HAVE_AVX2)
  static const PathKernels avx2_table{&avx2::step, &avx2::payoff_sums};
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return avx2_table;
#else
  (void)isa;
#endif
  return scalar_table;
}

}  // namespace sabrnet::simd
