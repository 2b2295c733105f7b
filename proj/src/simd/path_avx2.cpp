#include <immintrin.h>

#include "sabrnet/simd/path_kernels.hpp"
#include "vecmath_avx2.hpp"

namespace sabrnet::simd::avx2 {

using namespace detail;

void step(const StepCoefficients& c, PathBlock b, std::span<const double> g_w,
          std::span<const double> g_perp) {
  const std::size_t n = b.fwd.size();
  const std::size_t vec_end = n - n % 4;

  const __m256d zero = _mm256_setzero_pd();
  const __m256d sqrt_dt = _mm256_set1_pd(c.sqrt_dt);
  const __m256d beta = _mm256_set1_pd(c.beta);
  const __m256d nu = _mm256_set1_pd(c.nu);
  const __m256d rho = _mm256_set1_pd(c.rho);
  const __m256d rho_perp = _mm256_set1_pd(c.rho_perp);
  const __m256d sigma_bar = _mm256_set1_pd(c.sigma_bar);
  const __m256d half_nu2_dt = _mm256_set1_pd(0.5 * c.nu * c.nu * c.dt);
  const bool beta_one = c.beta == 1.0;
  const bool beta_zero = c.beta == 0.0;
  const bool log_exact = c.scheme == SigmaScheme::log_exact;

  for (std::size_t i = 0; i < vec_end; i += 4) {
    const __m256d f = _mm256_loadu_pd(&b.fwd[i]);
    const __m256d s = _mm256_loadu_pd(&b.vol[i]);
    const __m256d gw = _mm256_loadu_pd(&g_w[i]);
    const __m256d dw = _mm256_mul_pd(sqrt_dt, gw);

    const __m256d alive = _mm256_cmp_pd(f, zero, _CMP_GT_OQ);
    const __m256d fpos = _mm256_and_pd(alive, f);
    __m256d fpow;
    if (beta_one) {
      fpow = fpos;
    } else if (beta_zero) {
      fpow = _mm256_set1_pd(1.0);
    } else {
      // log of dead lanes is never used; feed them 1.0 to stay finite
      const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), fpos, alive);
      fpow = _mm256_and_pd(alive, exp_pd(_mm256_mul_pd(beta, log_pd(safe))));
    }
    const __m256d fn = _mm256_add_pd(f, _mm256_mul_pd(_mm256_mul_pd(s, fpow), dw));
    const __m256d keep = _mm256_and_pd(alive, _mm256_cmp_pd(fn, zero, _CMP_GT_OQ));
    _mm256_storeu_pd(&b.fwd[i], _mm256_and_pd(keep, fn));

    const __m256d bl = _mm256_loadu_pd(&b.black[i]);
    const __m256d bn = _mm256_add_pd(bl, _mm256_mul_pd(_mm256_mul_pd(sigma_bar, bl), dw));
    _mm256_storeu_pd(&b.black[i], _mm256_and_pd(_mm256_cmp_pd(bn, zero, _CMP_GT_OQ), bn));

    const __m256d gp = _mm256_loadu_pd(&g_perp[i]);
    const __m256d dz = _mm256_mul_pd(
        sqrt_dt, _mm256_add_pd(_mm256_mul_pd(rho, gw), _mm256_mul_pd(rho_perp, gp)));
    if (log_exact) {
      const __m256d arg = _mm256_sub_pd(_mm256_mul_pd(nu, dz), half_nu2_dt);
      _mm256_storeu_pd(&b.vol[i], _mm256_mul_pd(s, exp_pd(arg)));
    } else {
      const __m256d sn = _mm256_add_pd(s, _mm256_mul_pd(_mm256_mul_pd(nu, s), dz));
      _mm256_storeu_pd(&b.vol[i], _mm256_and_pd(_mm256_cmp_pd(sn, zero, _CMP_GT_OQ), sn));
    }
  }

  if (vec_end < n) {
    const std::size_t tail = n - vec_end;
    scalar::step(c,
                 PathBlock{b.fwd.subspan(vec_end, tail), b.vol.subspan(vec_end, tail),
                           b.black.subspan(vec_end, tail)},
                 g_w.subspan(vec_end, tail), g_perp.subspan(vec_end, tail));
  }
}

PayoffSums payoff_sums(std::span<const double> fwd, std::span<const double> black,
                       double strike) {
  const std::size_t n = fwd.size();
  const std::size_t vec_end = n - n % 4;
  const __m256d k = _mm256_set1_pd(strike);
  const __m256d zero = _mm256_setzero_pd();
  __m256d diff = zero, diff_sq = zero, plain = zero, plain_sq = zero;
  for (std::size_t i = 0; i < vec_end; i += 4) {
    const __m256d ps = _mm256_max_pd(_mm256_sub_pd(_mm256_loadu_pd(&fwd[i]), k), zero);
    const __m256d pb = _mm256_max_pd(_mm256_sub_pd(_mm256_loadu_pd(&black[i]), k), zero);
    const __m256d d = _mm256_sub_pd(ps, pb);
    diff = _mm256_add_pd(diff, d);
    diff_sq = _mm256_add_pd(diff_sq, _mm256_mul_pd(d, d));
    plain = _mm256_add_pd(plain, ps);
    plain_sq = _mm256_add_pd(plain_sq, _mm256_mul_pd(ps, ps));
  }
  PayoffSums out{hsum(diff), hsum(diff_sq), hsum(plain), hsum(plain_sq)};
  if (vec_end < n) {
    const PayoffSums rest = scalar::payoff_sums(fwd.subspan(vec_end), black.subspan(vec_end), strike);
    out.diff += rest.diff;
    out.diff_sq += rest.diff_sq;
    out.plain += rest.plain;
    out.plain_sq += rest.plain_sq;
  }
  return out;
}

}  // namespace sabrnet::simd::avx2
