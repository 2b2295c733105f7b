#pragma once

// Double-precision exp/log for AVX2 lanes (Cephes rational approximations).
// Only included from translation units compiled with -mavx2 -mfma.

#include <immintrin.h>

#include <cfloat>
#include <cstdint>

namespace sabrnet::simd::avx2::detail {

inline __m256d polevl2(__m256d x, double c0, double c1, double c2) {
  __m256d y = _mm256_set1_pd(c0);
  y = _mm256_add_pd(_mm256_mul_pd(y, x), _mm256_set1_pd(c1));
  return _mm256_add_pd(_mm256_mul_pd(y, x), _mm256_set1_pd(c2));
}

inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  xc = _mm256_sub_pd(xc, _mm256_mul_pd(n, _mm256_set1_pd(6.93145751953125E-1)));
  xc = _mm256_sub_pd(xc, _mm256_mul_pd(n, _mm256_set1_pd(1.42860682030941723212E-6)));

  const __m256d xx = _mm256_mul_pd(xc, xc);
  const __m256d px = _mm256_mul_pd(
      xc, polevl2(xx, 1.26177193074810590878E-4, 3.02994407707441961300E-2,
                  9.99999999999999999910E-1));
  __m256d qx = _mm256_set1_pd(3.00198505138664455042E-6);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, xx), _mm256_set1_pd(2.52448340349684104192E-3));
  qx = _mm256_add_pd(_mm256_mul_pd(qx, xx), _mm256_set1_pd(2.27265548208155028766E-1));
  qx = _mm256_add_pd(_mm256_mul_pd(qx, xx), _mm256_set1_pd(2.00000000000000000009E0));
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(r, r));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
  return _mm256_blendv_pd(r, _mm256_setzero_pd(), underflow);
}

// Natural log for strictly positive finite lanes (subnormals included).
inline __m256d log_pd(__m256d x) {
  const __m256d subnormal = _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MIN), _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(4503599627370496.0)), subnormal);
  const __m256d e_adj = _mm256_and_pd(subnormal, _mm256_set1_pd(-52.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits =
      _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
  // gather the low 32 bits of each 64-bit lane
  const __m256i packed =
      _mm256_permutevar8x32_epi32(exp_bits, _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6));
  __m256d e = _mm256_cvtepi32_pd(_mm256_castsi256_si128(packed));
  e = _mm256_add_pd(_mm256_sub_pd(e, _mm256_set1_pd(1022.0)), e_adj);

  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
      _mm256_set1_epi64x(0x3fe0000000000000LL)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), below);
  const __m256d t = _mm256_sub_pd(m, one);

  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_add_pd(_mm256_mul_pd(p, t), _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_add_pd(_mm256_mul_pd(p, t), _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_add_pd(_mm256_mul_pd(p, t), _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_add_pd(_mm256_mul_pd(p, t), _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_add_pd(_mm256_mul_pd(p, t), _mm256_set1_pd(7.70838733755885391666E0));

  __m256d q = _mm256_add_pd(t, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_add_pd(_mm256_mul_pd(q, t), _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_add_pd(_mm256_mul_pd(q, t), _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_add_pd(_mm256_mul_pd(q, t), _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_add_pd(_mm256_mul_pd(q, t), _mm256_set1_pd(2.31251620126765340583E1));

  const __m256d z = _mm256_mul_pd(t, t);
  __m256d y = _mm256_mul_pd(t, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_sub_pd(y, _mm256_mul_pd(e, _mm256_set1_pd(2.121944400546905827679e-4)));
  y = _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(0.5), z));
  __m256d out = _mm256_add_pd(t, y);
  return _mm256_add_pd(out, _mm256_mul_pd(e, _mm256_set1_pd(0.693359375)));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace sabrnet::simd::avx2::detail
