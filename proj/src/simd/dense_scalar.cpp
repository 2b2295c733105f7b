#include <algorithm>

#include "sabrnet/simd/dense_kernels.hpp"

namespace sabrnet::simd {

namespace scalar {

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (!accumulate) std::fill(crow, crow + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    const double* arow = a + r * m;
    const double* brow = b + r * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace scalar

const DenseKernels& dense_kernels(Isa isa) {
  static const DenseKernels scalar_table{&scalar::gemm_nt, &scalar::gemm_nn, &scalar::gemm_tn};
#if defined(SABRNET_HAVE_AVX2)
  static const DenseKernels avx2_table{&avx2::gemm_nt, &avx2::gemm_nn, &avx2::gemm_tn};
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return avx2_table;
#else
  (void)isa;
#endif
  return scalar_table;
}

}  // namespace sabrnet::simd
