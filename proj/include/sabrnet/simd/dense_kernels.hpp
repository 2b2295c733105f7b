#pragma once

#include <cstddef>

#include "sabrnet/simd/isa.hpp"

namespace sabrnet::simd {

// Row-major dense products used by the network. Every variant accumulates in
// a fixed order for a given (m, n, k), so results do not depend on threading.
//
//   gemm_nt: C[m x n]  = A[m x k] * B[n x k]^T   (+= when accumulate)
//   gemm_nn: C[m x n]  = A[m x k] * B[k x n]
//   gemm_tn: C[m x n]  = A[k x m]^T * B[k x n]
using GemmFn = void (*)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                        const double* b, double* c, bool accumulate);

struct DenseKernels {
  GemmFn gemm_nt;
  GemmFn gemm_nn;
  GemmFn gemm_tn;
};

namespace scalar {
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
}  // namespace scalar

#if defined(SABRNET_HAVE_AVX2)
namespace avx2 {
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
}  // namespace avx2
#endif

const DenseKernels& dense_kernels(Isa isa);
inline const DenseKernels& dense_kernels() { return dense_kernels(active_isa()); }

}  // namespace sabrnet::simd
