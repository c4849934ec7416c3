#pragma once

#include <cassert>
#include <cstddef>
#include <type_traits>

namespace bunow::nn {

// Worker threads used by gemm and the batched layer kernels. Default 1;
// results are bit-identical for any setting because parallel work is
// partitioned over disjoint output tiles with a fixed per-element
// accumulation order.
void set_threads(int n);
int threads();

// C (m x n, row-major, leading dim ldc) = op(A) * op(B) + beta * C,
// beta in {0, 1}. op(X) = X or X^T per the trans flags; lda/ldb are the
// leading dimensions of the stored matrices.
void gemm_f32(bool trans_a, bool trans_b, int m, int n, int k,
              const float* a, int lda, const float* b, int ldb,
              float beta, float* c, int ldc);

// Reference path for non-float element types (gradient checks run the
// same layer code on double).
template <typename T>
void gemm_generic(bool trans_a, bool trans_b, int m, int n, int k,
                  const T* a, int lda, const T* b, int ldb,
                  T beta, T* c, int ldc) {
    assert(beta == T{0} || beta == T{1});
    const auto at = [&](int i, int p) -> T { return trans_a ? a[static_cast<size_t>(p) * lda + i]
                                                            : a[static_cast<size_t>(i) * lda + p]; };
    const auto bt = [&](int p, int j) -> T { return trans_b ? b[static_cast<size_t>(j) * ldb + p]
                                                            : b[static_cast<size_t>(p) * ldb + j]; };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            T acc = (beta == T{0}) ? T{0} : c[static_cast<size_t>(i) * ldc + j];
            for (int p = 0; p < k; ++p) acc += at(i, p) * bt(p, j);
            c[static_cast<size_t>(i) * ldc + j] = acc;
        }
    }
}

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k,
          const T* a, int lda, const T* b, int ldb,
          T beta, T* c, int ldc) {
    if constexpr (std::is_same_v<T, float>) {
        gemm_f32(trans_a, trans_b, m, n, k, a, lda, b, ldb, beta, c, ldc);
    } else {
        gemm_generic(trans_a, trans_b, m, n, k, a, lda, b, ldb, beta, c, ldc);
    }
}

}  // namespace bunow::nn
