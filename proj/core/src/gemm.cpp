#include "bunow/gemm.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <vector>

#if defined(__AVX512F__)
#include <immintrin.h>
#define BUNOW_KERNEL_AVX512 1
#elif defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define BUNOW_KERNEL_AVX2 1
#endif

namespace bunow::nn {

namespace {

std::atomic<int> g_threads{1};

#if defined(BUNOW_KERNEL_AVX512)
constexpr int MR = 12;
constexpr int NR = 32;
#elif defined(BUNOW_KERNEL_AVX2)
constexpr int MR = 6;
constexpr int NR = 16;
#else
constexpr int MR = 4;
constexpr int NR = 8;
#endif

constexpr int KC = 256;
constexpr int MC = 16 * MR;
constexpr int NC = 32 * NR;

// Packs an mc x kc block of op(A) into MR-row panels, column-major within
// the panel (all MR row values for one k are adjacent). Short panels are
// zero padded so the microkernel never branches on m.
void pack_a(bool trans_a, const float* a, int lda, int i0, int p0, int mc, int kc,
            float* dst) {
    for (int i = 0; i < mc; i += MR) {
        const int mr = std::min(MR, mc - i);
        for (int p = 0; p < kc; ++p) {
            for (int r = 0; r < MR; ++r) {
                float v = 0.0f;
                if (r < mr) {
                    const int row = i0 + i + r;
                    const int col = p0 + p;
                    v = trans_a ? a[static_cast<size_t>(col) * lda + row]
                                : a[static_cast<size_t>(row) * lda + col];
                }
                *dst++ = v;
            }
        }
    }
}

// Packs a kc x nc block of op(B) into NR-column panels, row-major within
// the panel. Short panels are zero padded.
void pack_b(bool trans_b, const float* b, int ldb, int p0, int j0, int kc, int nc,
            float* dst) {
    for (int j = 0; j < nc; j += NR) {
        const int nr = std::min(NR, nc - j);
        for (int p = 0; p < kc; ++p) {
            for (int s = 0; s < NR; ++s) {
                float v = 0.0f;
                if (s < nr) {
                    const int row = p0 + p;
                    const int col = j0 + j + s;
                    v = trans_b ? b[static_cast<size_t>(col) * ldb + row]
                                : b[static_cast<size_t>(row) * ldb + col];
                }
                *dst++ = v;
            }
        }
    }
}

#if defined(BUNOW_KERNEL_AVX512)

// MR x NR = 12 x 32 register tile: 24 accumulators + 2 B vectors.
void microkernel(int kc, const float* ap, const float* bp, float* out, int ldo) {
    __m512 acc0[MR], acc1[MR];
    for (int i = 0; i < MR; ++i) {
        acc0[i] = _mm512_setzero_ps();
        acc1[i] = _mm512_setzero_ps();
    }
    for (int p = 0; p < kc; ++p) {
        const __m512 b0 = _mm512_loadu_ps(bp + p * NR);
        const __m512 b1 = _mm512_loadu_ps(bp + p * NR + 16);
        const float* arow = ap + p * MR;
        for (int i = 0; i < MR; ++i) {
            const __m512 av = _mm512_set1_ps(arow[i]);
            acc0[i] = _mm512_fmadd_ps(av, b0, acc0[i]);
            acc1[i] = _mm512_fmadd_ps(av, b1, acc1[i]);
        }
    }
    for (int i = 0; i < MR; ++i) {
        _mm512_storeu_ps(out + static_cast<size_t>(i) * ldo, acc0[i]);
        _mm512_storeu_ps(out + static_cast<size_t>(i) * ldo + 16, acc1[i]);
    }
}

#elif defined(BUNOW_KERNEL_AVX2)

// MR x NR = 6 x 16 register tile: 12 accumulators + 2 B vectors.
void microkernel(int kc, const float* ap, const float* bp, float* out, int ldo) {
    __m256 acc0[MR], acc1[MR];
    for (int i = 0; i < MR; ++i) {
        acc0[i] = _mm256_setzero_ps();
        acc1[i] = _mm256_setzero_ps();
    }
    for (int p = 0; p < kc; ++p) {
        const __m256 b0 = _mm256_loadu_ps(bp + p * NR);
        const __m256 b1 = _mm256_loadu_ps(bp + p * NR + 8);
        const float* arow = ap + p * MR;
        for (int i = 0; i < MR; ++i) {
            const __m256 av = _mm256_broadcast_ss(arow + i);
            acc0[i] = _mm256_fmadd_ps(av, b0, acc0[i]);
            acc1[i] = _mm256_fmadd_ps(av, b1, acc1[i]);
        }
    }
    for (int i = 0; i < MR; ++i) {
        _mm256_storeu_ps(out + static_cast<size_t>(i) * ldo, acc0[i]);
        _mm256_storeu_ps(out + static_cast<size_t>(i) * ldo + 8, acc1[i]);
    }
}

#else

void microkernel(int kc, const float* ap, const float* bp, float* out, int ldo) {
    float acc[MR][NR] = {};
    for (int p = 0; p < kc; ++p) {
        const float* brow = bp + p * NR;
        const float* arow = ap + p * MR;
        for (int i = 0; i < MR; ++i) {
            const float av = arow[i];
            for (int j = 0; j < NR; ++j) acc[i][j] += av * brow[j];
        }
    }
    for (int i = 0; i < MR; ++i) {
        for (int j = 0; j < NR; ++j) out[static_cast<size_t>(i) * ldo + j] = acc[i][j];
    }
}

#endif

struct Scratch {
    std::vector<float> a_pack;
    std::vector<float> b_pack;
    std::vector<float> tile;
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

// Writes one packed A panel times the packed B block into C. first_k
// selects overwrite vs accumulate semantics for the K-block loop.
void run_tile(const float* ap, const float* bp, int kc, int mr, int nr_total,
              bool accumulate, float* c, int ldc, float* tile_buf) {
    for (int j = 0; j < nr_total; j += NR) {
        const int nr = std::min(NR, nr_total - j);
        const float* bpanel = bp + static_cast<size_t>(j / NR) * (static_cast<size_t>(kc) * NR);
        if (mr == MR && nr == NR) {
            if (accumulate) {
                microkernel(kc, ap, bpanel, tile_buf, NR);
                for (int i = 0; i < MR; ++i) {
                    float* crow = c + static_cast<size_t>(i) * ldc + j;
                    const float* trow = tile_buf + static_cast<size_t>(i) * NR;
                    for (int s = 0; s < NR; ++s) crow[s] += trow[s];
                }
            } else {
                microkernel(kc, ap, bpanel, c + j, ldc);
            }
        } else {
            microkernel(kc, ap, bpanel, tile_buf, NR);
            for (int i = 0; i < mr; ++i) {
                float* crow = c + static_cast<size_t>(i) * ldc + j;
                const float* trow = tile_buf + static_cast<size_t>(i) * NR;
                if (accumulate) {
                    for (int s = 0; s < nr; ++s) crow[s] += trow[s];
                } else {
                    for (int s = 0; s < nr; ++s) crow[s] = trow[s];
                }
            }
        }
    }
}

}  // namespace

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

int threads() { return g_threads.load(); }

void gemm_f32(bool trans_a, bool trans_b, int m, int n, int k,
              const float* a, int lda, const float* b, int ldb,
              float beta, float* c, int ldc) {
    assert(beta == 0.0f || beta == 1.0f);
    if (m <= 0 || n <= 0) return;
    if (k <= 0) {
        if (beta == 0.0f) {
            for (int i = 0; i < m; ++i) {
                std::memset(c + static_cast<size_t>(i) * ldc, 0, sizeof(float) * n);
            }
        }
        return;
    }

    Scratch& s = scratch();
    s.a_pack.resize(static_cast<size_t>(MC + MR) * KC);
    s.b_pack.resize(static_cast<size_t>(NC + NR) * KC);

    const int nt = threads();

    for (int pc = 0; pc < k; pc += KC) {
        const int kc = std::min(KC, k - pc);
        // After the first K block every tile accumulates; the first block
        // honors beta.
        const bool accumulate_block = (pc > 0) || (beta == 1.0f);
        for (int jc = 0; jc < n; jc += NC) {
            const int nc = std::min(NC, n - jc);
            pack_b(trans_b, b, ldb, pc, jc, kc, nc, s.b_pack.data());
            for (int ic = 0; ic < m; ic += MC) {
                const int mc = std::min(MC, m - ic);
                pack_a(trans_a, a, lda, ic, pc, mc, kc, s.a_pack.data());

                const int num_mr = (mc + MR - 1) / MR;
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && num_mr > 1)
#endif
                for (int ir = 0; ir < num_mr; ++ir) {
                    thread_local std::vector<float> tile_buf(MR * NR);
                    const int i = ir * MR;
                    const int mr = std::min(MR, mc - i);
                    const float* ap =
                        s.a_pack.data() + static_cast<size_t>(ir) * (static_cast<size_t>(kc) * MR);
                    float* cblock = c + static_cast<size_t>(ic + i) * ldc + jc;
                    run_tile(ap, s.b_pack.data(), kc, mr, nc, accumulate_block, cblock, ldc,
                             tile_buf.data());
                }
            }
        }
    }
}

}  // namespace bunow::nn
