#include "psep/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <cmath>
#include <immintrin.h>

namespace psep::kern {

namespace {

__attribute__((target("avx2"))) void stencil3_avx2(const double* lo, const double* di, const double* up,
                                                   const double* x, double* y, std::size_t n)
{
    if (n < 3) return;
    std::size_t i = 1;
    const std::size_t end = n - 1;
    for (; i + 4 <= end; i += 4) {
        __m256d a = _mm256_mul_pd(_mm256_loadu_pd(lo + i), _mm256_loadu_pd(x + i - 1));
        __m256d b = _mm256_mul_pd(_mm256_loadu_pd(di + i), _mm256_loadu_pd(x + i));
        __m256d c = _mm256_mul_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(x + i + 1));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_add_pd(a, b), c));
    }
    for (; i < end; ++i) {
        double a = lo[i] * x[i - 1];
        double b = di[i] * x[i];
        double c = up[i] * x[i + 1];
        y[i] = (a + b) + c;
    }
}

__attribute__((target("avx2"))) double weighted_absmax_avx2(const double* w, const double* x, std::size_t n)
{
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
        // NaN lanes compare false and are dropped, as in the scalar loop
        __m256d gt = _mm256_cmp_pd(v, acc, _CMP_GT_OQ);
        acc = _mm256_blendv_pd(acc, v, gt);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = 0.0;
    for (double l : lanes)
        if (l > m) m = l;
    for (; i < n; ++i) {
        double v = w[i] * std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

__attribute__((target("avx2"))) double dot_avx2(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

const KernelTable kAvx2{Isa::Avx2, stencil3_avx2, weighted_absmax_avx2, dot_avx2};

}  // namespace

const KernelTable* avx2_table()
{
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &kAvx2 : nullptr;
}

}  // namespace psep::kern

#else

namespace psep::kern {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace psep::kern

#endif
