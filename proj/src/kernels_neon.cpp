#include "psep/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>
#include <cmath>

namespace psep::kern {

namespace {

void stencil3_neon(const double* lo, const double* di, const double* up, const double* x, double* y,
                   std::size_t n)
{
    if (n < 3) return;
    std::size_t i = 1;
    const std::size_t end = n - 1;
    for (; i + 2 <= end; i += 2) {
        float64x2_t a = vmulq_f64(vld1q_f64(lo + i), vld1q_f64(x + i - 1));
        float64x2_t b = vmulq_f64(vld1q_f64(di + i), vld1q_f64(x + i));
        float64x2_t c = vmulq_f64(vld1q_f64(up + i), vld1q_f64(x + i + 1));
        vst1q_f64(y + i, vaddq_f64(vaddq_f64(a, b), c));
    }
    for (; i < end; ++i) {
        double a = lo[i] * x[i - 1];
        double b = di[i] * x[i];
        double c = up[i] * x[i + 1];
        y[i] = (a + b) + c;
    }
}

double weighted_absmax_neon(const double* w, const double* x, std::size_t n)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vmulq_f64(vld1q_f64(w + i), vabsq_f64(vld1q_f64(x + i)));
        uint64x2_t gt = vcgtq_f64(v, acc);
        acc = vbslq_f64(gt, v, acc);
    }
    double m = 0.0;
    double l0 = vgetq_lane_f64(acc, 0), l1 = vgetq_lane_f64(acc, 1);
    if (l0 > m) m = l0;
    if (l1 > m) m = l1;
    for (; i < n; ++i) {
        double v = w[i] * std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

double dot_neon(const double* a, const double* b, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    float64x2_t acc = vaddq_f64(acc0, acc1);
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

const KernelTable kNeon{Isa::Neon, stencil3_neon, weighted_absmax_neon, dot_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace psep::kern

#else

namespace psep::kern {
const KernelTable* neon_table() { return nullptr; }
}  // namespace psep::kern

#endif
