#include "corrattack/simd/kernels.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace corrattack::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void project_clip_neon(const double* cand, const double* origin, double eps, double* out,
                       std::size_t n) {
    const float64x2_t veps = vdupq_n_f64(eps);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t o = vld1q_f64(origin + i);
        float64x2_t v = vmaxq_f64(vld1q_f64(cand + i), vsubq_f64(o, veps));
        v = vminq_f64(v, vaddq_f64(o, veps));
        v = vmaxq_f64(v, zero);
        vst1q_f64(out + i, vminq_f64(v, one));
    }
    for (; i < n; ++i) {
        double v = std::max(cand[i], origin[i] - eps);
        v = std::min(v, origin[i] + eps);
        v = std::max(v, 0.0);
        out[i] = std::min(v, 1.0);
    }
}

double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double r = vmaxvq_f64(m);
    for (; i < n; ++i) r = std::max(r, std::fabs(a[i] - b[i]));
    return r;
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{Isa::Neon, dot_neon, axpy_neon, project_clip_neon,
                                   max_abs_diff_neon};
    return table;
}

}  // namespace corrattack::simd
