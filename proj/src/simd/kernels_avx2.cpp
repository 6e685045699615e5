// Compiled with -mavx2 -mfma. Nothing here may be inlined into other TUs.

#include "corrattack/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace corrattack::simd {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    lo = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
    double acc = _mm_cvtsd_f64(lo);
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        // mul then add (no FMA) so results match the scalar loop bit for bit
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void project_clip_avx2(const double* cand, const double* origin, double eps, double* out,
                       std::size_t n) {
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d o = _mm256_loadu_pd(origin + i);
        __m256d v = _mm256_max_pd(_mm256_loadu_pd(cand + i), _mm256_sub_pd(o, veps));
        v = _mm256_min_pd(v, _mm256_add_pd(o, veps));
        v = _mm256_max_pd(v, zero);
        _mm256_storeu_pd(out + i, _mm256_min_pd(v, one));
    }
    for (; i < n; ++i) {
        double v = std::max(cand[i], origin[i] - eps);
        v = std::min(v, origin[i] + eps);
        v = std::max(v, 0.0);
        out[i] = std::min(v, 1.0);
    }
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) r = std::max(r, std::fabs(a[i] - b[i]));
    return r;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{Isa::Avx2, dot_avx2, axpy_avx2, project_clip_avx2,
                                   max_abs_diff_avx2};
    return table;
}

}  // namespace corrattack::simd
