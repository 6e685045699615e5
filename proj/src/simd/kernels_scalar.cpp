#include "corrattack/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace corrattack::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void project_clip_scalar(const double* cand, const double* origin, double eps, double* out,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::max(cand[i], origin[i] - eps);
        v = std::min(v, origin[i] + eps);
        v = std::max(v, 0.0);
        out[i] = std::min(v, 1.0);
    }
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::Scalar, dot_scalar, axpy_scalar, project_clip_scalar,
                                   max_abs_diff_scalar};
    return table;
}

}  // namespace corrattack::simd
