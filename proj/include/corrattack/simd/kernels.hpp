#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the models, the projection and the PCA.
// Every kernel has a scalar reference implementation; wider variants are
// compiled in their own translation units and picked at runtime from what the
// CPU reports. Set CORRATTACK_SIMD=scalar to force the reference path.

namespace corrattack::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = clamp(clamp(cand[i], origin[i] - eps, origin[i] + eps), 0, 1)
    void (*project_clip)(const double* cand, const double* origin, double eps, double* out,
                         std::size_t n);
    // max_i |a[i] - b[i]|, 0 for n == 0
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled for this target or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Table selected once per process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace corrattack::simd
