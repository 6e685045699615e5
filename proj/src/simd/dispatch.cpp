#include "corrattack/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace corrattack::simd {

#if defined(CORRATTACK_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif
#if defined(CORRATTACK_HAVE_NEON_TU)
const KernelTable& neon_table();
#endif

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(CORRATTACK_HAVE_AVX2_TU)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(CORRATTACK_HAVE_NEON_TU)
    // Advanced SIMD is mandatory on AArch64.
    return &neon_table();
#else
    return nullptr;
#endif
}

namespace {

const KernelTable& select() {
    const char* forced = std::getenv("CORRATTACK_SIMD");
    const std::string choice = forced ? forced : "auto";
    if (choice == "scalar") return scalar_kernels();
    if (choice == "avx2" || choice == "auto") {
        if (const KernelTable* t = avx2_kernels()) return *t;
    }
    if (choice == "neon" || choice == "auto") {
        if (const KernelTable* t = neon_kernels()) return *t;
    }
    return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace corrattack::simd
