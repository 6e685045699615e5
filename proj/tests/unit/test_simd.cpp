#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "corrattack/simd/kernels.hpp"

using namespace corrattack::simd;

namespace {

std::vector<const KernelTable*> wide_tables() {
    std::vector<const KernelTable*> out;
    if (const auto* t = avx2_kernels()) out.push_back(t);
    if (const auto* t = neon_kernels()) out.push_back(t);
    return out;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& e : v) e = u(rng);
    return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("active table is one of the compiled ones") {
    const KernelTable& a = active();
    const bool known = &a == &scalar_kernels() || &a == avx2_kernels() || &a == neon_kernels();
    CHECK(known);
    MESSAGE("active kernels: " << isa_name(a.isa));
}

TEST_CASE("wide kernels match the scalar reference") {
    const KernelTable& ref = scalar_kernels();
    std::mt19937_64 rng(11);
    for (const KernelTable* t : wide_tables()) {
        CAPTURE(isa_name(t->isa));
        for (std::size_t n = 0; n <= 67; ++n) {
            CAPTURE(n);
            const auto a = random_vec(n, rng, -1.0, 1.0);
            const auto b = random_vec(n, rng, -1.0, 1.0);

            double mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
            CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
                  1e-14 * (mag + 1.0));

            auto y1 = b, y2 = b;
            t->axpy(0.37, a.data(), y1.data(), n);
            ref.axpy(0.37, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

            const auto cand = random_vec(n, rng, -0.5, 1.5);
            const auto origin = random_vec(n, rng, 0.0, 1.0);
            std::vector<double> p1(n), p2(n);
            t->project_clip(cand.data(), origin.data(), 0.05, p1.data(), n);
            ref.project_clip(cand.data(), origin.data(), 0.05, p2.data(), n);
            CHECK(p1 == p2);

            CHECK(t->max_abs_diff(a.data(), b.data(), n) == ref.max_abs_diff(a.data(), b.data(), n));
        }
    }
}

TEST_CASE("scalar reference values") {
    const KernelTable& ref = scalar_kernels();
    const double a[] = {1, 2, 3};
    const double b[] = {4, -5, 6};
    CHECK(ref.dot(a, b, 3) == 12.0);
    CHECK(ref.max_abs_diff(a, b, 3) == 7.0);
    CHECK(ref.max_abs_diff(a, b, 0) == 0.0);
    double y[] = {1, 1, 1};
    ref.axpy(2.0, a, y, 3);
    CHECK(y[2] == 7.0);
}

}
