#include <doctest.h>

#include <cmath>
#include <vector>

#include "friendsim/random.hpp"
#include "friendsim/simd/kernels.hpp"

using friendsim::cplx;
namespace simd = friendsim::simd;

namespace {

std::vector<cplx> draw(std::size_t n, friendsim::Rng& rng) {
    std::vector<cplx> v(n);
    for (auto& x : v) {
        x = rng.complex_normal();
    }
    return v;
}

}  // namespace

TEST_CASE("scalar reference on hand-checked inputs") {
    const auto& k = simd::scalar_kernels();
    const std::vector<cplx> a{{1, 2}, {3, -1}};
    const std::vector<cplx> b{{0, 1}, {2, 2}};
    CHECK(k.norm_sq(a) == doctest::Approx(15.0));
    // conj(1+2i) i + conj(3-i)(2+2i) = (2+i) + (4+8i)
    const cplx d = k.cdot(a, b);
    CHECK(d.real() == doctest::Approx(6.0));
    CHECK(d.imag() == doctest::Approx(9.0));
    std::vector<cplx> y = b;
    k.caxpy(cplx{0, 1}, a, y);
    CHECK(y[0] == cplx{-2, 2});
    CHECK(y[1] == cplx{3, 5});
    CHECK(k.max_abs_diff(a, b) == doctest::Approx(std::sqrt(10.0)));
    CHECK(k.max_abs_diff({}, {}) == 0.0);
}

TEST_CASE("vectorized kernels match the scalar reference") {
    const simd::KernelTable* fast = simd::avx2_kernels();
    if (fast == nullptr) {
        MESSAGE("AVX2+FMA unavailable; only the scalar table is exercised");
        return;
    }
    const auto& ref = simd::scalar_kernels();
    friendsim::Rng rng(17);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 257u, 1000u}) {
        CAPTURE(n);
        const auto a = draw(n, rng);
        const auto b = draw(n, rng);
        const double scale = static_cast<double>(n) + 1.0;

        CHECK(std::abs(fast->norm_sq(a) - ref.norm_sq(a)) <= 1e-13 * scale);
        CHECK(std::abs(fast->cdot(a, b) - ref.cdot(a, b)) <= 1e-13 * scale);
        CHECK(fast->max_abs_diff(a, b) == doctest::Approx(ref.max_abs_diff(a, b)).epsilon(1e-15));

        std::vector<cplx> y1 = b;
        std::vector<cplx> y2 = b;
        const cplx alpha{0.3, -1.7};
        fast->caxpy(alpha, a, y1);
        ref.caxpy(alpha, a, y2);
        CHECK(ref.max_abs_diff(y1, y2) <= 1e-15 * 4.0);
    }
}

TEST_CASE("isa selection") {
    const simd::Isa start = simd::active_kernels().isa;
    REQUIRE(simd::select_isa(simd::Isa::Scalar));
    CHECK(simd::active_kernels().isa == simd::Isa::Scalar);
    CHECK(simd::select_isa(simd::Isa::Avx2) == (simd::avx2_kernels() != nullptr));
    simd::select_isa(start);
    CHECK(simd::active_kernels().isa == start);
}
