#include "friendsim/random.hpp"

#include <cmath>
#include <numbers>

#include "friendsim/simd/kernels.hpp"

namespace friendsim {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

double Rng::normal() {
    // 1 - u keeps the logarithm argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<cplx> haar_state(std::size_t n, Rng& rng) {
    std::vector<cplx> v(n);
    for (cplx& z : v) {
        z = rng.complex_normal();
    }
    const double norm = std::sqrt(simd::active_kernels().norm_sq(v));
    for (cplx& z : v) {
        z /= norm;
    }
    return v;
}

CMatrix haar_unitary(std::size_t n, Rng& rng) {
    // Modified Gram-Schmidt on the columns of a Ginibre matrix. Normalizing each
    // column to a positive diagonal of R is the Mezzadri phase fix.
    const auto& k = simd::active_kernels();
    std::vector<std::vector<cplx>> cols(n, std::vector<cplx>(n));
    for (auto& c : cols) {
        for (cplx& z : c) {
            z = rng.complex_normal();
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const cplx proj = k.cdot(cols[i], cols[j]);
            k.caxpy(-proj, cols[i], cols[j]);
        }
        const double norm = std::sqrt(k.norm_sq(cols[j]));
        for (cplx& z : cols[j]) {
            z /= norm;
        }
    }
    CMatrix u(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            u(i, j) = cols[j][i];
        }
    }
    return u;
}

}  // namespace friendsim
