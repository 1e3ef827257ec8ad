#pragma once

// Portable seeded randomness. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; seeds for independent streams are derived
// with the SplitMix64 finalizer. Variates are built from raw engine words here
// rather than with <random> distributions, whose algorithms vary by library.

#include <cstdint>
#include <random>
#include <vector>

#include "friendsim/linalg.hpp"

namespace friendsim {

inline constexpr std::uint64_t kDefaultSeed = 0xF2F2;

/// SplitMix64 output function applied to x + golden-ratio increment.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream (a, b) under a base seed; distinct (a, b) give independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t bits() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();
    cplx complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

private:
    std::mt19937_64 engine_;
};

/// Haar-random pure state of dimension n (normalized complex Gaussian vector).
std::vector<cplx> haar_state(std::size_t n, Rng& rng);

/// Haar-random n x n unitary (QR of a complex Ginibre matrix with phase fix).
CMatrix haar_unitary(std::size_t n, Rng& rng);

}  // namespace friendsim
