#pragma once

// Complex inner-loop kernels with a scalar reference and vectorized variants.
// The active table is chosen once per process from the CPU's capabilities.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace friendsim::simd {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    std::string_view name;

    /// Sum of |x_i|^2.
    double (*norm_sq)(std::span<const cplx> x);

    /// Sum of conj(a_i) * b_i. Sizes must match.
    cplx (*cdot)(std::span<const cplx> a, std::span<const cplx> b);

    /// y += alpha * x. Sizes must match.
    void (*caxpy)(cplx alpha, std::span<const cplx> x, std::span<cplx> y);

    /// max_i |a_i - b_i| (complex modulus). Zero for empty input.
    double (*max_abs_diff)(std::span<const cplx> a, std::span<const cplx> b);
};

const KernelTable& scalar_kernels();

/// Null when the binary was built without AVX2 support or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// The table used by the library. Honors FRIENDSIM_ISA=scalar in the environment.
const KernelTable& active_kernels();

/// Overrides the active table (tests and benchmarking). Returns false if unavailable.
bool select_isa(Isa isa);

bool cpu_supports_avx2_fma();

}  // namespace friendsim::simd
