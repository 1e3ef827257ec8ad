#include "friendsim/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace friendsim::simd {
namespace {

double norm_sq_scalar(std::span<const cplx> x) {
    double acc = 0.0;
    for (const cplx& z : x) {
        acc += z.real() * z.real() + z.imag() * z.imag();
    }
    return acc;
}

cplx cdot_scalar(std::span<const cplx> a, std::span<const cplx> b) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy_scalar(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    const double ar = alpha.real();
    const double ai = alpha.imag();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xr = x[i].real();
        const double xi = x[i].imag();
        y[i] = {y[i].real() + (ar * xr - ai * xi), y[i].imag() + (ar * xi + ai * xr)};
    }
}

double max_abs_diff_scalar(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dr = a[i].real() - b[i].real();
        const double di = a[i].imag() - b[i].imag();
        m = std::max(m, std::sqrt(dr * dr + di * di));
    }
    return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        Isa::Scalar, "scalar", &norm_sq_scalar, &cdot_scalar, &caxpy_scalar, &max_abs_diff_scalar,
    };
    return table;
}

}  // namespace friendsim::simd
