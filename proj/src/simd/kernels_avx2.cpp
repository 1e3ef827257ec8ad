// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher has
// checked the CPU.

#include "friendsim/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace friendsim::simd {
namespace {

inline const double* as_doubles(std::span<const cplx> x) {
    return reinterpret_cast<const double*>(x.data());
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double norm_sq_avx2(std::span<const cplx> x) {
    const double* p = as_doubles(x);
    const std::size_t n = 2 * x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(p + i);
        const __m256d b = _mm256_loadu_pd(p + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(p + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += p[i] * p[i];
    }
    return acc;
}

cplx cdot_avx2(std::span<const cplx> a, std::span<const cplx> b) {
    const double* pa = as_doubles(a);
    const double* pb = as_doubles(b);
    const std::size_t n = a.size();
    // acc_re lanes: ar*br, ai*bi; acc_im lanes: ar*bi, ai*br
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d vb_sw = _mm256_permute_pd(vb, 0b0101);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        acc_im = _mm256_fmadd_pd(va, vb_sw, acc_im);
    }
    alignas(32) double im_lanes[4];
    _mm256_store_pd(im_lanes, acc_im);
    double re = hsum(acc_re);
    double im = (im_lanes[0] + im_lanes[2]) - (im_lanes[1] + im_lanes[3]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy_avx2(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    const double* px = as_doubles(x);
    double* py = reinterpret_cast<double*>(y.data());
    const std::size_t n = x.size();
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(px + 2 * i);
        const __m256d vy = _mm256_loadu_pd(py + 2 * i);
        const __m256d t = _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0b0101));
        const __m256d u = _mm256_fmadd_pd(ar, vx, vy);
        _mm256_storeu_pd(py + 2 * i, _mm256_addsub_pd(u, t));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real();
        const double xi = x[i].imag();
        y[i] = {y[i].real() + (alpha.real() * xr - alpha.imag() * xi),
                y[i].imag() + (alpha.real() * xi + alpha.imag() * xr)};
    }
}

double max_abs_diff_avx2(std::span<const cplx> a, std::span<const cplx> b) {
    const double* pa = as_doubles(a);
    const double* pb = as_doubles(b);
    const std::size_t n = a.size();
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
        const __m256d sq = _mm256_mul_pd(d, d);
        best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double m2 = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) {
        const double dr = a[i].real() - b[i].real();
        const double di = a[i].imag() - b[i].imag();
        m2 = std::max(m2, dr * dr + di * di);
    }
    return std::sqrt(m2);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{
        Isa::Avx2, "avx2", &norm_sq_avx2, &cdot_avx2, &caxpy_avx2, &max_abs_diff_avx2,
    };
    return table;
}

}  // namespace friendsim::simd
