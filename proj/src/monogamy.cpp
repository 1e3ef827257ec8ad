#include "friendsim/monogamy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

namespace friendsim {

namespace {

// Spectra are taken square roots of, so roundoff of order 1e-16 would surface as
// 1e-8 in the concurrence. Eigenvalues below this are treated as exact zeros.
constexpr double kRootFloor = 1e-13;

CMatrix floored_sqrt(const CMatrix& m) {
    const HermitianEigen eig = hermitian_eigen(m);
    const std::size_t n = m.rows();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] <= kRootFloor) {
            continue;
        }
        const double s = std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = eig.vectors(i, k) * s;
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += vi * std::conj(eig.vectors(j, k));
            }
        }
    }
    return out;
}

}  // namespace

double concurrence_purity(const DensityMatrix& rho) {
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - purity(rho))));
}

double concurrence_wootters(const DensityMatrix& rho) {
    if (rho.dims() != Dims{2, 2}) {
        throw Error("Wootters concurrence needs a two-qubit state with dims (2, 2)");
    }
    // sy ⊗ sy in the computational basis.
    const CMatrix yy{{0, 0, 0, -1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}};
    const CMatrix flipped = yy * rho.matrix().conj() * yy;
    // Eigenvalues of rho * flipped equal those of sqrt(rho) flipped sqrt(rho), which is Hermitian PSD.
    const CMatrix root = floored_sqrt(rho.matrix());
    CMatrix r = root * flipped * root;
    r = (r + r.adjoint()) * cplx{0.5};
    auto ev = hermitian_eigenvalues(r);
    std::vector<double> lam(ev.size());
    std::transform(ev.begin(), ev.end(), lam.begin(), [](double x) { return x > kRootFloor ? std::sqrt(x) : 0.0; });
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double negativity(const DensityMatrix& rho, std::span<const std::size_t> transposed_factors) {
    const std::size_t nf = rho.dims().size();
    if (transposed_factors.empty() || transposed_factors.size() >= nf) {
        throw Error("negativity needs a proper non-empty subset of the factors");
    }
    std::vector<bool> seen(nf, false);
    for (std::size_t f : transposed_factors) {
        if (f >= nf || seen[f]) {
            throw Error("invalid bipartition for negativity");
        }
        seen[f] = true;
    }
    const CMatrix pt = partial_transpose(rho.matrix(), rho.dims(), transposed_factors);
    double trace_norm = 0.0;
    for (double x : hermitian_eigenvalues(pt)) {
        trace_norm += std::abs(x);
    }
    return std::max(0.0, 0.5 * (trace_norm - 1.0));
}

double squared_measure(const DensityMatrix& pair, MeasureId measure) {
    switch (measure) {
        case MeasureId::PurityConcurrence:
            return 2.0 * (1.0 - purity(pair));
        case MeasureId::WoottersConcurrence: {
            const double c = concurrence_wootters(pair);
            return c * c;
        }
        case MeasureId::Negativity: {
            const std::size_t first = 0;
            const double n2 = 2.0 * negativity(pair, std::span(&first, 1));
            return n2 * n2;
        }
    }
    return 0.0;
}

MonogamyReport ckw_check(const Ket& psi, MeasureId measure) {
    const Dims& dims = psi.dims();
    if (dims.size() != 3 || dims[0] != 2) {
        throw Error("ckw_check needs a (particle, Bub, Laloe) ket with dims (2, dB, dL)");
    }
    if (measure == MeasureId::WoottersConcurrence && (dims[1] != 2 || dims[2] != 2)) {
        throw Error("Wootters concurrence needs dB = dL = 2");
    }
    if (std::abs(psi.norm() - 1.0) > kEntryTol) {
        throw Error(fmt::format("ckw_check needs a unit-norm ket, norm is {:.17g}", psi.norm()));
    }
    const std::size_t pb[] = {0, 1};
    const std::size_t pl[] = {0, 2};
    const std::size_t bl[] = {1, 2};
    const std::size_t p[] = {0};

    MonogamyReport r;
    r.measure = measure;
    r.c2_pB = squared_measure(reduced_state(psi, pb), measure);
    r.c2_pL = squared_measure(reduced_state(psi, pl), measure);
    r.c2_BL = squared_measure(reduced_state(psi, bl), measure);
    r.c2_p_BL = std::max(0.0, 2.0 * (1.0 - purity(reduced_state(psi, p))));

    r.rhs = r.c2_p_BL;
    r.lhs = r.c2_pB + r.c2_pL;
    r.satisfied = r.lhs <= r.rhs + kMonogamySlack;
    r.line1_lhs = r.c2_pB + r.c2_BL;
    r.line2_lhs = r.c2_pL + r.c2_BL;
    r.line1_holds = r.line1_lhs <= r.rhs + kMonogamySlack;
    r.line2_holds = r.line2_lhs <= r.rhs + kMonogamySlack;
    return r;
}

Ket scan_state(std::size_t d, ScanConstruction construction) {
    if (d < 2 || d > 32) {
        throw Error(fmt::format("room dimension {} is outside [2, 32]", d));
    }
    const Dims dims{2, d, d};
    std::vector<cplx> a(2 * d * d);
    auto at = [&](std::size_t p, std::size_t b, std::size_t l) -> cplx& { return a[(p * d + b) * d + l]; };
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    switch (construction) {
        case ScanConstruction::DetachedParticle:
            for (std::size_t k = 0; k < d; ++k) {
                at(1, k, k) = inv_sqrt_d;
            }
            break;
        case ScanConstruction::EntangledParticle: {
            const double h = 1.0 / std::sqrt(2.0);
            at(0, 0, 0) = h;
            for (std::size_t k = 0; k < d; ++k) {
                at(1, (k + 1) % d, k) = h * inv_sqrt_d;
            }
            break;
        }
    }
    return {dims, std::move(a)};
}

ScanRow monogamy_scan(std::size_t d, ScanConstruction construction) {
    const Ket psi = scan_state(d, construction);
    const std::size_t b[] = {1};
    const std::size_t p[] = {0};
    const std::size_t pb[] = {0, 1};
    ScanRow row;
    row.d = d;
    row.c2_BL = std::max(0.0, 2.0 * (1.0 - purity(reduced_state(psi, b))));
    row.proxy_pB = negativity(reduced_state(psi, pb), p);
    row.c2_p_BL = std::max(0.0, 2.0 * (1.0 - purity(reduced_state(psi, p))));
    return row;
}

std::string to_csv(const std::vector<ScanRow>& rows, const std::vector<std::string>& metadata) {
    std::string out;
    for (const auto& m : metadata) {
        out += "# " + m + "\n";
    }
    out += "d,c2_BL,proxy_pB,c2_p_BL\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r.d, r.c2_BL, r.proxy_pB, r.c2_p_BL);
    }
    return out;
}

}  // namespace friendsim
