#include "friendsim/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "friendsim/simd/kernels.hpp"

namespace friendsim {

std::size_t total_dimension(std::span<const std::size_t> dims) {
    if (dims.empty()) {
        throw Error("dims must list at least one factor");
    }
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) {
            throw Error("subsystem dimension must be positive");
        }
        n *= d;
        if (n > kMaxDimension) {
            throw Error(fmt::format("total dimension exceeds the dense cap {}", kMaxDimension));
        }
    }
    return n;
}

namespace {

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        s[k - 1] = s[k] * dims[k];
    }
    return s;
}

std::vector<std::size_t> sorted_factor_set(std::span<const std::size_t> keep, std::size_t nfactors) {
    if (keep.empty()) {
        throw Error("partial trace needs a non-empty keep set; use trace() for the scalar");
    }
    std::vector<std::size_t> k(keep.begin(), keep.end());
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end()) {
        throw Error("keep set lists a factor twice");
    }
    if (k.back() >= nfactors) {
        throw Error(fmt::format("factor index {} out of range for {} factors", k.back(), nfactors));
    }
    return k;
}

// full[a * dt + t] = full index whose kept part is a and traced part is t.
std::vector<std::size_t> split_index_table(const Dims& dims, const std::vector<std::size_t>& keep,
                                           std::size_t& dk, std::size_t& dt) {
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t f : keep) {
        kept[f] = true;
    }
    Dims kd;
    Dims td;
    for (std::size_t f = 0; f < dims.size(); ++f) {
        (kept[f] ? kd : td).push_back(dims[f]);
    }
    dk = std::accumulate(kd.begin(), kd.end(), std::size_t{1}, std::multiplies<>());
    dt = std::accumulate(td.begin(), td.end(), std::size_t{1}, std::multiplies<>());
    const auto ks = strides_of(kd);
    const auto ts = strides_of(td);
    const auto fs = strides_of(dims);
    const std::size_t n = dk * dt;
    std::vector<std::size_t> table(n);
    for (std::size_t full = 0; full < n; ++full) {
        std::size_t a = 0;
        std::size_t t = 0;
        std::size_t ki = 0;
        std::size_t ti = 0;
        for (std::size_t f = 0; f < dims.size(); ++f) {
            const std::size_t digit = (full / fs[f]) % dims[f];
            if (kept[f]) {
                a += digit * ks[ki++];
            } else {
                t += digit * ts[ti++];
            }
        }
        table[a * dt + t] = full;
    }
    return table;
}

Dims select(const Dims& dims, const std::vector<std::size_t>& keep) {
    Dims out;
    for (std::size_t f : keep) {
        out.push_back(dims[f]);
    }
    return out;
}

}  // namespace

Ket::Ket(Dims dims, std::vector<cplx> amplitudes) : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
    const std::size_t n = total_dimension(dims_);
    if (amps_.size() != n) {
        throw Error(fmt::format("ket has {} amplitudes but dims multiply to {}", amps_.size(), n));
    }
}

Ket Ket::basis(Dims dims, std::size_t index) {
    const std::size_t n = total_dimension(dims);
    if (index >= n) {
        throw Error("basis index out of range");
    }
    std::vector<cplx> a(n);
    a[index] = 1.0;
    return {std::move(dims), std::move(a)};
}

double Ket::norm() const { return std::sqrt(simd::active_kernels().norm_sq(amps_)); }

Operator::Operator(Dims dims, CMatrix m) : dims_(std::move(dims)), m_(std::move(m)) {
    const std::size_t n = total_dimension(dims_);
    if (m_.rows() != n || m_.cols() != n) {
        throw Error(fmt::format("operator must be {0}x{0} for its dims, got {1}x{2}", n, m_.rows(), m_.cols()));
    }
}

Operator Operator::identity(Dims dims) {
    const std::size_t n = total_dimension(dims);
    return {std::move(dims), CMatrix::identity(n)};
}

Operator Operator::projector(const Ket& psi) {
    return {psi.dims(), CMatrix::outer(psi.amplitudes(), psi.amplitudes())};
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) {
        throw Error("operator dims mismatch in product");
    }
    return {a.dims_, a.m_ * b.m_};
}

Operator operator+(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) {
        throw Error("operator dims mismatch in sum");
    }
    return {a.dims_, a.m_ + b.m_};
}

DensityCheck DensityMatrix::inspect(const CMatrix& m) {
    DensityCheck c;
    c.hermiticity_residual = hermiticity_residual(m);
    c.trace_residual = std::abs(m.trace() - cplx{1.0});
    const auto ev = hermitian_eigenvalues(m);
    c.min_eigenvalue = ev.empty() ? 0.0 : ev.front();
    return c;
}

DensityMatrix DensityMatrix::checked(Dims dims, CMatrix m) {
    const std::size_t n = total_dimension(dims);
    if (m.rows() != n || m.cols() != n) {
        throw Error(fmt::format("density matrix must be {0}x{0} for its dims, got {1}x{2}", n, m.rows(), m.cols()));
    }
    const double herm = hermiticity_residual(m);
    if (herm > kEntryTol) {
        throw Error(fmt::format("not Hermitian: hermiticity residual {:.3g}", herm));
    }
    const double tr = std::abs(m.trace() - cplx{1.0});
    if (tr > kEntryTol) {
        throw Error(fmt::format("trace residual {:.6g}", tr));
    }
    const auto ev = hermitian_eigenvalues(m);
    if (!ev.empty() && ev.front() < -kEigenTol) {
        throw Error(fmt::format("not positive semidefinite: minimum eigenvalue {:.6g}", ev.front()));
    }
    return {std::move(dims), std::move(m)};
}

DensityMatrix DensityMatrix::assume_valid(Dims dims, CMatrix m) {
    const std::size_t n = total_dimension(dims);
    if (m.rows() != n || m.cols() != n) {
        throw Error("density matrix side does not match dims");
    }
    return {std::move(dims), std::move(m)};
}

DensityMatrix DensityMatrix::from_ket(const Ket& psi) {
    const Ket u = normalize(psi);
    return {u.dims(), CMatrix::outer(u.amplitudes(), u.amplitudes())};
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
    const std::size_t n = total_dimension(dims);
    return {std::move(dims), CMatrix::identity(n) * cplx{1.0 / static_cast<double>(n)}};
}

Ket tensor(const Ket& a, const Ket& b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    total_dimension(dims);
    std::vector<cplx> out;
    out.reserve(a.size() * b.size());
    for (const cplx& x : a.amplitudes()) {
        for (const cplx& y : b.amplitudes()) {
            out.push_back(x * y);
        }
    }
    return {std::move(dims), std::move(out)};
}

Operator tensor(const Operator& a, const Operator& b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    total_dimension(dims);
    return {std::move(dims), kron(a.matrix(), b.matrix())};
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    total_dimension(dims);
    return DensityMatrix::assume_valid(std::move(dims), kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
    const auto k = sorted_factor_set(keep, rho.dims().size());
    std::size_t dk = 0;
    std::size_t dt = 0;
    const auto table = split_index_table(rho.dims(), k, dk, dt);
    CMatrix out(dk, dk);
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < dt; ++t) {
                acc += rho(table[a * dt + t], table[b * dt + t]);
            }
            out(a, b) = acc;
        }
    }
    return DensityMatrix::assume_valid(select(rho.dims(), k), std::move(out));
}

DensityMatrix reduced_state(const Ket& psi, std::span<const std::size_t> keep) {
    const auto k = sorted_factor_set(keep, psi.dims().size());
    std::size_t dk = 0;
    std::size_t dt = 0;
    const auto table = split_index_table(psi.dims(), k, dk, dt);
    CMatrix m(dk, dt);
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t t = 0; t < dt; ++t) {
            m(a, t) = psi[table[a * dt + t]];
        }
    }
    const auto& kern = simd::active_kernels();
    CMatrix out(dk, dk);
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = a; b < dk; ++b) {
            const cplx v = kern.cdot(m.row(b), m.row(a));
            out(a, b) = v;
            out(b, a) = std::conj(v);
        }
    }
    return DensityMatrix::assume_valid(select(psi.dims(), k), std::move(out));
}

double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return frobenius_sq(rho.matrix());
}

Ket normalize(const Ket& psi) {
    const double n = psi.norm();
    if (!(n > kNormFloor)) {
        throw Error(fmt::format("annihilated state: norm {:.3g} is at or below {:.0e}", n, kNormFloor));
    }
    std::vector<cplx> a(psi.amplitudes().begin(), psi.amplitudes().end());
    for (cplx& z : a) {
        z /= n;
    }
    return {psi.dims(), std::move(a)};
}

cplx expectation(const Operator& a, const DensityMatrix& rho) {
    if (a.dims() != rho.dims()) {
        throw Error("expectation: operator and state dims differ");
    }
    // Tr(A rho) = sum_ij A_ij rho_ji = sum_ij A_ij conj(rho_ij) for Hermitian rho.
    return std::conj(simd::active_kernels().cdot(a.matrix().data(), rho.matrix().data()));
}

Ket permute_factors(const Ket& psi, std::span<const std::size_t> order) {
    const Dims& dims = psi.dims();
    if (order.size() != dims.size()) {
        throw Error("permutation length does not match factor count");
    }
    std::vector<bool> seen(dims.size(), false);
    Dims out_dims;
    for (std::size_t f : order) {
        if (f >= dims.size() || seen[f]) {
            throw Error("not a permutation of the factors");
        }
        seen[f] = true;
        out_dims.push_back(dims[f]);
    }
    const auto in_s = strides_of(dims);
    const auto out_s = strides_of(out_dims);
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        std::size_t j = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            j += ((i / in_s[order[k]]) % dims[order[k]]) * out_s[k];
        }
        out[j] = psi[i];
    }
    return {std::move(out_dims), std::move(out)};
}

Ket contract_factor(const Ket& psi, std::size_t factor, std::span<const cplx> bra) {
    const Dims& dims = psi.dims();
    if (factor >= dims.size()) {
        throw Error("contract_factor: factor index out of range");
    }
    if (dims.size() < 2) {
        throw Error("contract_factor: contracting the only factor leaves a scalar");
    }
    if (bra.size() != dims[factor]) {
        throw Error("contract_factor: bra length does not match the factor dimension");
    }
    std::vector<std::size_t> keep;
    for (std::size_t f = 0; f < dims.size(); ++f) {
        if (f != factor) {
            keep.push_back(f);
        }
    }
    std::size_t dk = 0;
    std::size_t dt = 0;
    const auto table = split_index_table(dims, keep, dk, dt);
    std::vector<cplx> out(dk);
    for (std::size_t a = 0; a < dk; ++a) {
        cplx acc = 0.0;
        for (std::size_t b = 0; b < dt; ++b) {
            acc += bra[b] * psi[table[a * dt + b]];
        }
        out[a] = acc;
    }
    return {select(dims, keep), std::move(out)};
}

}  // namespace friendsim
