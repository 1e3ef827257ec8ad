#pragma once

// Kets, operators and density matrices on small tensor-factored Hilbert spaces.
//
// Factor ordering: the leftmost factor is the slowest-varying index,
//   index = sum_k i_k * prod_{j>k} d_j.
// The friends protocol uses the order (particle, Bub, Laloe).

#include <cstddef>
#include <span>
#include <vector>

#include "friendsim/linalg.hpp"

namespace friendsim {

using Dims = std::vector<std::size_t>;

inline constexpr double kEntryTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;
inline constexpr double kNormFloor = 1e-14;
inline constexpr std::size_t kMaxDimension = 4096;

/// Product of dims; throws on empty dims, zero factors or totals above kMaxDimension.
std::size_t total_dimension(std::span<const std::size_t> dims);

class Ket {
public:
    Ket(Dims dims, std::vector<cplx> amplitudes);

    static Ket basis(Dims dims, std::size_t index);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return amps_.size(); }
    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    double norm() const;

private:
    Dims dims_;
    std::vector<cplx> amps_;
};

class Operator {
public:
    Operator(Dims dims, CMatrix m);

    static Operator identity(Dims dims);
    /// |psi><psi| (not normalized).
    static Operator projector(const Ket& psi);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }
    Operator adjoint() const { return {dims_, m_.adjoint()}; }

    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator+(const Operator& a, const Operator& b);

private:
    Dims dims_;
    CMatrix m_;
};

struct DensityCheck {
    double hermiticity_residual = 0.0;
    double trace_residual = 0.0;
    double min_eigenvalue = 0.0;
};

class DensityMatrix {
public:
    /// Full validation: Hermitian and unit trace within 1e-12, eigenvalues >= -1e-10.
    static DensityMatrix checked(Dims dims, CMatrix m);
    /// For matrices produced by library operations that preserve the invariants.
    static DensityMatrix assume_valid(Dims dims, CMatrix m);
    /// |psi><psi| / <psi|psi>.
    static DensityMatrix from_ket(const Ket& psi);
    static DensityMatrix maximally_mixed(Dims dims);

    /// Measures the invariants without throwing.
    static DensityCheck inspect(const CMatrix& m);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
    double trace() const { return m_.trace().real(); }
    std::vector<double> eigenvalues() const { return hermitian_eigenvalues(m_); }

private:
    DensityMatrix(Dims dims, CMatrix m) : dims_(std::move(dims)), m_(std::move(m)) {}
    Dims dims_;
    CMatrix m_;
};

Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const Operator& a, const Operator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Traces out every factor not listed in keep. Kept factors stay in their original order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Reduced state of the pure state |psi><psi| on the kept factors without forming
/// the full projector. psi must have unit norm.
DensityMatrix reduced_state(const Ket& psi, std::span<const std::size_t> keep);

/// Tr(rho^2).
double purity(const DensityMatrix& rho);

/// Throws "annihilated state" when the norm is at or below 1e-14.
Ket normalize(const Ket& psi);

/// Tr(A rho).
cplx expectation(const Operator& a, const DensityMatrix& rho);

/// Reorders tensor factors: factor k of the result is factor order[k] of psi.
Ket permute_factors(const Ket& psi, std::span<const std::size_t> order);

/// Contracts one factor with a bra: result amplitude = sum_b bra[b] * psi(..., b, ...),
/// where bra[b] = <chi|b>. The factor is removed from dims.
Ket contract_factor(const Ket& psi, std::size_t factor, std::span<const cplx> bra);

}  // namespace friendsim
