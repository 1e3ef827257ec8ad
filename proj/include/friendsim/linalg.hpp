#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace friendsim {

using cplx = std::complex<double>;

/// Every failure surfaced by the library. The message is meant for humans and
/// names the violated condition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t n) { return CMatrix(n, n); }
    /// |a><b|
    static CMatrix outer(std::span<const cplx> a, std::span<const cplx> b);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::span<cplx> data() noexcept { return data_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conj() const;
    cplx trace() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

    std::vector<cplx> apply(std::span<const cplx> v) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Kronecker product a ⊗ b; a's index varies slowest.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// max |a_ij - b_ij|. Shapes must agree.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// max |m - m^†|.
double hermiticity_residual(const CMatrix& m);

/// Frobenius norm squared, sum |m_ij|^2.
double frobenius_sq(const CMatrix& m);

struct HermitianEigen {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // column k is the eigenvector for values[k]
};

/// Dense Hermitian eigendecomposition. Only the lower triangle is read.
HermitianEigen hermitian_eigen(const CMatrix& m);
std::vector<double> hermitian_eigenvalues(const CMatrix& m);

/// Principal square root of a Hermitian PSD matrix; eigenvalues below zero are clamped.
CMatrix psd_sqrt(const CMatrix& m);

/// Partial transpose over the listed factors of a matrix on a tensor space.
CMatrix partial_transpose(const CMatrix& m, std::span<const std::size_t> dims,
                          std::span<const std::size_t> factors);

}  // namespace friendsim
