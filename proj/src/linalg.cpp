#include "friendsim/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "friendsim/simd/kernels.hpp"

namespace friendsim {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw Error("matrix data length " + std::to_string(data_.size()) + " does not match shape " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw Error("ragged matrix initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::outer(std::span<const cplx> a, std::span<const cplx> b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = std::conj((*this)(i, j));
        }
    }
    return t;
}

CMatrix CMatrix::transpose() const {
    CMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

CMatrix CMatrix::conj() const {
    CMatrix t = *this;
    for (cplx& z : t.data_) {
        z = std::conj(z);
    }
    return t;
}

cplx CMatrix::trace() const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
        acc += (*this)(i, i);
    }
    return acc;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
        throw Error("matrix shape mismatch in addition");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += o.data_[i];
    }
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
        throw Error("matrix shape mismatch in subtraction");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= o.data_[i];
    }
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (cplx& z : data_) {
        z *= s;
    }
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw Error("matrix shape mismatch in product");
    }
    const auto& k = simd::active_kernels();
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = c.row(i);
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const cplx s = a(i, l);
            if (s != cplx{}) {
                k.caxpy(s, b.row(l), out);
            }
        }
    }
    return c;
}

std::vector<cplx> CMatrix::apply(std::span<const cplx> v) const {
    if (v.size() != cols_) {
        throw Error("matrix-vector shape mismatch");
    }
    const auto& k = simd::active_kernels();
    std::vector<cplx> conj_v(v.size());
    std::transform(v.begin(), v.end(), conj_v.begin(), [](cplx z) { return std::conj(z); });
    std::vector<cplx> out(rows_);
    // cdot(conj v, row) = sum_j v_j row_j
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = k.cdot(conj_v, row(i));
    }
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx s = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    c(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
                }
            }
        }
    }
    return c;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error("matrix shape mismatch in comparison");
    }
    return simd::active_kernels().max_abs_diff(a.data(), b.data());
}

double hermiticity_residual(const CMatrix& m) {
    if (!m.square()) {
        throw Error("hermiticity of a non-square matrix");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i; j < m.cols(); ++j) {
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return worst;
}

double frobenius_sq(const CMatrix& m) { return simd::active_kernels().norm_sq(m.data()); }

namespace {

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        }
    }
    return e;
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& m) {
    if (!m.square()) {
        throw Error("eigendecomposition of a non-square matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error("Hermitian eigensolver did not converge");
    }
    HermitianEigen out;
    const auto n = m.rows();
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = solver.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
    if (!m.square()) {
        throw Error("eigendecomposition of a non-square matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error("Hermitian eigensolver did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

CMatrix psd_sqrt(const CMatrix& m) {
    const HermitianEigen eig = hermitian_eigen(m);
    const std::size_t n = m.rows();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::sqrt(std::max(0.0, eig.values[k]));
        if (s == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = eig.vectors(i, k) * s;
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += vi * std::conj(eig.vectors(j, k));
            }
        }
    }
    return out;
}

CMatrix partial_transpose(const CMatrix& m, std::span<const std::size_t> dims,
                          std::span<const std::size_t> factors) {
    const std::size_t nf = dims.size();
    const std::size_t n = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    if (m.rows() != n || m.cols() != n) {
        throw Error("partial transpose: matrix side does not match dims");
    }
    std::vector<bool> flip(nf, false);
    for (std::size_t f : factors) {
        if (f >= nf) {
            throw Error("partial transpose: factor index " + std::to_string(f) + " out of range");
        }
        flip[f] = true;
    }
    std::vector<std::size_t> stride(nf, 1);
    for (std::size_t k = nf; k-- > 1;) {
        stride[k - 1] = stride[k] * dims[k];
    }
    CMatrix out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t r2 = r;
            std::size_t c2 = c;
            for (std::size_t k = 0; k < nf; ++k) {
                if (!flip[k]) {
                    continue;
                }
                const std::size_t rk = (r / stride[k]) % dims[k];
                const std::size_t ck = (c / stride[k]) % dims[k];
                r2 = r2 - rk * stride[k] + ck * stride[k];
                c2 = c2 - ck * stride[k] + rk * stride[k];
            }
            out(r2, c2) = m(r, c);
        }
    }
    return out;
}

}  // namespace friendsim
