#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "friendsim/qstate.hpp"
#include "friendsim/random.hpp"
#include "oracles.hpp"

using namespace friendsim;

namespace {

DensityMatrix random_dm(const Dims& dims, Rng& rng) {
    return DensityMatrix::checked(dims, oracle::random_density(total_dimension(dims), rng));
}

const CMatrix kSigmaZ{{1, 0}, {0, -1}};
const CMatrix kSigmaX{{0, 1}, {1, 0}};

}  // namespace

TEST_CASE("total_dimension") {
    CHECK(total_dimension(Dims{2, 3, 4}) == 24);
    CHECK_THROWS_AS(total_dimension(Dims{}), Error);
    CHECK_THROWS_AS(total_dimension(Dims{2, 0}), Error);
    CHECK(total_dimension(Dims{64, 64}) == 4096);
    CHECK_THROWS_WITH_AS(total_dimension(Dims{64, 65}), doctest::Contains("dense cap"), Error);
}

TEST_CASE("tensor of kets and operators") {
    const Ket k = tensor(Ket::basis({2}, 0), Ket::basis({2}, 1));
    CHECK(k.dims() == Dims{2, 2});
    CHECK(k[1] == cplx{1.0});
    CHECK(std::abs(k[0]) + std::abs(k[2]) + std::abs(k[3]) == 0.0);

    const Operator id = tensor(Operator::identity({2}), Operator::identity({2}));
    CHECK(max_abs_diff(id.matrix(), CMatrix::identity(4)) == 0.0);

    const double s = 1.0 / std::numbers::sqrt2;
    const Ket plus({2}, {s, s});
    const Ket p0 = tensor(plus, Ket::basis({2}, 0));
    CHECK(std::abs(p0[0] - s) < 1e-15);
    CHECK(std::abs(p0[1]) == 0.0);
    CHECK(std::abs(p0[2] - s) < 1e-15);
    CHECK(std::abs(p0[3]) == 0.0);
}

TEST_CASE("kron against the naive oracle and associativity") {
    Rng rng(3);
    const CMatrix a = oracle::random_density(2, rng);
    const CMatrix b = oracle::random_density(3, rng);
    const CMatrix c = oracle::random_density(2, rng);
    CHECK(max_abs_diff(kron(a, b), oracle::kron(a, b)) == 0.0);
    CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-15);
}

TEST_CASE("partial trace examples") {
    const double s = 1.0 / std::numbers::sqrt2;
    const Ket bell({2, 2}, {s, 0, 0, s});
    const std::size_t first[] = {0};
    const DensityMatrix r = partial_trace(DensityMatrix::from_ket(bell), first);
    CHECK(max_abs_diff(r.matrix(), CMatrix::identity(2) * cplx{0.5}) < 1e-15);

    Rng rng(11);
    const DensityMatrix ra = random_dm({2}, rng);
    const DensityMatrix rb = random_dm({3}, rng);
    const DensityMatrix back = partial_trace(tensor(ra, rb), first);
    CHECK(max_abs_diff(back.matrix(), ra.matrix()) < 1e-12);

    CHECK_THROWS_WITH_AS(partial_trace(r, std::span<const std::size_t>{}), doctest::Contains("trace()"), Error);
    const std::size_t bad[] = {2};
    CHECK_THROWS_AS(partial_trace(DensityMatrix::from_ket(bell), bad), Error);
}

TEST_CASE("partial trace of the two-friend prior matches the index-loop oracle") {
    // alpha = alpha_t = sqrt(1/2); beta, beta_t fill the norm.
    const double h = std::sqrt(0.5);
    const Ket prior({2, 2}, {h * h, h * h, h * h, h * h});
    const DensityMatrix rho = DensityMatrix::from_ket(prior);
    const std::size_t bub[] = {1};
    const DensityMatrix rb = partial_trace(rho, bub);
    const CMatrix expect = oracle::partial_trace(rho.matrix(), {2, 2}, {1});
    CHECK(max_abs_diff(rb.matrix(), expect) < 1e-15);
    // Frozen from the oracle: every entry 1/2.
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(rb(i, j) - cplx{0.5}) < 1e-15);
        }
    }
}

TEST_CASE("partial trace property on random three-factor states") {
    Rng rng(29);
    const Dims dims{2, 3, 2};
    const std::vector<std::vector<std::size_t>> keeps{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = random_dm(dims, rng);
        for (const auto& keep : keeps) {
            const DensityMatrix r = partial_trace(rho, keep);
            CHECK(max_abs_diff(r.matrix(), oracle::partial_trace(rho.matrix(), dims, keep)) < 1e-12);
            CHECK(std::abs(r.trace() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("reduced_state agrees with partial_trace of the projector") {
    Rng rng(5);
    const Dims dims{2, 3, 4};
    for (int trial = 0; trial < 10; ++trial) {
        const Ket psi(dims, haar_state(24, rng));
        const DensityMatrix full = DensityMatrix::from_ket(psi);
        for (const std::vector<std::size_t>& keep : {std::vector<std::size_t>{0}, {1, 2}, {0, 2}, {2}}) {
            CHECK(max_abs_diff(reduced_state(psi, keep).matrix(), partial_trace(full, keep).matrix()) < 1e-12);
        }
    }
}

TEST_CASE("purity") {
    CHECK(purity(DensityMatrix::from_ket(Ket::basis({3}, 1))) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(purity(DensityMatrix::maximally_mixed({2})) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(purity(DensityMatrix::maximally_mixed({2, 2})) == doctest::Approx(0.25).epsilon(1e-14));

    Rng rng(8);
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
        const DensityMatrix rho = random_dm({n}, rng);
        const double p = purity(rho);
        CHECK(p >= 1.0 / static_cast<double>(n) - 1e-12);
        CHECK(p <= 1.0 + 1e-12);
        // Full rank, so strictly mixed.
        CHECK(p < 1.0 - 1e-10);
        const DensityMatrix pure = DensityMatrix::from_ket(Ket({n}, haar_state(n, rng)));
        CHECK(std::abs(purity(pure) - 1.0) < 1e-12);
        const auto ev = pure.eigenvalues();
        CHECK(std::abs(ev.back() - 1.0) < 1e-10);
    }
}

TEST_CASE("normalize") {
    const Ket a = normalize(Ket({2}, {2.0, 0.0}));
    CHECK(a[0] == cplx{1.0});
    const Ket b = normalize(Ket({2}, {1.0, 1.0}));
    CHECK(std::abs(b[0] - 1.0 / std::numbers::sqrt2) < 1e-15);
    CHECK(std::abs(b[1] - 1.0 / std::numbers::sqrt2) < 1e-15);
    CHECK_THROWS_WITH_AS(normalize(Ket({2}, {0.0, 0.0})), doctest::Contains("annihilated"), Error);
}

TEST_CASE("expectation") {
    Rng rng(13);
    const DensityMatrix rho = random_dm({2}, rng);
    CHECK(std::abs(expectation(Operator::identity({2}), rho) - 1.0) < 1e-12);
    CHECK(std::abs(expectation(Operator({2}, kSigmaZ), DensityMatrix::from_ket(Ket::basis({2}, 0))) - 1.0) <
          1e-15);
    CHECK(std::abs(expectation(Operator({2}, kSigmaX), DensityMatrix::maximally_mixed({2}))) < 1e-15);

    for (int trial = 0; trial < 20; ++trial) {
        CMatrix a(3, 3);
        for (auto& x : a.data()) {
            x = rng.complex_normal();
        }
        const DensityMatrix r = random_dm({3}, rng);
        const Operator op({3}, a);
        CHECK(std::abs(expectation(op.adjoint(), r) - std::conj(expectation(op, r))) < 1e-12);
        // Direct sum_ij A_ij rho_ji.
        cplx direct = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                direct += a(i, j) * r(j, i);
            }
        }
        CHECK(std::abs(expectation(op, r) - direct) < 1e-12);
    }
}

TEST_CASE("density matrix validation reports residuals") {
    CHECK_THROWS_WITH_AS(DensityMatrix::checked({2}, CMatrix{{0.45, 0}, {0, 0.45}}),
                         doctest::Contains("trace residual 0.1"), Error);
    CHECK_THROWS_WITH_AS(DensityMatrix::checked({2}, CMatrix{{0.5, 0.1}, {0.2, 0.5}}),
                         doctest::Contains("not Hermitian"), Error);
    CHECK_THROWS_WITH_AS(DensityMatrix::checked({2}, CMatrix{{1.5, 0}, {0, -0.5}}),
                         doctest::Contains("not positive semidefinite"), Error);
    CHECK_NOTHROW(DensityMatrix::checked({2}, CMatrix{{0.5, 0}, {0, 0.5}}));
}

TEST_CASE("permute_factors and contract_factor") {
    Rng rng(21);
    const Ket a({2}, haar_state(2, rng));
    const Ket b({3}, haar_state(3, rng));
    const Ket ab = tensor(a, b);
    const std::size_t swap[] = {1, 0};
    const Ket ba = permute_factors(ab, swap);
    const Ket expect = tensor(b, a);
    CHECK(ba.dims() == Dims{3, 2});
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(std::abs(ba[i] - expect[i]) < 1e-15);
    }

    // <chi| on factor 1 of a ⊗ b gives <chi|b> a.
    const std::vector<cplx> bra{cplx{0.2, 0.1}, cplx{-0.4}, cplx{0.0, 0.7}};
    cplx overlap = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        overlap += bra[k] * b[k];
    }
    const Ket c = contract_factor(ab, 1, bra);
    CHECK(c.dims() == Dims{2});
    CHECK(std::abs(c[0] - overlap * a[0]) < 1e-15);
    CHECK(std::abs(c[1] - overlap * a[1]) < 1e-15);
    CHECK_THROWS_AS(contract_factor(Ket::basis({2}, 0), 0, std::vector<cplx>{1.0, 0.0}), Error);
}

TEST_CASE("psd_sqrt and partial transpose") {
    Rng rng(2);
    const CMatrix r = oracle::random_density(4, rng);
    const CMatrix s = psd_sqrt(r);
    CHECK(max_abs_diff(s * s, r) < 1e-12);
    const std::size_t dims[] = {2, 2};
    const std::size_t first[] = {0};
    const CMatrix pt = partial_transpose(r, dims, first);
    CHECK(max_abs_diff(partial_transpose(pt, dims, first), r) == 0.0);
    const std::size_t both[] = {0, 1};
    CHECK(max_abs_diff(partial_transpose(r, dims, both), r.transpose()) == 0.0);
    // Entry (i1 j1, i2 j2) of the first-factor transpose is r(i2 j1, i1 j2).
    CHECK(pt(0 * 2 + 1, 1 * 2 + 0) == r(1 * 2 + 1, 0 * 2 + 0));
}
