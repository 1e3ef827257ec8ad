#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "friendsim/povm.hpp"
#include "oracles.hpp"

using namespace friendsim;

namespace {

Operator basis_projector(std::size_t dim, std::size_t k) { return Operator::projector(Ket::basis({dim}, k)); }

// Splits the columns of a Haar unitary into `parts` contiguous groups.
std::vector<Operator> random_partition(std::size_t dim, std::size_t parts, Rng& rng) {
    const CMatrix u = haar_unitary(dim, rng);
    std::vector<Operator> out;
    for (std::size_t g = 0; g < parts; ++g) {
        CMatrix p(dim, dim);
        for (std::size_t c = dim * g / parts; c < dim * (g + 1) / parts; ++c) {
            std::vector<cplx> col(dim);
            for (std::size_t r = 0; r < dim; ++r) {
                col[r] = u(r, c);
            }
            p += CMatrix::outer(col, col);
        }
        out.emplace_back(Dims{dim}, std::move(p));
    }
    return out;
}

StoppingTimeSequence even_taus(std::size_t n) {
    std::vector<double> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back(1.0 + static_cast<double>(i));
    }
    return {std::move(t), static_cast<double>(n) + 1.0};
}

const double kS = 1.0 / std::numbers::sqrt2;

}  // namespace

TEST_CASE("process construction") {
    CHECK_NOTHROW(build_kosher_process({basis_projector(2, 0), basis_projector(2, 1)}, StoppingTimeSequence({1, 2}, 3)));

    const Operator plus = Operator::projector(Ket({2}, {kS, kS}));
    CHECK_THROWS_WITH_AS(build_kosher_process({plus, plus}, StoppingTimeSequence({1, 2}, 3)),
                         doctest::Contains("not a partition of unity"), Error);

    // rank-2 + rank-2 on dimension 4
    const Operator low = basis_projector(4, 0) + basis_projector(4, 1);
    const Operator high = basis_projector(4, 2) + basis_projector(4, 3);
    CHECK_NOTHROW(build_kosher_process({low, high}, StoppingTimeSequence({1, 2}, 3)));

    const Operator half({2}, CMatrix{{0.5, 0}, {0, 0.5}});
    CHECK_THROWS_WITH_AS(build_kosher_process({half, half}, StoppingTimeSequence({1, 2}, 3)),
                         doctest::Contains("not idempotent"), Error);

    // One projector, two stopping times.
    CHECK_THROWS_AS(build_kosher_process({basis_projector(2, 0)}, StoppingTimeSequence({1, 2}, 3)), Error);
}

TEST_CASE("zero projectors are allowed") {
    const Operator zero({2}, CMatrix::zeros(2));
    CHECK_NOTHROW(
        build_kosher_process({basis_projector(2, 0), basis_projector(2, 1), zero}, StoppingTimeSequence({1, 2, 3}, 4)));
}

TEST_CASE("process value averages the occurred projectors") {
    const Operator p0 = basis_projector(2, 0);
    const Operator p1 = basis_projector(2, 1);
    const MeasurementProcess mp = build_kosher_process({p0, p1}, StoppingTimeSequence({1.0, 2.0}, 5.0));
    CHECK(max_abs_diff(process_value(mp, 0.5).matrix(), CMatrix::zeros(2)) == 0.0);
    CHECK(max_abs_diff(process_value(mp, 1.5).matrix(), p0.matrix()) == 0.0);
    // (P0 + P1) / 2 written out entry by entry.
    const CMatrix expect{{0.5, 0}, {0, 0.5}};
    CHECK(max_abs_diff(process_value(mp, 3.0).matrix(), expect) == 0.0);
    CHECK_THROWS_AS(process_value(mp, 5.0), Error);

    CHECK(max_abs_diff(window_value(mp, 0, 1.5).matrix(), p0.matrix()) == 0.0);
    CHECK(max_abs_diff(window_value(mp, 0, 2.5).matrix(), CMatrix::zeros(2)) == 0.0);
    CHECK(max_abs_diff(window_value(mp, 1, 2.5).matrix(), expect) == 0.0);

    CHECK(active_index(mp, 0.5) == 2);
    CHECK(active_index(mp, 1.0) == 0);
    CHECK(active_index(mp, 4.9) == 1);
    CHECK(max_abs_diff(active_projector(mp, 2.5).matrix(), p1.matrix()) == 0.0);

    // A custom counting function that counts twice as fast halves the value.
    const Operator half = process_value(mp, 1.5, [](double) { return std::size_t{2}; });
    CHECK(max_abs_diff(half.matrix(), p0.matrix() * cplx{0.5}) == 0.0);
}

TEST_CASE("born update examples") {
    const DensityMatrix plus = DensityMatrix::from_ket(Ket({2}, {kS, kS}));
    const MeasurementRecord r = born_update(plus, basis_projector(2, 0));
    CHECK(r.probability == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(max_abs_diff(r.post_state.matrix(), basis_projector(2, 0).matrix()) < 1e-15);

    Rng rng(4);
    const DensityMatrix rho = DensityMatrix::checked({3}, oracle::random_density(3, rng));
    const MeasurementRecord id = born_update(rho, Operator::identity({3}));
    CHECK(id.probability == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs_diff(id.post_state.matrix(), rho.matrix()) < 1e-15);

    CHECK_THROWS_WITH_AS(born_update(DensityMatrix::from_ket(Ket::basis({2}, 1)), basis_projector(2, 0)),
                         doctest::Contains("outcome impossible"), Error);
}

TEST_CASE("random partitions: residual, probabilities, trace, repeatability") {
    Rng rng(31);
    std::size_t violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
        const std::size_t parts = 1 + static_cast<std::size_t>(trial % dim);
        const MeasurementProcess mp = build_kosher_process(random_partition(dim, parts, rng), even_taus(parts));
        CHECK(mp.partition_residual() < 1e-12);

        const DensityMatrix rho = DensityMatrix::checked({dim}, oracle::random_density(dim, rng));
        const auto probs = outcome_probabilities(rho, mp);
        double total = 0.0;
        for (double p : probs) {
            total += p;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        for (std::size_t i = 0; i < mp.size(); ++i) {
            if (probs[i] > 1e-12) {
                const MeasurementRecord r = born_update(rho, mp.projectors()[i]);
                CHECK(std::abs(r.post_state.trace() - 1.0) < 1e-12);
                CHECK(std::abs(r.probability - expectation(mp.projectors()[i], rho).real()) < 1e-12);
            }
        }

        const MeasurementRecord first = sample_measurement(rho, mp, derive_seed(5, trial));
        const MeasurementRecord again = sample_measurement(first.post_state, mp, derive_seed(6, trial));
        violations += first.outcome_index != again.outcome_index;
        CHECK(outcome_probabilities(first.post_state, mp)[first.outcome_index] == doctest::Approx(1.0));
    }
    CHECK(violations == 0);
}

TEST_CASE("sampling frequencies") {
    const MeasurementProcess mp =
        build_kosher_process({basis_projector(2, 0), basis_projector(2, 1)}, StoppingTimeSequence({1, 2}, 3));
    const DensityMatrix zero = DensityMatrix::from_ket(Ket::basis({2}, 0));
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto r = sample_measurement(zero, mp, s);
        CHECK(r.outcome_index == 0);
        CHECK(r.probability == 1.0);
        CHECK(r.at_tau == 1.0);
    }

    const DensityMatrix mixed = DensityMatrix::maximally_mixed({2});
    Rng rng(123);
    constexpr std::size_t kSamples = 100000;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < kSamples; ++i) {
        ones += sample_measurement(mixed, mp, rng).outcome_index;
    }
    const double freq = static_cast<double>(ones) / kSamples;
    CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / kSamples));
}

TEST_CASE("manifest loading") {
    const auto dir = std::filesystem::temp_directory_path() / "friendsim_povm_manifest";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "p0.txt") << "dims: 2\n1 0\n0 0\n";
    std::ofstream(dir / "p1.txt") << "dims: 2\n0 0\n0 1\n";
    std::ofstream(dir / "process.txt") << "# two outcomes\nhorizon 3\nprojector p0.txt 1\nprojector p1.txt 2\n";
    const MeasurementProcess mp = load_process_manifest(dir / "process.txt");
    CHECK(mp.size() == 2);
    CHECK(mp.horizon() == 3.0);
    CHECK(mp.taus().taus() == std::vector<double>{1.0, 2.0});

    std::ofstream(dir / "bad.txt") << "horizon 3\nprojector p0.txt 1\nprojector p0.txt 2\n";
    CHECK_THROWS_WITH_AS(load_process_manifest(dir / "bad.txt"), doctest::Contains("not a partition of unity"), Error);
    std::ofstream(dir / "nohorizon.txt") << "projector p0.txt 1\n";
    CHECK_THROWS_WITH_AS(load_process_manifest(dir / "nohorizon.txt"), doctest::Contains("horizon"), Error);
    std::filesystem::remove_all(dir);
}
