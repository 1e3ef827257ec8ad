#include <doctest.h>

#include <cmath>

#include "friendsim/stopping.hpp"

using namespace friendsim;

TEST_CASE("seeded streams") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    Rng a(99);
    Rng b(99);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("paths are deterministic in the seed") {
    const SamplePath p1 = simulate_path(PathModelKind::SimpleRandomWalk, 10.0, 1.0, 42);
    const SamplePath p2 = simulate_path(PathModelKind::SimpleRandomWalk, 10.0, 1.0, 42);
    CHECK(p1.values == p2.values);
    CHECK(p1.times == p2.times);
    REQUIRE(p1.values.size() == 11);
    CHECK(p1.values.front() == 0.0);
    for (std::size_t k = 1; k < p1.values.size(); ++k) {
        CHECK(std::abs(std::abs(p1.values[k] - p1.values[k - 1]) - 1.0) == 0.0);
    }
    const SamplePath p3 = simulate_path(PathModelKind::SimpleRandomWalk, 10.0, 1.0, 43);
    CHECK(p3.values != p1.values);
}

TEST_CASE("two-state chain without flips is constant") {
    const SamplePath p = simulate_path(PathModelKind::TwoStateMarkov, 50.0, 0.5, 7, 0.0);
    for (double x : p.values) {
        CHECK(x == 1.0);
    }
    const SamplePath q = simulate_path(PathModelKind::TwoStateMarkov, 50.0, 0.5, 7, 1.0);
    for (std::size_t k = 0; k < q.values.size(); ++k) {
        CHECK(q.values[k] == (k % 2 == 0 ? 1.0 : -1.0));
    }
}

TEST_CASE("walk endpoint obeys the central limit oracle") {
    // X_100 has mean 0 and variance 100; the sample mean of 1e5 draws has sigma 10 / sqrt(1e5).
    constexpr std::size_t kPaths = 100000;
    double sum = 0.0;
    double sum_sq = 0.0;
    PathModel m{PathModelKind::SimpleRandomWalk, 1.0, 1.0, 0.0, 0.0};
    for (std::size_t s = 0; s < kPaths; ++s) {
        PathStepper stepper(m, derive_seed(2024, s));
        for (int k = 0; k < 100; ++k) {
            stepper.step();
        }
        sum += stepper.value();
        sum_sq += stepper.value() * stepper.value();
    }
    const double mean = sum / kPaths;
    const double sigma = std::sqrt(100.0) / std::sqrt(static_cast<double>(kPaths));
    CHECK(std::abs(mean) < 3.0 * sigma);
    const double var = sum_sq / kPaths - mean * mean;
    // Var of the sample variance is about 2 * 100^2 / n.
    CHECK(std::abs(var - 100.0) < 3.0 * 100.0 * std::sqrt(2.0 / kPaths));
}

TEST_CASE("stepper agrees with simulate_path") {
    PathModel m{PathModelKind::SimpleRandomWalk, 0.25, 0.5, 1.0, 0.0};
    const SamplePath p = simulate_path(m, 20.0, 5);
    PathStepper s(m, 5);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        CHECK(s.value() == p.values[k]);
        CHECK(s.time() == p.times[k]);
        s.step();
    }
}

TEST_CASE("counting process") {
    const StoppingTimeSequence taus({1.0, 2.5, 4.0}, 10.0);
    CHECK(counting_process(taus, 3.0) == 2);
    CHECK(counting_process(taus, 0.5) == 0);
    CHECK(counting_process(taus, 4.0) == 3);
    CHECK(counting_process(taus, 1.0) == 1);
    CHECK(counting_process(taus, std::nextafter(1.0, 0.0)) == 0);

    // Non-decreasing with unit jumps only at the taus.
    std::size_t prev = 0;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 0.01 * k;
        const std::size_t c = counting_process(taus, t);
        CHECK(c >= prev);
        CHECK(c - prev <= 1);
        if (c != prev) {
            bool at_tau = false;
            for (double tau : taus.taus()) {
                at_tau = at_tau || (tau <= t && tau > t - 0.01);
            }
            CHECK(at_tau);
        }
        prev = c;
    }
}

TEST_CASE("stopping time sequence validation") {
    CHECK_THROWS_AS(StoppingTimeSequence({2.0, 1.0}, 5.0), Error);
    CHECK_THROWS_AS(StoppingTimeSequence({1.0, 5.0}, 5.0), Error);
    CHECK_THROWS_AS(StoppingTimeSequence({-1.0}, 5.0), Error);
    CHECK_THROWS_AS(StoppingTimeSequence({1.0}, 0.0), Error);
    CHECK_NOTHROW(StoppingTimeSequence({1.0, 1.0}, 5.0));
}

TEST_CASE("stopping pairs honour the gap rule") {
    PathModel m{PathModelKind::SimpleRandomWalk, 1.0 / 256.0, 1.0 / 16.0, 0.0, 0.0};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const SamplePath path = simulate_path(m, 16.0, seed);
        for (const StoppingPair& p : make_stopping_pairs(path, 1.0, 20, GapRule::FixedDelay)) {
            if (p.truncated) {
                continue;
            }
            CHECK(p.second >= p.first);
            CHECK(p.second - p.first <= 1.0 / static_cast<double>(p.n) + path.dt + 1e-12);
            CHECK(path.values[p.first_index] >= 1.0 - 1e-12);
        }
        const StoppingPair c = stopping_pair(path, 1.0, 10, GapRule::CeilToGrid);
        if (!c.truncated) {
            CHECK(c.second - c.first <= 0.1 + 1e-12);
            // Multiple of 1/10 up to the path grid.
            const double q = c.second * 10.0;
            CHECK(std::abs(q - std::round(q)) <= 10.0 * path.dt);
        }
        const StoppingPair e = stopping_pair(path, 1.0, 10, GapRule::Exact);
        CHECK(e.first == e.second);
    }
}

TEST_CASE("constant path makes T and U coincide") {
    // A chain that never flips sits at +1, so the level 1 is hit at time 0 and
    // rounding up to the 1/n grid keeps U = T = 0 for every n.
    const SamplePath path = simulate_path(PathModelKind::TwoStateMarkov, 4.0, 1.0 / 64.0, 3, 0.0);
    for (const StoppingPair& p : make_stopping_pairs(path, 1.0, 64, GapRule::CeilToGrid)) {
        CHECK_FALSE(p.truncated);
        CHECK(p.first == p.second);
    }
}

TEST_CASE("exceedance shrinks from n = 10 to n = 100") {
    PathModel m{PathModelKind::SimpleRandomWalk, 1.0 / 256.0, 1.0 / 16.0, 0.0, 0.0};
    std::size_t exceed10 = 0;
    std::size_t exceed100 = 0;
    for (std::uint64_t trial = 0; trial < 10000; ++trial) {
        const SamplePath path = simulate_path(m, 16.0, derive_seed(77, trial));
        const StoppingPair a = stopping_pair(path, 1.0, 10, GapRule::FixedDelay);
        const StoppingPair b = stopping_pair(path, 1.0, 100, GapRule::FixedDelay);
        if (a.truncated || b.truncated) {
            continue;
        }
        exceed10 += std::abs(path.values[a.second_index] - path.values[a.first_index]) > 0.5;
        exceed100 += std::abs(path.values[b.second_index] - path.values[b.first_index]) > 0.5;
    }
    CHECK(exceed100 < exceed10);
}

TEST_CASE("band exits") {
    PathModel m{PathModelKind::SimpleRandomWalk, 1.0 / 256.0, 1.0 / 16.0, 0.5, 0.0};
    const SamplePath path = simulate_path(m, 16.0, 12);
    const StoppingTimeSequence taus = band_exit_times(path, 1.0, 10);
    double anchor = path.values.front();
    for (double tau : taus.taus()) {
        const auto k = static_cast<std::size_t>(std::llround(tau / path.dt));
        CHECK(std::abs(std::abs(path.values[k] - anchor) - 1.0) < 1e-12);
        anchor = path.values[k];
    }
    CHECK_THROWS_AS(band_exit_times(path, 0.0, 3), Error);
}
