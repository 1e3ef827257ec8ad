#include <doctest.h>

#include <string>

#include "friendsim/experiments.hpp"

using namespace friendsim;

namespace {

void check_trend(const ConvergenceReport& r) {
    for (std::size_t k = 0; k + 1 < r.n_values.size(); ++k) {
        CAPTURE(r.n_values[k]);
        CHECK(r.exceedance_probs[k + 1] <= r.exceedance_probs[k] + r.ci_halfwidth[k] + r.ci_halfwidth[k + 1]);
    }
}

}  // namespace

TEST_CASE("default convergence experiment trends down") {
    const BaxterChaconConfig cfg;
    const ConvergenceReport r = baxter_chacon_experiment(cfg);
    REQUIRE(r.n_values == std::vector<std::size_t>{4, 16, 64});
    check_trend(r);
    CHECK(r.exceedance_probs.back() < 0.05);
    for (std::size_t k = 0; k < r.n_values.size(); ++k) {
        CHECK(r.valid_trials[k] + r.excluded_trials[k] == cfg.n_trials);
        CHECK(r.valid_trials[k] > cfg.n_trials / 2);
    }
    // Large deviations are common at n = 4 and vanish by n = 64.
    CHECK(r.exceedance_probs.front() > 0.01);
}

TEST_CASE("reciprocal preset trends down") {
    const ConvergenceReport r = baxter_chacon_experiment(reciprocal_config());
    check_trend(r);
    CHECK(r.exceedance_probs.back() < 0.05);
}

TEST_CASE("degenerate statistics") {
    BaxterChaconConfig cfg;
    cfg.n_trials = 500;
    cfg.f = TestFunction::Constant;
    for (double p : baxter_chacon_experiment(cfg).exceedance_probs) {
        CHECK(p == 0.0);
    }
    cfg.f = TestFunction::Identity;
    cfg.epsilon = 100.0;  // beyond any excursion within the horizon
    for (double p : baxter_chacon_experiment(cfg).exceedance_probs) {
        CHECK(p == 0.0);
    }
}

TEST_CASE("reports are reproducible and independent of worker count") {
    BaxterChaconConfig cfg;
    cfg.n_trials = 2000;
    const ConvergenceReport a = baxter_chacon_experiment(cfg);
    const ConvergenceReport b = baxter_chacon_experiment(cfg);
    cfg.workers = 3;
    const ConvergenceReport c = baxter_chacon_experiment(cfg);
    CHECK(a.exceedance_probs == b.exceedance_probs);
    CHECK(a.exceedance_probs == c.exceedance_probs);
    CHECK(a.valid_trials == c.valid_trials);
    CHECK(to_csv(a) == to_csv(c));

    DeviceSyncConfig d;
    d.n_trials = 1000;
    const auto x = device_sync_experiment(d);
    d.workers = 4;
    const auto y = device_sync_experiment(d);
    CHECK(to_csv(x) == to_csv(y));
}

TEST_CASE("config validation") {
    BaxterChaconConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_WITH_AS(baxter_chacon_experiment(cfg), doctest::Contains("epsilon"), Error);
    cfg = {};
    cfg.n_trials = 50;
    CHECK_THROWS_WITH_AS(baxter_chacon_experiment(cfg), doctest::Contains("n_trials"), Error);
    cfg = {};
    cfg.n_list = {16, 4};
    CHECK_THROWS_WITH_AS(baxter_chacon_experiment(cfg), doctest::Contains("increasing"), Error);
    cfg.n_list = {};
    CHECK_THROWS_AS(baxter_chacon_experiment(cfg), Error);

    DeviceSyncConfig d;
    d.events = 1;
    CHECK_THROWS_AS(device_sync_experiment(d), Error);
}

TEST_CASE("single trials") {
    BaxterChaconConfig cfg;
    double stat = -1.0;
    std::size_t ok = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        if (baxter_chacon_trial(cfg, 64, s, stat)) {
            ++ok;
            // U - T < 1/64 is at most 4 walk steps of 1/16.
            CHECK(stat <= 0.25 + 1e-12);
        }
    }
    CHECK(ok > 100);
}

TEST_CASE("device readings") {
    CHECK(read_device(DeviceMap::Sign, 0.3, 1.0) == 1);
    CHECK(read_device(DeviceMap::Sign, -0.3, 1.0) == 0);
    CHECK(read_device(DeviceMap::NegatedSign, 0.3, 1.0) == 0);
    CHECK(read_device(DeviceMap::LevelParity, 2.0, 1.0) == 0);
    CHECK(read_device(DeviceMap::LevelParity, -3.0, 1.0) == 1);
}

TEST_CASE("disagreement mass and relabeling on a hand-built tensor") {
    TransitionTensor t;
    // Device 2 always reports the flipped symbol.
    t.at(0, 1, 1, 0) = 0.5;
    t.at(1, 0, 0, 1) = 0.25;
    t.at(1, 1, 0, 0) = 0.25;
    CHECK(disagreement_mass(t, {0, 1}) == doctest::Approx(1.0));
    const auto perm = canonical_relabeling(t);
    CHECK(perm == std::vector<std::size_t>{1, 0});
    CHECK(disagreement_mass(t, perm) == 0.0);

    TransitionTensor u;
    u.at(0, 0, 0, 0) = 0.7;
    u.at(0, 1, 0, 0) = 0.3;
    CHECK(disagreement_mass(u, {0, 1}) == doctest::Approx(0.3));
    CHECK(canonical_relabeling(u) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("synchronized devices never disagree") {
    DeviceSyncConfig cfg;
    cfg.sync = SyncMode::Exact;
    cfg.n_trials = 2000;
    for (const auto& row : device_sync_experiment(cfg).rows) {
        CHECK(row.disagreement == 0.0);
        CHECK(row.transitions > 0);
        double total = 0.0;
        for (double p : row.tensor.p) {
            total += p;
        }
        CHECK(total == doctest::Approx(1.0));
    }
    cfg.device2 = DeviceMap::NegatedSign;
    for (const auto& row : device_sync_experiment(cfg).rows) {
        CHECK(row.relabeling == std::vector<std::size_t>{1, 0});
        CHECK(row.disagreement == 0.0);
    }
}

TEST_CASE("delayed reading: small gaps disagree less") {
    const DeviceSyncReport r = device_sync_experiment(DeviceSyncConfig{});
    REQUIRE(r.rows.size() == 3);
    const auto& coarse = r.rows.front();
    const auto& fine = r.rows.back();
    CHECK(fine.n == 64);
    CHECK(fine.disagreement + fine.ci_halfwidth < coarse.disagreement - coarse.ci_halfwidth);
    CHECK(fine.disagreement < 0.05);
}

TEST_CASE("csv layout") {
    ConvergenceReport r;
    r.n_values = {4};
    r.exceedance_probs = {0.25};
    r.ci_halfwidth = {0.01};
    r.valid_trials = {100};
    r.excluded_trials = {0};
    CHECK(to_csv(r, {"seed=0xf2f2"}) == "# seed=0xf2f2\nn,exceedance,ci_halfwidth,trials\n4,0.25,0.01,100\n");
}
