#include "friendsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace friendsim {
namespace {

constexpr double kZ95 = 1.959963984540054;

// Runs fn(trial, acc) over [0, n_trials) split into contiguous chunks, one per
// worker, and sums the per-chunk accumulators in chunk order.
template <class Acc, class Fn>
Acc run_trials(std::size_t n_trials, unsigned workers, Fn fn) {
    const std::size_t w = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, n_trials));
    std::vector<Acc> partial(w);
    auto chunk = [&](std::size_t c) {
        const std::size_t begin = n_trials * c / w;
        const std::size_t end = n_trials * (c + 1) / w;
        for (std::size_t t = begin; t < end; ++t) {
            fn(t, partial[c]);
        }
    };
    if (w == 1) {
        chunk(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (std::size_t c = 0; c < w; ++c) {
            pool.emplace_back(chunk, c);
        }
    }
    Acc total{};
    for (const Acc& a : partial) {
        total += a;
    }
    return total;
}

struct ExceedanceCounts {
    std::size_t valid = 0;
    std::size_t excluded = 0;
    std::size_t exceed = 0;
    ExceedanceCounts& operator+=(const ExceedanceCounts& o) {
        valid += o.valid;
        excluded += o.excluded;
        exceed += o.exceed;
        return *this;
    }
};

struct TransitionCounts {
    std::array<std::size_t, kDeviceAlphabet * kDeviceAlphabet * kDeviceAlphabet * kDeviceAlphabet> cells{};
    std::size_t transitions = 0;
    std::size_t valid = 0;
    std::size_t discarded = 0;
    TransitionCounts& operator+=(const TransitionCounts& o) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            cells[i] += o.cells[i];
        }
        transitions += o.transitions;
        valid += o.valid;
        discarded += o.discarded;
        return *this;
    }
};

std::size_t grid_steps(double horizon, double dt) {
    return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
}

double distance(Distance d, double a, double b) {
    const double diff = a - b;
    return d == Distance::Absolute ? std::abs(diff) : diff * diff;
}

void check_n_list(const std::vector<std::size_t>& n_list) {
    if (n_list.empty()) {
        throw Error("n_list must not be empty");
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] == 0) {
            throw Error("n_list entries must be positive");
        }
        if (i > 0 && n_list[i] <= n_list[i - 1]) {
            throw Error("n_list must be strictly increasing");
        }
    }
}

double wald_halfwidth(double p, std::size_t n) {
    return n == 0 ? 0.0 : kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

double apply(TestFunction f, double x) {
    switch (f) {
        case TestFunction::Identity:
            return x;
        case TestFunction::Constant:
            return 1.0;
        case TestFunction::Reciprocal:
            return 1.0 / x;
        case TestFunction::Square:
            return x * x;
    }
    return x;
}

BaxterChaconConfig reciprocal_config() {
    BaxterChaconConfig c;
    c.mode = ExperimentMode::CeilVsDelay;
    c.f = TestFunction::Reciprocal;
    c.model.start = 2.0;
    c.level = 3.0;
    c.epsilon = 0.05;
    return c;
}

bool baxter_chacon_trial(const BaxterChaconConfig& config, std::size_t n, std::uint64_t trial_seed,
                         double& statistic) {
    const PathModel& m = config.model;
    const std::size_t last = grid_steps(config.horizon, m.dt);
    PathStepper s(m, trial_seed);
    const bool upward = config.level >= s.value();
    const double slack = 1e-12 * std::max(1.0, std::abs(config.level));
    auto hit = [&](double x) { return upward ? x >= config.level - slack : x <= config.level + slack; };
    while (!hit(s.value())) {
        if (s.index() >= last) {
            return false;
        }
        s.step();
    }
    const std::size_t t_idx = s.index();

    std::size_t a_idx = t_idx;
    std::size_t b_idx = second_time_index(t_idx, m.dt, n, GapRule::CeilToGrid);
    if (config.mode == ExperimentMode::CeilVsDelay) {
        // tau_n = T rounded up to 1/n, xi_n = T + 1/n; |tau_n - xi_n| <= 1/n.
        a_idx = b_idx;
        b_idx = second_time_index(t_idx, m.dt, n, GapRule::FixedDelay);
    }
    const std::size_t lo = std::min(a_idx, b_idx);
    const std::size_t hi = std::max(a_idx, b_idx);
    if (hi > last) {
        return false;
    }
    while (s.index() < lo) {
        s.step();
    }
    const double x_lo = s.value();
    while (s.index() < hi) {
        s.step();
    }
    const double x_hi = s.value();
    const double x_a = a_idx == lo ? x_lo : x_hi;
    const double x_b = b_idx == lo ? x_lo : x_hi;

    const double fa = apply(config.f, x_a);
    const double fb = apply(config.f, x_b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) {
        return false;
    }
    statistic = distance(config.distance, fa, fb);
    return true;
}

ConvergenceReport baxter_chacon_experiment(const BaxterChaconConfig& config) {
    if (!(config.epsilon > 0.0)) {
        throw Error("epsilon must be positive");
    }
    if (config.n_trials < 100) {
        throw Error("n_trials must be at least 100");
    }
    if (!(config.horizon > 0.0)) {
        throw Error("horizon must be positive");
    }
    check_n_list(config.n_list);
    validate(config.model);

    ConvergenceReport r;
    r.epsilon = config.epsilon;
    r.n_trials = config.n_trials;
    for (std::size_t k = 0; k < config.n_list.size(); ++k) {
        const std::size_t n = config.n_list[k];
        const auto counts =
            run_trials<ExceedanceCounts>(config.n_trials, config.workers, [&](std::size_t t, ExceedanceCounts& acc) {
                double stat = 0.0;
                if (!baxter_chacon_trial(config, n, derive_seed(config.seed, k, t), stat)) {
                    ++acc.excluded;
                    return;
                }
                ++acc.valid;
                if (stat > config.epsilon) {
                    ++acc.exceed;
                }
            });
        const double p = counts.valid == 0 ? 0.0 : static_cast<double>(counts.exceed) / static_cast<double>(counts.valid);
        r.n_values.push_back(n);
        r.exceedance_probs.push_back(p);
        r.ci_halfwidth.push_back(wald_halfwidth(p, counts.valid));
        r.valid_trials.push_back(counts.valid);
        r.excluded_trials.push_back(counts.excluded);
    }
    return r;
}

std::size_t read_device(DeviceMap map, double x, double band) {
    switch (map) {
        case DeviceMap::Sign:
            return x > 0.0 ? 1 : 0;
        case DeviceMap::NegatedSign:
            return x > 0.0 ? 0 : 1;
        case DeviceMap::LevelParity: {
            const auto level = static_cast<long long>(std::llround(x / band));
            return static_cast<std::size_t>(((level % 2) + 2) % 2);
        }
    }
    return 0;
}

double disagreement_mass(const TransitionTensor& t, const std::vector<std::size_t>& perm) {
    double mass = 0.0;
    for (std::size_t i = 0; i < kDeviceAlphabet; ++i) {
        for (std::size_t k = 0; k < kDeviceAlphabet; ++k) {
            for (std::size_t j = 0; j < kDeviceAlphabet; ++j) {
                for (std::size_t l = 0; l < kDeviceAlphabet; ++l) {
                    if (i != perm[j] || k != perm[l]) {
                        mass += t.at(i, k, j, l);
                    }
                }
            }
        }
    }
    return mass;
}

std::vector<std::size_t> canonical_relabeling(const TransitionTensor& t) {
    std::vector<std::size_t> perm(kDeviceAlphabet);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> best = perm;
    double best_mass = disagreement_mass(t, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double m = disagreement_mass(t, perm);
        if (m < best_mass) {
            best_mass = m;
            best = perm;
        }
    }
    return best;
}

namespace {

void device_sync_trial(const DeviceSyncConfig& config, std::size_t n, std::uint64_t seed, TransitionCounts& acc) {
    const PathModel& m = config.model;
    const std::size_t last = grid_steps(config.horizon, m.dt);
    PathStepper s(m, seed);
    std::vector<double> values{s.value()};
    auto extend_to = [&](std::size_t idx) {
        while (s.index() < idx) {
            s.step();
            values.push_back(s.value());
        }
    };

    std::vector<std::size_t> taus;
    double anchor = values.front();
    const double slack = 1e-12 * std::max(1.0, config.band);
    while (taus.size() < config.events && s.index() + 1 < last) {
        extend_to(s.index() + 1);
        if (std::abs(values.back() - anchor) >= config.band - slack) {
            taus.push_back(s.index());
            anchor = values.back();
        }
    }

    std::vector<std::size_t> r1;
    std::vector<std::size_t> r2;
    for (std::size_t tau : taus) {
        std::size_t xi = tau;
        switch (config.sync) {
            case SyncMode::Exact:
                break;
            case SyncMode::Delay:
                xi = second_time_index(tau, m.dt, n, GapRule::FixedDelay);
                break;
            case SyncMode::CeilToGrid:
                xi = second_time_index(tau, m.dt, n, GapRule::CeilToGrid);
                break;
        }
        if (xi > last) {
            break;
        }
        extend_to(xi);
        r1.push_back(read_device(config.device1, values[tau], config.band));
        r2.push_back(read_device(config.device2, values[xi], config.band));
    }
    if (r1.size() < 2) {
        ++acc.discarded;
        return;
    }
    ++acc.valid;
    for (std::size_t e = 0; e + 1 < r1.size(); ++e) {
        const std::size_t cell = ((r1[e] * kDeviceAlphabet + r1[e + 1]) * kDeviceAlphabet + r2[e]) * kDeviceAlphabet + r2[e + 1];
        ++acc.cells[cell];
        ++acc.transitions;
    }
}

}  // namespace

DeviceSyncReport device_sync_experiment(const DeviceSyncConfig& config) {
    if (config.n_trials < 100) {
        throw Error("n_trials must be at least 100");
    }
    if (config.events < 2) {
        throw Error("events must be at least 2");
    }
    if (!(config.band > 0.0)) {
        throw Error("band must be positive");
    }
    if (!(config.horizon > 0.0)) {
        throw Error("horizon must be positive");
    }
    check_n_list(config.n_list);
    validate(config.model);

    DeviceSyncReport report;
    report.n_trials = config.n_trials;
    for (std::size_t k = 0; k < config.n_list.size(); ++k) {
        const std::size_t n = config.n_list[k];
        const auto counts = run_trials<TransitionCounts>(
            config.n_trials, config.workers,
            [&](std::size_t t, TransitionCounts& acc) { device_sync_trial(config, n, derive_seed(config.seed, k, t), acc); });
        DeviceSyncRow row;
        row.n = n;
        row.transitions = counts.transitions;
        row.valid_trials = counts.valid;
        row.discarded_trials = counts.discarded;
        if (counts.transitions > 0) {
            for (std::size_t c = 0; c < counts.cells.size(); ++c) {
                row.tensor.p[c] = static_cast<double>(counts.cells[c]) / static_cast<double>(counts.transitions);
            }
        }
        row.relabeling = canonical_relabeling(row.tensor);
        row.disagreement = disagreement_mass(row.tensor, row.relabeling);
        row.ci_halfwidth = wald_halfwidth(row.disagreement, row.transitions);
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string metadata_block(const std::vector<std::string>& metadata) {
    std::string out;
    for (const auto& m : metadata) {
        out += "# " + m + "\n";
    }
    return out;
}

}  // namespace

std::string to_csv(const ConvergenceReport& report, const std::vector<std::string>& metadata) {
    std::string out = metadata_block(metadata);
    out += "n,exceedance,ci_halfwidth,trials\n";
    for (std::size_t i = 0; i < report.n_values.size(); ++i) {
        out += fmt::format("{},{:.17g},{:.17g},{}\n", report.n_values[i], report.exceedance_probs[i],
                           report.ci_halfwidth[i], report.valid_trials[i]);
    }
    return out;
}

std::string to_csv(const DeviceSyncReport& report, const std::vector<std::string>& metadata) {
    std::string out = metadata_block(metadata);
    out += "n,disagreement,ci_halfwidth,trials\n";
    for (const auto& row : report.rows) {
        out += fmt::format("{},{:.17g},{:.17g},{}\n", row.n, row.disagreement, row.ci_halfwidth, row.valid_trials);
    }
    return out;
}

}  // namespace friendsim
