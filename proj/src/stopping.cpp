#include "friendsim/stopping.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace friendsim {
namespace {

constexpr double kGridSlack = 1e-9;

}  // namespace

void validate(const PathModel& model) {
    if (!(model.dt > 0.0) || !std::isfinite(model.dt)) {
        throw Error("path step must be positive");
    }
    if (!(model.increment > 0.0) || !std::isfinite(model.increment)) {
        throw Error("walk increment must be positive");
    }
    if (!std::isfinite(model.start)) {
        throw Error("path start must be finite");
    }
    if (!(model.flip_prob >= 0.0 && model.flip_prob <= 1.0)) {
        throw Error("flip probability must lie in [0, 1]");
    }
}

PathStepper::PathStepper(const PathModel& model, std::uint64_t seed) : model_(model), rng_(seed) {
    validate(model_);
    if (model_.kind == PathModelKind::TwoStateMarkov) {
        position_ = model_.start >= 0.0 ? 1 : -1;
    }
}

double PathStepper::value() const noexcept {
    if (model_.kind == PathModelKind::TwoStateMarkov) {
        return static_cast<double>(position_);
    }
    return model_.start + static_cast<double>(position_) * model_.increment;
}

void PathStepper::step() {
    if (model_.kind == PathModelKind::SimpleRandomWalk) {
        if (bits_left_ == 0) {
            word_ = rng_.bits();
            bits_left_ = 64;
        }
        position_ += (word_ & 1U) != 0 ? 1 : -1;
        word_ >>= 1;
        --bits_left_;
    } else if (rng_.bernoulli(model_.flip_prob)) {
        position_ = -position_;
    }
    ++index_;
}

SamplePath simulate_path(const PathModel& model, double horizon, std::uint64_t seed) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw Error("horizon must be positive");
    }
    validate(model);
    const auto steps = static_cast<std::size_t>(std::floor(horizon / model.dt + kGridSlack));
    SamplePath path;
    path.model = model.kind;
    path.seed = seed;
    path.dt = model.dt;
    path.times.reserve(steps + 1);
    path.values.reserve(steps + 1);
    PathStepper stepper(model, seed);
    for (std::size_t k = 0;; ++k) {
        path.times.push_back(static_cast<double>(k) * model.dt);
        path.values.push_back(stepper.value());
        if (k == steps) {
            break;
        }
        stepper.step();
    }
    return path;
}

SamplePath simulate_path(PathModelKind kind, double horizon, double step, std::uint64_t seed, double flip_prob) {
    if (!(step > 0.0)) {
        throw Error("path step must be positive");
    }
    PathModel m;
    m.kind = kind;
    m.dt = step;
    m.increment = step;
    m.flip_prob = flip_prob;
    return simulate_path(m, horizon, seed);
}

StoppingTimeSequence::StoppingTimeSequence(std::vector<double> taus, double horizon)
    : taus_(std::move(taus)), horizon_(horizon) {
    if (!(horizon_ > 0.0)) {
        throw Error("stopping-time horizon must be positive");
    }
    for (std::size_t i = 0; i < taus_.size(); ++i) {
        if (!(taus_[i] >= 0.0) || !std::isfinite(taus_[i])) {
            throw Error(fmt::format("stopping time {} is negative or non-finite", i));
        }
        if (!(taus_[i] < horizon_)) {
            throw Error(fmt::format("stopping time {} = {} is not below the horizon {}", i, taus_[i], horizon_));
        }
        if (i > 0 && taus_[i] < taus_[i - 1]) {
            throw Error("stopping times must be non-decreasing");
        }
    }
}

std::size_t counting_process(const StoppingTimeSequence& taus, double t) {
    const auto& v = taus.taus();
    return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
}

std::size_t first_hitting_index(const SamplePath& path, double level) {
    if (path.values.empty()) {
        return 0;
    }
    const bool upward = level >= path.values.front();
    const double slack = 1e-12 * std::max(1.0, std::abs(level));
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const double x = path.values[k];
        if (upward ? x >= level - slack : x <= level + slack) {
            return k;
        }
    }
    return path.values.size();
}

std::size_t grid_index_at_or_after(double t, double dt) {
    return static_cast<std::size_t>(std::ceil(t / dt - kGridSlack));
}

std::size_t second_time_index(std::size_t first_index, double dt, std::size_t n, GapRule rule) {
    const double t = static_cast<double>(first_index) * dt;
    const double nn = static_cast<double>(n);
    switch (rule) {
        case GapRule::Exact:
            return first_index;
        case GapRule::CeilToGrid:
            return std::max(first_index, grid_index_at_or_after(std::ceil(t * nn - kGridSlack) / nn, dt));
        case GapRule::FixedDelay:
            return std::max(first_index, grid_index_at_or_after(t + 1.0 / nn, dt));
    }
    return first_index;
}

StoppingPair stopping_pair(const SamplePath& path, double level, std::size_t n, GapRule rule) {
    if (n == 0) {
        throw Error("sequence index n must be at least 1");
    }
    StoppingPair p;
    p.n = n;
    const std::size_t last = path.values.size();
    p.first_index = first_hitting_index(path, level);
    if (p.first_index >= last) {
        p.truncated = true;
        p.first_index = p.second_index = last - 1;
    } else {
        p.second_index = second_time_index(p.first_index, path.dt, n, rule);
        if (p.second_index >= last) {
            p.truncated = true;
            p.second_index = last - 1;
        }
    }
    p.first = path.times[p.first_index];
    p.second = path.times[p.second_index];
    return p;
}

std::vector<StoppingPair> make_stopping_pairs(const SamplePath& path, double level, std::size_t n_max,
                                              GapRule rule) {
    if (n_max < 1) {
        throw Error("n_max must be at least 1");
    }
    std::vector<StoppingPair> out;
    out.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        out.push_back(stopping_pair(path, level, n, rule));
    }
    return out;
}

StoppingTimeSequence band_exit_times(const SamplePath& path, double band, std::size_t max_events) {
    if (!(band > 0.0)) {
        throw Error("band must be positive");
    }
    std::vector<double> taus;
    double anchor = path.values.front();
    const double slack = 1e-12 * std::max(1.0, band);
    // The last grid point sits on the horizon itself and cannot host a stopping time.
    for (std::size_t k = 1; k + 1 < path.values.size() && taus.size() < max_events; ++k) {
        if (std::abs(path.values[k] - anchor) >= band - slack) {
            taus.push_back(path.times[k]);
            anchor = path.values[k];
        }
    }
    return {std::move(taus), path.times.back()};
}

}  // namespace friendsim
