#pragma once

// Sample paths on a discrete time grid, stopping times adapted to them, and the
// counting process I(t).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "friendsim/random.hpp"

namespace friendsim {

enum class PathModelKind { SimpleRandomWalk, TwoStateMarkov };

struct PathModel {
    PathModelKind kind = PathModelKind::SimpleRandomWalk;
    double dt = 1.0;         // grid spacing
    double increment = 1.0;  // random-walk jump size
    double start = 0.0;      // walk start; TwoStateMarkov starts at +1 if start >= 0, else -1
    double flip_prob = 0.0;  // TwoStateMarkov per-step flip probability
};

void validate(const PathModel& model);

struct SamplePath {
    std::vector<double> times;
    std::vector<double> values;
    PathModelKind model = PathModelKind::SimpleRandomWalk;
    std::uint64_t seed = 0;
    double dt = 1.0;
};

/// Generates a path one grid step at a time. Looks only at its own past.
class PathStepper {
public:
    PathStepper(const PathModel& model, std::uint64_t seed);

    std::size_t index() const noexcept { return index_; }
    double time() const noexcept { return static_cast<double>(index_) * model_.dt; }
    double value() const noexcept;
    void step();

private:
    PathModel model_;
    Rng rng_;
    std::size_t index_ = 0;
    std::int64_t position_ = 0;  // walk: net up-steps; Markov: +1 / -1
    std::uint64_t word_ = 0;
    int bits_left_ = 0;
};

/// Path on the grid 0, dt, 2dt, ... up to and including horizon.
SamplePath simulate_path(const PathModel& model, double horizon, std::uint64_t seed);

/// Convenience form: grid spacing and walk jump size both equal to `step`.
SamplePath simulate_path(PathModelKind kind, double horizon, double step, std::uint64_t seed,
                         double flip_prob = 0.0);

class StoppingTimeSequence {
public:
    StoppingTimeSequence(std::vector<double> taus, double horizon);

    const std::vector<double>& taus() const noexcept { return taus_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return taus_.size(); }
    bool empty() const noexcept { return taus_.empty(); }

private:
    std::vector<double> taus_;
    double horizon_;
};

/// I(t) = #{i : tau_i <= t}; right-continuous, unit jumps at each tau_i.
std::size_t counting_process(const StoppingTimeSequence& taus, double t);

/// First grid index at which the path reaches `level` (from below when level is
/// at or above the start value, from above otherwise). Returns size() if never.
std::size_t first_hitting_index(const SamplePath& path, double level);

/// Grid index of the smallest grid time >= t (t >= 0).
std::size_t grid_index_at_or_after(double t, double dt);

enum class GapRule {
    Exact,       // U = T
    CeilToGrid,  // U = T rounded up to the next multiple of 1/n
    FixedDelay,  // U = T + 1/n
};

struct StoppingPair {
    std::size_t n = 0;
    double first = 0.0;   // T(n)
    double second = 0.0;  // U(n)
    std::size_t first_index = 0;
    std::size_t second_index = 0;
    bool truncated = false;  // level not reached, or U beyond the path's horizon
};

/// Grid index of U(n) given the grid index of T(n).
std::size_t second_time_index(std::size_t first_index, double dt, std::size_t n, GapRule rule);

StoppingPair stopping_pair(const SamplePath& path, double level, std::size_t n, GapRule rule);

/// Pairs for n = 1..n_max. T(n) is the level hitting time (identical for every n);
/// U(n) follows the gap rule.
std::vector<StoppingPair> make_stopping_pairs(const SamplePath& path, double level, std::size_t n_max,
                                              GapRule rule);

/// Successive band exits: tau_{i+1} is the first grid time after tau_i with
/// |X - X_{tau_i}| >= band, starting from tau_0 = 0 (not recorded). Stops after
/// max_events or at the horizon.
StoppingTimeSequence band_exit_times(const SamplePath& path, double band, std::size_t max_events);

}  // namespace friendsim
