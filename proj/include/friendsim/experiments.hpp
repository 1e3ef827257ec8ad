#pragma once

// Monte Carlo experiments on paired stopping times:
//  - convergence of two clocks that share a path (exceedance of |f(X_T) - f(X_U)|),
//  - synchronization of two finite-alphabet devices read at those clocks.
//
// Every trial draws its own stream from derive_seed(seed, n_index, trial), and
// results are reduced as integer counts, so reports do not depend on the number
// of workers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "friendsim/stopping.hpp"

namespace friendsim {

enum class TestFunction { Identity, Constant, Reciprocal, Square };
enum class ExperimentMode { HitVsCeil, CeilVsDelay };
enum class Distance { Absolute, Squared };

double apply(TestFunction f, double x);

struct BaxterChaconConfig {
    PathModel model{PathModelKind::SimpleRandomWalk, 1.0 / 256.0, 1.0 / 16.0, 0.0, 0.0};
    double level = 1.0;
    double horizon = 16.0;
    TestFunction f = TestFunction::Identity;
    ExperimentMode mode = ExperimentMode::HitVsCeil;
    Distance distance = Distance::Absolute;
    double epsilon = 0.5;
    std::vector<std::size_t> n_list{4, 16, 64};
    std::size_t n_trials = 10000;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 1;
};

/// Preset with reciprocal readings on a walk started at a positive level.
BaxterChaconConfig reciprocal_config();

struct ConvergenceReport {
    std::vector<std::size_t> n_values;
    std::vector<double> exceedance_probs;
    std::vector<double> ci_halfwidth;  // 95% normal-approximation binomial half-width
    std::vector<std::size_t> valid_trials;
    std::vector<std::size_t> excluded_trials;  // horizon truncation or undefined f
    double epsilon = 0.0;
    std::size_t n_trials = 0;
};

ConvergenceReport baxter_chacon_experiment(const BaxterChaconConfig& config);

/// Single-trial statistic, exposed for tests. Returns false when the trial is excluded.
bool baxter_chacon_trial(const BaxterChaconConfig& config, std::size_t n, std::uint64_t trial_seed,
                         double& statistic);

enum class DeviceMap { Sign, NegatedSign, LevelParity };
enum class SyncMode { Exact, Delay, CeilToGrid };

/// Reading in {0, 1}. LevelParity uses round(x / band) mod 2.
std::size_t read_device(DeviceMap map, double x, double band);

struct DeviceSyncConfig {
    PathModel model{PathModelKind::SimpleRandomWalk, 1.0 / 256.0, 1.0 / 16.0, 0.5, 0.0};
    double band = 1.0;
    double horizon = 16.0;
    std::size_t events = 2;  // stopping times per trial; events - 1 transitions
    DeviceMap device1 = DeviceMap::Sign;
    DeviceMap device2 = DeviceMap::Sign;
    SyncMode sync = SyncMode::Delay;
    std::vector<std::size_t> n_list{4, 16, 64};
    std::size_t n_trials = 10000;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 1;
};

inline constexpr std::size_t kDeviceAlphabet = 2;

/// Empirical joint transition frequencies: device 1 goes i -> k while device 2
/// goes j -> l between consecutive stopping times.
struct TransitionTensor {
    std::vector<double> p = std::vector<double>(kDeviceAlphabet * kDeviceAlphabet * kDeviceAlphabet * kDeviceAlphabet);

    double& at(std::size_t i, std::size_t k, std::size_t j, std::size_t l) {
        return p[((i * kDeviceAlphabet + k) * kDeviceAlphabet + j) * kDeviceAlphabet + l];
    }
    double at(std::size_t i, std::size_t k, std::size_t j, std::size_t l) const {
        return p[((i * kDeviceAlphabet + k) * kDeviceAlphabet + j) * kDeviceAlphabet + l];
    }
};

/// Mass where the devices disagree (i != perm[j] or k != perm[l]).
double disagreement_mass(const TransitionTensor& t, const std::vector<std::size_t>& perm);

/// Relabeling of device 2's alphabet that minimizes disagreement (first minimum in
/// lexicographic permutation order).
std::vector<std::size_t> canonical_relabeling(const TransitionTensor& t);

struct DeviceSyncRow {
    std::size_t n = 0;
    TransitionTensor tensor;
    std::vector<std::size_t> relabeling;
    double disagreement = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t transitions = 0;
    std::size_t valid_trials = 0;
    std::size_t discarded_trials = 0;  // fewer than two usable stopping times
};

struct DeviceSyncReport {
    std::vector<DeviceSyncRow> rows;
    std::size_t n_trials = 0;
};

DeviceSyncReport device_sync_experiment(const DeviceSyncConfig& config);

/// CSV "n,exceedance,ci_halfwidth,trials" preceded by "# key=value" metadata lines.
std::string to_csv(const ConvergenceReport& report, const std::vector<std::string>& metadata = {});

/// CSV "n,disagreement,ci_halfwidth,trials".
std::string to_csv(const DeviceSyncReport& report, const std::vector<std::string>& metadata = {});

}  // namespace friendsim
