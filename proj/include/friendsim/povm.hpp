#pragma once

// Projection-valued measurement processes driven by stopping times.
//
// A process attaches projector P_i to stopping time tau_i. Its value at time t is
//   M(t) = I(t)^{-1} sum_{tau_i <= t} P_i   for tau_1 <= t < T,   0 before tau_1,
// which is an average of projectors. The per-window accessors expose the
// projector active on [tau_i, tau_{i+1}).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "friendsim/qstate.hpp"
#include "friendsim/random.hpp"
#include "friendsim/stopping.hpp"

namespace friendsim {

inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kPartitionTol = 1e-12;

class MeasurementProcess {
public:
    const std::vector<Operator>& projectors() const noexcept { return projectors_; }
    const StoppingTimeSequence& taus() const noexcept { return taus_; }
    double horizon() const noexcept { return taus_.horizon(); }
    const Dims& dims() const noexcept { return projectors_.front().dims(); }
    std::size_t size() const noexcept { return projectors_.size(); }
    /// max |sum_i P_i - I| measured at construction.
    double partition_residual() const noexcept { return partition_residual_; }

private:
    friend MeasurementProcess build_kosher_process(std::vector<Operator>, StoppingTimeSequence);
    MeasurementProcess(std::vector<Operator> p, StoppingTimeSequence t, double residual)
        : projectors_(std::move(p)), taus_(std::move(t)), partition_residual_(residual) {}

    std::vector<Operator> projectors_;
    StoppingTimeSequence taus_;
    double partition_residual_ = 0.0;
};

/// Validates a projector family and attaches one stopping time per projector.
/// Errors: "not idempotent" (also non-Hermitian), "not a partition of unity",
/// "not orthogonal".
MeasurementProcess build_kosher_process(std::vector<Operator> projectors, StoppingTimeSequence taus);

using CountingFunction = std::function<std::size_t(double)>;

/// M(t) with the process's own counting process I(t).
Operator process_value(const MeasurementProcess& mp, double t);
/// M(t) with a caller-supplied counting function.
Operator process_value(const MeasurementProcess& mp, double t, const CountingFunction& counting);

/// M(t) when tau_i <= t < tau_{i+1} (tau_{n+1} := T), zero otherwise. i is zero-based.
Operator window_value(const MeasurementProcess& mp, std::size_t i, double t);

/// Index of the projector whose window contains t, or size() before tau_1.
std::size_t active_index(const MeasurementProcess& mp, double t);

/// P_i for the window containing t; zero before tau_1.
Operator active_projector(const MeasurementProcess& mp, double t);

struct MeasurementRecord {
    std::size_t outcome_index = 0;
    double probability = 0.0;
    DensityMatrix post_state;
    double at_tau = 0.0;
};

/// rho' = M^† rho M / Tr(M^† rho M), probability Tr(M^† rho M).
/// Throws "outcome impossible" when the trace is at or below 1e-14.
MeasurementRecord born_update(const DensityMatrix& rho, const Operator& m);

/// Tr(P_i rho) for every projector.
std::vector<double> outcome_probabilities(const DensityMatrix& rho, const MeasurementProcess& mp);

MeasurementRecord sample_measurement(const DensityMatrix& rho, const MeasurementProcess& mp, Rng& rng);
MeasurementRecord sample_measurement(const DensityMatrix& rho, const MeasurementProcess& mp, std::uint64_t seed);

/// Manifest format, one directive per line ('#' comments):
///   horizon <T>
///   projector <file> <tau>
/// Relative file paths resolve against the manifest's directory.
MeasurementProcess load_process_manifest(const std::filesystem::path& manifest);

}  // namespace friendsim
