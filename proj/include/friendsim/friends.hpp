#pragma once

// The two-friend setup. Bub's instrument records the particle's spin, giving the
// joint prior on (particle, Bub)
//
//   |Psi> = (a|dn>|0> + b|up>|0> + at|dn>|1> + bt|up>|1>) / sqrt(2),
//
// and Laloe's detector bra <0|_L overlaps Bub's basis as
//   <0_L|0_B> = rho,   <0_L|1_B> = e^{i phi} sqrt(1 - rho^2).
// Conditioning on Laloe's "0" gives the particle posterior and the probability
// that Bub sees spin down.
//
// Particle basis: index 0 = spin down, index 1 = spin up.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "friendsim/qstate.hpp"

namespace friendsim {

struct ProtocolParams {
    cplx alpha;
    cplx beta;
    cplx alpha_t;
    cplx beta_t;
    double rho_overlap = 0.0;
    double phi = 0.0;

    /// alpha = sqrt(1/3), beta = sqrt(2/3), alpha_t = beta_t = sqrt(1/2), rho = 1/sqrt(2), phi = 0.
    static ProtocolParams canonical();
};

/// Throws naming the offending field when an invariant fails.
void validate(const ProtocolParams& p);

/// True when all four amplitudes are real and non-negative (closed forms apply).
bool real_nonnegative_amplitudes(const ProtocolParams& p, double tol = 0.0);

inline constexpr std::size_t kSpinDown = 0;
inline constexpr std::size_t kSpinUp = 1;

/// Ket on (particle, Bub) with dims (2, 2).
Ket prepare_joint_prior(const ProtocolParams& p);

/// (|<up|h>|^2 + |<dn|t>|^2) / 2; equals 1 exactly when both overlaps have unit modulus.
double bub_purity_check(cplx overlap_h, cplx overlap_t);

/// Laloe's detector bra expressed on Bub's basis: (<0_L|0_B>, <0_L|1_B>).
std::pair<cplx, cplx> laloe_bra(double rho_overlap, double phi);

struct Posterior {
    Ket state;            // normalized particle state
    Ket unnormalized;     // <0_L|Psi>
    double normalization;  // A = |<0_L|Psi>|^2
};

/// Contracts the prior's Bub factor with Laloe's bra and normalizes.
/// Throws "annihilated posterior" when A <= 1e-14.
Posterior conditional_posterior(const ProtocolParams& p);

/// Closed-form A for real non-negative amplitudes.
double normalization_closed_form(const ProtocolParams& p);

/// Closed-form P(spin down) using amplitude moduli. Throws "annihilated posterior"
/// when the denominator is at or below 1e-14.
double prob_spin_down(const ProtocolParams& p);

/// |<dn|posterior>|^2 via the state pipeline.
double prob_spin_down_from_posterior(const ProtocolParams& p);

struct SweepTable {
    std::vector<double> phi_grid;
    std::vector<std::optional<double>> p_down;  // empty where the posterior is annihilated
    ProtocolParams params;
};

inline constexpr std::size_t kDefaultPhiPoints = 401;

/// prob_spin_down on the uniform grid phi_k = 4 pi k / (points - 1), k = 0..points-1.
SweepTable fig1_sweep(const ProtocolParams& p, std::size_t phi_points = kDefaultPhiPoints);

/// CSV "phi,p_down,flag" with flag "ok" or "annihilated"; metadata as "# key=value".
std::string to_csv(const SweepTable& table, const std::vector<std::string>& metadata = {});

struct BellCoefficients {
    cplx p01;  // coefficient of (|0><1|) ⊗ (|1><0|)
    cplx p10;  // coefficient of (|1><0|) ⊗ (|0><1|)
};

/// Projects a (Bub, Laloe) state onto span{u0, u1} on both factors, renormalizes,
/// and reads the two off-diagonal exchange coefficients.
BellCoefficients bell_projection_coeffs(const DensityMatrix& joint, std::span<const cplx> u0,
                                        std::span<const cplx> u1);

/// Computational-basis pair |0>, |1>.
BellCoefficients bell_projection_coeffs(const DensityMatrix& joint);

}  // namespace friendsim
