#pragma once

// Entanglement measures and monogamy bookkeeping for a (particle, Bub, Laloe)
// pure state.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "friendsim/qstate.hpp"

namespace friendsim {

inline constexpr double kMonogamySlack = 1e-10;

enum class MeasureId { PurityConcurrence, WoottersConcurrence, Negativity };

/// sqrt(2 (1 - Tr rho^2)).
double concurrence_purity(const DensityMatrix& rho);

/// Two-qubit concurrence max(0, l1 - l2 - l3 - l4), l_i the decreasing square roots
/// of the eigenvalues of rho (sy⊗sy) rho* (sy⊗sy).
double concurrence_wootters(const DensityMatrix& rho);

/// (||rho^{T_A}||_1 - 1) / 2 with A the listed factors.
double negativity(const DensityMatrix& rho, std::span<const std::size_t> transposed_factors);

/// Squared pairwise measure used in monogamy reports. For Negativity this is
/// (2N)^2, which equals the squared concurrence on pure two-qubit states.
double squared_measure(const DensityMatrix& pair, MeasureId measure);

struct MonogamyReport {
    MeasureId measure = MeasureId::WoottersConcurrence;
    double c2_pB = 0.0;
    double c2_pL = 0.0;
    double c2_BL = 0.0;
    double c2_p_BL = 0.0;  // one-vs-rest, 2 (1 - Tr rho_p^2)

    // Coffman-Kundu-Wootters with the particle as focus: c2_pB + c2_pL <= c2_p_BL.
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;

    // The two pairings c2_pB + c2_BL and c2_pL + c2_BL against c2_p_BL.
    double line1_lhs = 0.0;
    double line2_lhs = 0.0;
    bool line1_holds = false;
    bool line2_holds = false;
};

/// psi must be a unit-norm ket with dims (2, dB, dL). Wootters needs dB = dL = 2.
MonogamyReport ckw_check(const Ket& psi, MeasureId measure = MeasureId::WoottersConcurrence);

enum class ScanConstruction {
    DetachedParticle,   // |up>_p ⊗ |Phi_d>_BL
    EntangledParticle,  // (|dn>_p |0>_B |0>_L + |up>_p |Phi'_d>_BL) / sqrt(2), Phi' shifted
};

struct ScanRow {
    std::size_t d = 0;
    double c2_BL = 0.0;     // 2 (1 - Tr rho_B^2)
    double proxy_pB = 0.0;  // negativity of rho_pB
    double c2_p_BL = 0.0;   // 2 (1 - Tr rho_p^2)
};

Ket scan_state(std::size_t d, ScanConstruction construction);

ScanRow monogamy_scan(std::size_t d, ScanConstruction construction = ScanConstruction::DetachedParticle);

/// CSV "d,c2_BL,proxy_pB,c2_p_BL".
std::string to_csv(const std::vector<ScanRow>& rows, const std::vector<std::string>& metadata = {});

}  // namespace friendsim
