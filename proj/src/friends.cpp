#include "friendsim/friends.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace friendsim {

ProtocolParams ProtocolParams::canonical() {
    ProtocolParams p;
    p.alpha = std::sqrt(1.0 / 3.0);
    p.beta = std::sqrt(2.0 / 3.0);
    p.alpha_t = std::sqrt(0.5);
    p.beta_t = std::sqrt(0.5);
    p.rho_overlap = 1.0 / std::numbers::sqrt2;
    p.phi = 0.0;
    return p;
}

void validate(const ProtocolParams& p) {
    const double n1 = std::norm(p.alpha) + std::norm(p.beta);
    if (std::abs(n1 - 1.0) > kEntryTol) {
        throw Error(fmt::format("alpha, beta: |alpha|^2 + |beta|^2 = {:.17g}, must be 1 within 1e-12", n1));
    }
    const double n2 = std::norm(p.alpha_t) + std::norm(p.beta_t);
    if (std::abs(n2 - 1.0) > kEntryTol) {
        throw Error(fmt::format("alpha_t, beta_t: |alpha_t|^2 + |beta_t|^2 = {:.17g}, must be 1 within 1e-12", n2));
    }
    if (!(p.rho_overlap >= -1.0 && p.rho_overlap <= 1.0)) {
        throw Error(fmt::format("rho: overlap {} is outside [-1, 1]", p.rho_overlap));
    }
    if (!std::isfinite(p.phi)) {
        throw Error("phi: phase must be finite");
    }
}

bool real_nonnegative_amplitudes(const ProtocolParams& p, double tol) {
    for (cplx a : {p.alpha, p.beta, p.alpha_t, p.beta_t}) {
        if (std::abs(a.imag()) > tol || a.real() < -tol) {
            return false;
        }
    }
    return true;
}

Ket prepare_joint_prior(const ProtocolParams& p) {
    validate(p);
    const double s = 1.0 / std::numbers::sqrt2;
    // index = 2 * particle + bub
    return Ket({2, 2}, {p.alpha * s, p.alpha_t * s, p.beta * s, p.beta_t * s});
}

double bub_purity_check(cplx overlap_h, cplx overlap_t) {
    const double h = std::norm(overlap_h);
    const double t = std::norm(overlap_t);
    if (h > 1.0 + kEntryTol || t > 1.0 + kEntryTol) {
        throw Error("overlap modulus exceeds 1");
    }
    return 0.5 * (h + t);
}

std::pair<cplx, cplx> laloe_bra(double rho_overlap, double phi) {
    const double s = std::sqrt(std::max(0.0, 1.0 - rho_overlap * rho_overlap));
    return {cplx{rho_overlap, 0.0}, std::polar(s, phi)};
}

Posterior conditional_posterior(const ProtocolParams& p) {
    const Ket prior = prepare_joint_prior(p);
    const auto [w0, w1] = laloe_bra(p.rho_overlap, p.phi);
    const std::vector<cplx> bra{w0, w1};
    Ket conditioned = contract_factor(prior, 1, bra);
    const double a = std::pow(conditioned.norm(), 2);
    if (!(a > kNormFloor)) {
        throw Error(fmt::format("annihilated posterior: A = {:.3g} at rho = {}, phi = {}", a, p.rho_overlap, p.phi));
    }
    Ket state = normalize(conditioned);
    return {std::move(state), std::move(conditioned), a};
}

namespace {

struct ClosedFormTerms {
    double numerator;
    double denominator;
};

ClosedFormTerms closed_form_terms(const ProtocolParams& p) {
    validate(p);
    const double a = std::abs(p.alpha);
    const double b = std::abs(p.beta);
    const double at = std::abs(p.alpha_t);
    const double bt = std::abs(p.beta_t);
    const double r = p.rho_overlap;
    const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
    const double c = std::cos(p.phi);
    return {a * a * r * r + 2.0 * a * at * r * s * c + at * at * (1.0 - r * r),
            1.0 + 2.0 * (a * at + b * bt) * r * s * c};
}

}  // namespace

double normalization_closed_form(const ProtocolParams& p) { return 0.5 * closed_form_terms(p).denominator; }

double prob_spin_down(const ProtocolParams& p) {
    const auto t = closed_form_terms(p);
    if (!(0.5 * t.denominator > kNormFloor)) {
        throw Error(fmt::format("annihilated posterior: denominator {:.3g} at rho = {}, phi = {}", t.denominator,
                                p.rho_overlap, p.phi));
    }
    return t.numerator / t.denominator;
}

double prob_spin_down_from_posterior(const ProtocolParams& p) {
    return std::norm(conditional_posterior(p).state[kSpinDown]);
}

SweepTable fig1_sweep(const ProtocolParams& p, std::size_t phi_points) {
    if (phi_points < 2) {
        throw Error("phi_points must be at least 2");
    }
    validate(p);
    SweepTable table;
    table.params = p;
    table.phi_grid.reserve(phi_points);
    table.p_down.reserve(phi_points);
    const double span = 4.0 * std::numbers::pi;
    for (std::size_t k = 0; k < phi_points; ++k) {
        ProtocolParams q = p;
        q.phi = span * static_cast<double>(k) / static_cast<double>(phi_points - 1);
        table.phi_grid.push_back(q.phi);
        try {
            table.p_down.emplace_back(prob_spin_down(q));
        } catch (const Error&) {
            table.p_down.emplace_back(std::nullopt);
        }
    }
    return table;
}

std::string to_csv(const SweepTable& table, const std::vector<std::string>& metadata) {
    std::string out;
    for (const auto& m : metadata) {
        out += "# " + m + "\n";
    }
    out += "phi,p_down,flag\n";
    for (std::size_t k = 0; k < table.phi_grid.size(); ++k) {
        if (table.p_down[k]) {
            out += fmt::format("{:.17g},{:.17g},ok\n", table.phi_grid[k], *table.p_down[k]);
        } else {
            out += fmt::format("{:.17g},,annihilated\n", table.phi_grid[k]);
        }
    }
    return out;
}

BellCoefficients bell_projection_coeffs(const DensityMatrix& joint, std::span<const cplx> u0,
                                        std::span<const cplx> u1) {
    const Dims& dims = joint.dims();
    if (dims.size() != 2 || dims[0] != dims[1]) {
        throw Error("bell projection needs a (Bub, Laloe) state with equal factor dimensions");
    }
    const std::size_t d = dims[0];
    if (u0.size() != d || u1.size() != d) {
        throw Error("basis vectors must match the factor dimension");
    }
    cplx g01 = 0.0;
    double g00 = 0.0;
    double g11 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        g00 += std::norm(u0[i]);
        g11 += std::norm(u1[i]);
        g01 += std::conj(u0[i]) * u1[i];
    }
    if (std::abs(g00 - 1.0) > kEntryTol || std::abs(g11 - 1.0) > kEntryTol || std::abs(g01) > kEntryTol) {
        throw Error("non-orthonormal basis pair");
    }
    // Restrict to span{u0, u1} ⊗ span{u0, u1}: r(ab, cd) = <u_a u_b| rho |u_c u_d>.
    const std::span<const cplx> basis[2] = {u0, u1};
    const CMatrix& m = joint.matrix();
    auto amp = [&](std::size_t a, std::size_t b, std::size_t i) {
        // component i of |u_a> ⊗ |u_b>
        return basis[a][i / d] * basis[b][i % d];
    };
    CMatrix r(4, 4);
    const std::size_t n = d * d;
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t y = 0; y < 4; ++y) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const cplx left = std::conj(amp(x / 2, x % 2, i));
                if (left == cplx{}) {
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    acc += left * m(i, j) * amp(y / 2, y % 2, j);
                }
            }
            r(x, y) = acc;
        }
    }
    const double tr = r.trace().real();
    if (!(tr > kNormFloor)) {
        throw Error(fmt::format("projected state vanishes: trace {:.3g}", tr));
    }
    // rows/cols: 0 = |00>, 1 = |01>, 2 = |10>, 3 = |11>
    return {r(1, 2) / tr, r(2, 1) / tr};
}

BellCoefficients bell_projection_coeffs(const DensityMatrix& joint) {
    const Dims& dims = joint.dims();
    if (dims.size() != 2 || dims[0] != dims[1] || dims[0] < 2) {
        throw Error("bell projection needs a (Bub, Laloe) state with equal factor dimensions");
    }
    std::vector<cplx> e0(dims[0]);
    std::vector<cplx> e1(dims[0]);
    e0[0] = 1.0;
    e1[1] = 1.0;
    return bell_projection_coeffs(joint, e0, e1);
}

}  // namespace friendsim
