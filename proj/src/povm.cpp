#include "friendsim/povm.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "friendsim/matrix_io.hpp"

namespace friendsim {

MeasurementProcess build_kosher_process(std::vector<Operator> projectors, StoppingTimeSequence taus) {
    if (projectors.empty()) {
        throw Error("projector list must not be empty");
    }
    if (taus.size() != projectors.size()) {
        throw Error(fmt::format("{} projectors but {} stopping times", projectors.size(), taus.size()));
    }
    const Dims& dims = projectors.front().dims();
    for (const Operator& p : projectors) {
        if (p.dims() != dims) {
            throw Error("projectors act on different spaces");
        }
    }
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const CMatrix& p = projectors[i].matrix();
        const double herm = hermiticity_residual(p);
        const double idem = max_abs_diff(p * p, p);
        if (herm > kProjectorTol || idem > kProjectorTol) {
            throw Error(fmt::format("not idempotent: projector {} has |P^2 - P| = {:.3g}, |P - P^dag| = {:.3g}", i,
                                    idem, herm));
        }
    }
    CMatrix sum = CMatrix::zeros(projectors.front().size());
    for (const Operator& p : projectors) {
        sum += p.matrix();
    }
    const double residual = max_abs_diff(sum, CMatrix::identity(sum.rows()));
    if (residual > kPartitionTol) {
        throw Error(fmt::format("not a partition of unity: |sum P_i - I| = {:.3g}", residual));
    }
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        for (std::size_t j = i + 1; j < projectors.size(); ++j) {
            const CMatrix prod = projectors[i].matrix() * projectors[j].matrix();
            const double off = max_abs_diff(prod, CMatrix::zeros(prod.rows()));
            if (off > kProjectorTol) {
                throw Error(fmt::format("not orthogonal: |P_{} P_{}| = {:.3g}", i, j, off));
            }
        }
    }
    return {std::move(projectors), std::move(taus), residual};
}

Operator process_value(const MeasurementProcess& mp, double t) {
    return process_value(mp, t, [&](double s) { return counting_process(mp.taus(), s); });
}

Operator process_value(const MeasurementProcess& mp, double t, const CountingFunction& counting) {
    if (!(t >= 0.0)) {
        throw Error("process time must be non-negative");
    }
    if (t >= mp.horizon()) {
        throw Error(fmt::format("process time {} is not below the horizon {}", t, mp.horizon()));
    }
    const auto& taus = mp.taus().taus();
    CMatrix acc = CMatrix::zeros(mp.projectors().front().size());
    std::size_t occurred = 0;
    for (std::size_t i = 0; i < taus.size() && taus[i] <= t; ++i) {
        acc += mp.projectors()[i].matrix();
        ++occurred;
    }
    if (occurred == 0) {
        return {mp.dims(), std::move(acc)};
    }
    const std::size_t count = counting(t);
    if (count == 0) {
        throw Error("counting function returned 0 after the first stopping time");
    }
    acc *= cplx{1.0 / static_cast<double>(count)};
    return {mp.dims(), std::move(acc)};
}

Operator window_value(const MeasurementProcess& mp, std::size_t i, double t) {
    const auto& taus = mp.taus().taus();
    if (i >= taus.size()) {
        throw Error("window index out of range");
    }
    const double end = i + 1 < taus.size() ? taus[i + 1] : mp.horizon();
    if (taus[i] <= t && t < end) {
        return process_value(mp, t);
    }
    return {mp.dims(), CMatrix::zeros(mp.projectors().front().size())};
}

std::size_t active_index(const MeasurementProcess& mp, double t) {
    const std::size_t count = counting_process(mp.taus(), t);
    return count == 0 ? mp.size() : count - 1;
}

Operator active_projector(const MeasurementProcess& mp, double t) {
    if (t >= mp.horizon()) {
        throw Error("process time is not below the horizon");
    }
    const std::size_t i = active_index(mp, t);
    if (i == mp.size()) {
        return {mp.dims(), CMatrix::zeros(mp.projectors().front().size())};
    }
    return mp.projectors()[i];
}

MeasurementRecord born_update(const DensityMatrix& rho, const Operator& m) {
    if (m.dims() != rho.dims()) {
        throw Error("born_update: operator and state dims differ");
    }
    const CMatrix& mm = m.matrix();
    CMatrix post = mm.adjoint() * rho.matrix() * mm;
    const double p = post.trace().real();
    if (!(p > kNormFloor)) {
        throw Error(fmt::format("outcome impossible: Tr(M^dag rho M) = {:.3g}", p));
    }
    post *= cplx{1.0 / p};
    return {0, std::min(1.0, p), DensityMatrix::assume_valid(rho.dims(), std::move(post)), 0.0};
}

std::vector<double> outcome_probabilities(const DensityMatrix& rho, const MeasurementProcess& mp) {
    std::vector<double> p;
    p.reserve(mp.size());
    for (const Operator& proj : mp.projectors()) {
        p.push_back(std::clamp(expectation(proj, rho).real(), 0.0, 1.0));
    }
    return p;
}

MeasurementRecord sample_measurement(const DensityMatrix& rho, const MeasurementProcess& mp, Rng& rng) {
    const auto p = outcome_probabilities(rho, mp);
    double total = 0.0;
    for (double x : p) {
        total += x;
    }
    const double u = rng.uniform() * total;
    std::size_t pick = p.size();
    double cum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) {
            continue;
        }
        cum += p[i];
        pick = i;
        if (u < cum) {
            break;
        }
    }
    MeasurementRecord rec = born_update(rho, mp.projectors()[pick]);
    rec.outcome_index = pick;
    rec.at_tau = mp.taus().taus()[pick];
    return rec;
}

MeasurementRecord sample_measurement(const DensityMatrix& rho, const MeasurementProcess& mp, std::uint64_t seed) {
    Rng rng(seed);
    return sample_measurement(rho, mp, rng);
}

MeasurementProcess load_process_manifest(const std::filesystem::path& manifest) {
    const std::string text = read_text_file(manifest);
    const std::filesystem::path base = manifest.parent_path();
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::optional<double> horizon;
    std::vector<Operator> projectors;
    std::vector<double> taus;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string directive;
        if (!(ls >> directive) || directive.front() == '#') {
            continue;
        }
        auto where = [&] { return fmt::format("{}:{}", manifest.string(), line_no); };
        if (directive == "horizon") {
            double h = 0.0;
            if (!(ls >> h)) {
                throw Error(where() + ": horizon needs a number");
            }
            horizon = h;
        } else if (directive == "projector") {
            std::string file;
            double tau = 0.0;
            if (!(ls >> file >> tau)) {
                throw Error(where() + ": expected \"projector <file> <tau>\"");
            }
            std::filesystem::path p(file);
            if (p.is_relative()) {
                p = base / p;
            }
            projectors.push_back(load_operator_file(p));
            taus.push_back(tau);
        } else {
            throw Error(fmt::format("{}: unknown directive \"{}\"", where(), directive));
        }
    }
    if (!horizon) {
        throw Error(manifest.string() + ": missing \"horizon\" line");
    }
    return build_kosher_process(std::move(projectors), StoppingTimeSequence(std::move(taus), *horizon));
}

}  // namespace friendsim
