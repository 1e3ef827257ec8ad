#include "friendsim/cli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "friendsim/experiments.hpp"
#include "friendsim/friends.hpp"
#include "friendsim/matrix_io.hpp"
#include "friendsim/monogamy.hpp"
#include "friendsim/povm.hpp"

namespace friendsim {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// expr := term (('+' | '-') term)*
// term := unary (('*' | '/') unary)*
// unary := '-' unary | '+' unary | atom
// atom := number | "pi" | "sqrt" '(' expr ')' | '(' expr ')'
class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    std::optional<double> parse() {
        try {
            const double v = expr();
            skip_ws();
            if (pos_ != s_.size()) {
                return std::nullopt;
            }
            return v;
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool eat_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }
    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) {
                v += term();
            } else if (eat('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }
    double term() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                v /= unary();
            } else {
                return v;
            }
        }
    }
    double unary() {
        if (eat('-')) {
            return -unary();
        }
        if (eat('+')) {
            return unary();
        }
        return atom();
    }
    double atom() {
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) {
                throw std::invalid_argument("missing )");
            }
            return v;
        }
        if (eat_word("sqrt")) {
            if (!eat('(')) {
                throw std::invalid_argument("sqrt needs (");
            }
            const double v = expr();
            if (!eat(')')) {
                throw std::invalid_argument("missing )");
            }
            return std::sqrt(v);
        }
        if (eat_word("pi")) {
            return std::numbers::pi;
        }
        skip_ws();
        double v = 0.0;
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        const auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc{} || res.ptr == first) {
            throw std::invalid_argument("number expected");
        }
        pos_ += static_cast<std::size_t>(res.ptr - first);
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

double require_real(const std::string& key, const std::string& text) {
    const auto z = parse_amplitude(text);
    if (!z || z->imag() != 0.0 || !std::isfinite(z->real())) {
        throw UsageError(fmt::format("{}: expected a real number or expression, got \"{}\"", key, text));
    }
    return z->real();
}

cplx require_amplitude(const std::string& key, const std::string& text) {
    const auto z = parse_amplitude(text);
    if (!z || !std::isfinite(z->real()) || !std::isfinite(z->imag())) {
        throw UsageError(fmt::format("{}: expected an amplitude such as sqrt(1/3) or 0.5+0.1i, got \"{}\"", key, text));
    }
    return *z;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    std::string_view s = text;
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw UsageError(fmt::format("seed: expected a 64-bit integer (decimal or 0x hex), got \"{}\"", text));
    }
    return v;
}

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s;
}

void check_n_list(const std::vector<std::size_t>& n_list) {
    if (n_list.empty()) {
        throw UsageError("n-list: must name at least one n");
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] == 0) {
            throw UsageError("n-list: entries must be positive");
        }
        if (i > 0 && n_list[i] <= n_list[i - 1]) {
            throw UsageError("n-list: entries must be strictly increasing");
        }
    }
}

struct AmplitudeFlags {
    std::string alpha = "sqrt(1/3)";
    std::string beta = "sqrt(2/3)";
    std::string alpha_t = "sqrt(1/2)";
    std::string beta_t = "sqrt(1/2)";
    std::string rho = "1/sqrt(2)";

    void add_to(CLI::App* sub) {
        sub->add_option("--alpha", alpha, "Amplitude of |dn>|0> (times sqrt 2)");
        sub->add_option("--beta", beta, "Amplitude of |up>|0> (times sqrt 2)");
        sub->add_option("--alpha-t", alpha_t, "Amplitude of |dn>|1> (times sqrt 2)");
        sub->add_option("--beta-t", beta_t, "Amplitude of |up>|1> (times sqrt 2)");
        sub->add_option("--rho", rho, "Overlap <0_L|0_B>, in [-1, 1]");
    }

    ProtocolParams resolve(double phi) const {
        ProtocolParams p;
        p.alpha = require_amplitude("alpha", alpha);
        p.beta = require_amplitude("beta", beta);
        p.alpha_t = require_amplitude("alpha-t", alpha_t);
        p.beta_t = require_amplitude("beta-t", beta_t);
        p.rho_overlap = require_real("rho", rho);
        p.phi = phi;
        try {
            validate(p);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return p;
    }
};

std::vector<std::string> protocol_metadata(const ProtocolParams& p) {
    return {"alpha=" + format_complex(p.alpha),   "beta=" + format_complex(p.beta),
            "alpha_t=" + format_complex(p.alpha_t), "beta_t=" + format_complex(p.beta_t),
            "rho=" + fmt_double(p.rho_overlap)};
}

LoadedState load_input(const std::string& key, const std::string& path) {
    try {
        return load_matrix_file(path);
    } catch (const Error& e) {
        throw UsageError(fmt::format("{}: {}", key, e.what()));
    }
}

std::string measure_name(MeasureId m) {
    switch (m) {
        case MeasureId::PurityConcurrence:
            return "purity";
        case MeasureId::WoottersConcurrence:
            return "wootters";
        case MeasureId::Negativity:
            return "negativity";
    }
    return "?";
}

}  // namespace

std::optional<cplx> parse_amplitude(std::string_view text) {
    if (auto v = ExprParser(text).parse()) {
        return cplx{*v, 0.0};
    }
    return parse_complex(text);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-friend protocol, stopping-time and monogamy experiments. Writes CSV.", "friendsim"};
    app.set_version_flag("--version", FRIENDSIM_VERSION);
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_config("--config", "", "Optional key=value file; keys are flag names, e.g. seed=7 or fig1.rho=0.5");

    std::string seed_text = "0xF2F2";
    std::string out_path;
    app.add_option("--seed", seed_text, "Base seed (decimal or 0x hex)");
    app.add_option("--out", out_path, "Output CSV path (default: standard output)")->default_str("-");

    // fig1
    AmplitudeFlags fig1_amp;
    std::size_t phi_points = kDefaultPhiPoints;
    auto* fig1 = app.add_subcommand("fig1", "P(spin down) against phi over [0, 4 pi] at fixed rho");
    fig1_amp.add_to(fig1);
    fig1->add_option("--phi-points", phi_points, "Grid points, endpoints included");

    // protocol
    AmplitudeFlags proto_amp;
    std::string phi_text = "0";
    auto* protocol = app.add_subcommand("protocol", "Single-point posterior and P(spin down)");
    proto_amp.add_to(protocol);
    protocol->add_option("--phi", phi_text, "Relative phase of <0_L|1_B>");

    // baxter-chacon
    std::size_t bc_trials = 10000;
    std::vector<std::size_t> bc_n_list{4, 16, 64};
    std::string bc_epsilon = "0.5";
    std::string bc_preset = "hitting";
    unsigned bc_workers = 1;
    auto* bc = app.add_subcommand("baxter-chacon", "Exceedance P(|f(X_T) - f(X_U)| > eps) for n in the n-list");
    auto* bc_trials_opt = bc->add_option("--trials", bc_trials, "Trials per n (at least 100)");
    auto* bc_n_opt = bc->add_option("--n-list", bc_n_list, "Strictly increasing grid refinements")->delimiter(',');
    auto* bc_eps_opt = bc->add_option("--epsilon", bc_epsilon, "Exceedance threshold; reciprocal preset uses 0.05");
    bc->add_option("--preset", bc_preset, "hitting: walk from 0 to level 1, f(x) = x; reciprocal: walk from 2 to level 3, f(x) = 1/x")
        ->check(CLI::IsMember({"hitting", "reciprocal"}));
    bc->add_option("--workers", bc_workers, "Worker threads (results do not depend on this)");

    // device-sync
    std::size_t ds_trials = 10000;
    std::vector<std::size_t> ds_n_list{4, 16, 64};
    std::string ds_sync = "delay";
    std::size_t ds_events = 2;
    unsigned ds_workers = 1;
    auto* ds = app.add_subcommand("device-sync", "Disagreement of two sign devices read at paired stopping times");
    ds->add_option("--trials", ds_trials, "Trials per n (at least 100)");
    ds->add_option("--n-list", ds_n_list, "Strictly increasing gap denominators")->delimiter(',');
    ds->add_option("--sync", ds_sync, "exact: same clock; delay: second clock 1/n later; ceil: rounded up to the 1/n grid")
        ->check(CLI::IsMember({"exact", "delay", "ceil"}));
    ds->add_option("--events", ds_events, "Band-exit times per trial (at least 2)");
    ds->add_option("--workers", ds_workers, "Worker threads (results do not depend on this)");

    // monogamy
    std::size_t dmax = 32;
    std::string construction = "detached";
    auto* mono = app.add_subcommand("monogamy", "C^2_BL and particle-Bub negativity for room dimension d = 2..dmax");
    mono->add_option("--dmax", dmax, "Largest room dimension, 2..32");
    mono->add_option("--construction", construction, "detached: |up> x |Phi_d>; entangled: particle correlated with a shifted Phi_d")
        ->check(CLI::IsMember({"detached", "entangled"}));

    // ckw
    std::string ckw_state;
    std::string ckw_measure = "auto";
    auto* ckw = app.add_subcommand("ckw", "Monogamy report for a (particle, Bub, Laloe) pure state");
    ckw->add_option("--state", ckw_state, "Ket file in the dims/rows text format")->required();
    ckw->add_option("--measure", ckw_measure,
                    "auto (wootters for dims 2 2 2, negativity otherwise), wootters, purity or negativity")
        ->check(CLI::IsMember({"auto", "wootters", "purity", "negativity"}));

    // povm-demo
    std::string povm_state;
    std::string povm_manifest;
    auto* povm = app.add_subcommand("povm-demo", "Outcome probabilities and one sampled outcome for a projector process");
    povm->add_option("--state", povm_state, "Ket or density matrix file")->required();
    povm->add_option("--projectors", povm_manifest, "Manifest with 'horizon T' and 'projector FILE TAU' lines")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "friendsim: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const std::uint64_t seed = parse_seed(seed_text);
        std::vector<std::string> meta{std::string("friendsim_version=") + FRIENDSIM_VERSION};
        std::string csv;

        auto emit_config = [&](const std::string& command) {
            meta.insert(meta.begin() + 1, "command=" + command);
            meta.insert(meta.begin() + 2, fmt::format("seed={:#x}", seed));
            err << "friendsim:";
            for (const auto& m : meta) {
                err << " " << m;
            }
            err << "\n";
        };

        if (fig1->parsed()) {
            if (phi_points < 2) {
                throw UsageError("phi-points: must be at least 2");
            }
            const ProtocolParams p = fig1_amp.resolve(0.0);
            auto m = protocol_metadata(p);
            meta.insert(meta.end(), m.begin(), m.end());
            meta.push_back(fmt::format("phi_points={}", phi_points));
            emit_config("fig1");
            csv = to_csv(fig1_sweep(p, phi_points), meta);
        } else if (protocol->parsed()) {
            const ProtocolParams p = proto_amp.resolve(require_real("phi", phi_text));
            auto m = protocol_metadata(p);
            meta.insert(meta.end(), m.begin(), m.end());
            meta.push_back("phi=" + fmt_double(p.phi));
            emit_config("protocol");
            const Posterior post = conditional_posterior(p);
            csv = "";
            for (const auto& line : meta) {
                csv += "# " + line + "\n";
            }
            csv += "rho,phi,normalization,p_down,p_up,posterior_down,posterior_up\n";
            csv += fmt::format("{},{},{},{},{},{},{}\n", fmt_double(p.rho_overlap), fmt_double(p.phi),
                               fmt_double(post.normalization), fmt_double(std::norm(post.state[kSpinDown])),
                               fmt_double(std::norm(post.state[kSpinUp])), format_complex(post.state[kSpinDown]),
                               format_complex(post.state[kSpinUp]));
        } else if (bc->parsed()) {
            BaxterChaconConfig cfg = bc_preset == "reciprocal" ? reciprocal_config() : BaxterChaconConfig{};
            if (bc_trials_opt->count() > 0 || bc_preset == "hitting") {
                cfg.n_trials = bc_trials;
            }
            if (bc_n_opt->count() > 0 || bc_preset == "hitting") {
                cfg.n_list = bc_n_list;
            }
            if (bc_eps_opt->count() > 0 || bc_preset == "hitting") {
                cfg.epsilon = require_real("epsilon", bc_epsilon);
            }
            if (cfg.n_trials < 100) {
                throw UsageError("trials: must be at least 100");
            }
            if (!(cfg.epsilon > 0.0)) {
                throw UsageError("epsilon: must be positive");
            }
            check_n_list(cfg.n_list);
            if (bc_workers == 0) {
                throw UsageError("workers: must be at least 1");
            }
            cfg.workers = bc_workers;
            cfg.seed = seed;
            meta.push_back("preset=" + bc_preset);
            meta.push_back("walk_dt=" + fmt_double(cfg.model.dt));
            meta.push_back("walk_increment=" + fmt_double(cfg.model.increment));
            meta.push_back("walk_start=" + fmt_double(cfg.model.start));
            meta.push_back("level=" + fmt_double(cfg.level));
            meta.push_back("horizon=" + fmt_double(cfg.horizon));
            meta.push_back("epsilon=" + fmt_double(cfg.epsilon));
            meta.push_back("n_list=" + join_sizes(cfg.n_list));
            meta.push_back(fmt::format("trials={}", cfg.n_trials));
            emit_config("baxter-chacon");
            csv = to_csv(baxter_chacon_experiment(cfg), meta);
        } else if (ds->parsed()) {
            DeviceSyncConfig cfg;
            cfg.n_trials = ds_trials;
            cfg.n_list = ds_n_list;
            cfg.events = ds_events;
            cfg.sync = ds_sync == "exact" ? SyncMode::Exact : ds_sync == "ceil" ? SyncMode::CeilToGrid : SyncMode::Delay;
            if (cfg.n_trials < 100) {
                throw UsageError("trials: must be at least 100");
            }
            if (cfg.events < 2) {
                throw UsageError("events: must be at least 2");
            }
            check_n_list(cfg.n_list);
            if (ds_workers == 0) {
                throw UsageError("workers: must be at least 1");
            }
            cfg.workers = ds_workers;
            cfg.seed = seed;
            meta.push_back("sync=" + ds_sync);
            meta.push_back("walk_dt=" + fmt_double(cfg.model.dt));
            meta.push_back("walk_increment=" + fmt_double(cfg.model.increment));
            meta.push_back("walk_start=" + fmt_double(cfg.model.start));
            meta.push_back("band=" + fmt_double(cfg.band));
            meta.push_back("horizon=" + fmt_double(cfg.horizon));
            meta.push_back(fmt::format("events={}", cfg.events));
            meta.push_back("n_list=" + join_sizes(cfg.n_list));
            meta.push_back(fmt::format("trials={}", cfg.n_trials));
            emit_config("device-sync");
            csv = to_csv(device_sync_experiment(cfg), meta);
        } else if (mono->parsed()) {
            if (dmax < 2 || dmax > 32) {
                throw UsageError("dmax: must be between 2 and 32");
            }
            const auto kind = construction == "entangled" ? ScanConstruction::EntangledParticle
                                                          : ScanConstruction::DetachedParticle;
            meta.push_back(fmt::format("dmax={}", dmax));
            meta.push_back("construction=" + construction);
            emit_config("monogamy");
            std::vector<ScanRow> rows;
            for (std::size_t d = 2; d <= dmax; ++d) {
                rows.push_back(monogamy_scan(d, kind));
            }
            csv = to_csv(rows, meta);
        } else if (ckw->parsed()) {
            const LoadedState state = load_input("state", ckw_state);
            const Ket* psi = std::get_if<Ket>(&state);
            if (psi == nullptr) {
                throw UsageError("state: ckw needs a pure state written as a single-row ket");
            }
            const Dims& dims = psi->dims();
            if (dims.size() != 3 || dims[0] != 2) {
                throw UsageError("state: ckw needs dims 2 dB dL");
            }
            if (std::abs(psi->norm() - 1.0) > kEntryTol) {
                throw UsageError(fmt::format("state: ket norm is {:.17g}, expected 1", psi->norm()));
            }
            const bool qubits = dims[1] == 2 && dims[2] == 2;
            MeasureId measure = qubits ? MeasureId::WoottersConcurrence : MeasureId::Negativity;
            if (ckw_measure == "purity") {
                measure = MeasureId::PurityConcurrence;
            } else if (ckw_measure == "negativity") {
                measure = MeasureId::Negativity;
            } else if (ckw_measure == "wootters") {
                measure = MeasureId::WoottersConcurrence;
            }
            if (measure == MeasureId::WoottersConcurrence && (dims[1] != 2 || dims[2] != 2)) {
                throw UsageError("measure: wootters needs dims 2 2 2; use purity or negativity");
            }
            meta.push_back("state=" + ckw_state);
            meta.push_back("measure=" + measure_name(measure));
            emit_config("ckw");
            const MonogamyReport r = ckw_check(*psi, measure);
            for (const auto& line : meta) {
                csv += "# " + line + "\n";
            }
            csv += "quantity,value\n";
            const std::pair<const char*, double> rows[] = {
                {"c2_pB", r.c2_pB},   {"c2_pL", r.c2_pL}, {"c2_BL", r.c2_BL},
                {"c2_p_BL", r.c2_p_BL}, {"lhs", r.lhs},     {"rhs", r.rhs},
                {"pair_pB_BL_lhs", r.line1_lhs}, {"pair_pL_BL_lhs", r.line2_lhs}};
            for (const auto& [name, v] : rows) {
                csv += fmt::format("{},{}\n", name, fmt_double(v));
            }
            csv += fmt::format("satisfied,{}\n", r.satisfied ? 1 : 0);
            csv += fmt::format("pair_pB_BL_holds,{}\n", r.line1_holds ? 1 : 0);
            csv += fmt::format("pair_pL_BL_holds,{}\n", r.line2_holds ? 1 : 0);
        } else if (povm->parsed()) {
            const LoadedState state = load_input("state", povm_state);
            std::optional<MeasurementProcess> mp;
            try {
                mp.emplace(load_process_manifest(povm_manifest));
            } catch (const Error& e) {
                throw UsageError(fmt::format("projectors: {}", e.what()));
            }
            const DensityMatrix rho = std::holds_alternative<Ket>(state)
                                          ? DensityMatrix::from_ket(normalize(std::get<Ket>(state)))
                                          : std::get<DensityMatrix>(state);
            if (rho.dims() != mp->dims()) {
                throw UsageError("projectors: projector dims differ from the state dims");
            }
            meta.push_back("state=" + povm_state);
            meta.push_back("projectors=" + povm_manifest);
            meta.push_back("horizon=" + fmt_double(mp->horizon()));
            meta.push_back("partition_residual=" + fmt::format("{:.3g}", mp->partition_residual()));
            emit_config("povm-demo");
            const auto probs = outcome_probabilities(rho, *mp);
            const MeasurementRecord rec = sample_measurement(rho, *mp, seed);
            for (const auto& line : meta) {
                csv += "# " + line + "\n";
            }
            csv += "index,tau,probability,sampled\n";
            for (std::size_t i = 0; i < probs.size(); ++i) {
                csv += fmt::format("{},{},{},{}\n", i, fmt_double(mp->taus().taus()[i]), fmt_double(probs[i]),
                                   i == rec.outcome_index ? 1 : 0);
            }
        }

        if (out_path.empty() || out_path == "-") {
            out << csv;
            out.flush();
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) {
                throw Error(fmt::format("out: cannot open \"{}\" for writing", out_path));
            }
            file << csv;
            if (!file.flush()) {
                throw Error(fmt::format("out: write to \"{}\" failed", out_path));
            }
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "friendsim: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "friendsim: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace friendsim
