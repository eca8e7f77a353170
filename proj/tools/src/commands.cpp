#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "chainlab/anharmonic.hpp"
#include "chainlab/cooling.hpp"
#include "chainlab/coupling.hpp"
#include "chainlab/equilibrium.hpp"
#include "chainlab/modes.hpp"
#include "chainlab/spectrum.hpp"
#include "config.hpp"
#include "output.hpp"

#ifndef CHAINLAB_VERSION
#define CHAINLAB_VERSION "0.0.0"
#endif

namespace chainlab::cli {

namespace {

constexpr double kTwoPi = 2.0 * PhysicalConstants::pi;

struct Common {
    std::string config;
    std::string out;
    std::string format = "csv";
};

struct ExtraFile {
    std::string path;
    std::string contents;
};

struct Result {
    Table table;
    std::optional<nlohmann::json> json_doc;  // replaces the table in JSON output
    bool prefer_json = false;                // default format when --format is absent
    std::vector<ExtraFile> extra_files;
};

using Handler = std::function<Result(const RunConfig&, std::ostream& err)>;

std::string join_occupations(const std::vector<int>& occ) {
    std::string s;
    for (std::size_t i = 0; i < occ.size(); ++i) s += (i ? ";" : "") + std::to_string(occ[i]);
    return s;
}

long long as_int(std::size_t v) { return static_cast<long long>(v); }

std::vector<std::size_t> cooling_positions(const ChainSpec& chain, const std::string& species) {
    auto pos = positions_of(chain, species);
    if (pos.empty()) throw ConfigError("species '" + species + "' does not occur in the chain " + chain.label());
    return pos;
}

std::string lightest_species(const RunConfig& cfg) {
    const auto names = cfg.distinct_species();
    return *std::min_element(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
        return cfg.find_species(a).mass_amu < cfg.find_species(b).mass_amu;
    });
}

FockTruncation spectrum_truncation(const ModeSet& modes, double mean_energy_units, const std::vector<int>& n_max,
                                   double tol) {
    if (!n_max.empty()) {
        if (n_max.size() != modes.size()) throw ConfigError("--nmax needs one entry per mode");
        return FockTruncation(n_max, tol);
    }
    if (modes.size() == 2) return FockTruncation({60, 30}, tol);
    // Geometric tail bound with the occupation each mode would have if it held all the energy.
    std::vector<int> dims;
    for (double w : modes.frequencies) {
        const double nbar = std::max(mean_energy_units * modes.frequencies[0] / w, 1e-3);
        dims.push_back(static_cast<int>(std::ceil(std::log(tol) / std::log(nbar / (nbar + 1.0)))));
    }
    return FockTruncation(dims, tol);
}

// Lower mode of the configured chain pinned to `omega` (rad/s).
ModeSet modes_with_lowest_frequency(const RunConfig& cfg, double omega) {
    const ChainSpec probe = cfg.chain();
    const double scaled = normal_modes(probe).frequencies.front();
    const double u0 = probe.min_mass_kg() * (omega / scaled) * (omega / scaled);
    return normal_modes(ChainSpec(probe.sequence(), u0, probe.k_projection(), probe.common_wavelength()));
}

Result cmd_equilibrium(const RunConfig& cfg) {
    const ChainSpec chain = cfg.chain();
    const Equilibrium eq = solve_equilibrium(chain);
    const double x0 = chain.length_unit();
    Result r;
    r.table.columns = {{"index", "1"}, {"species", "-"}, {"position_x0", "x0"}, {"position_si_m", "m"}};
    for (std::size_t i = 0; i < eq.positions.size(); ++i)
        r.table.add_row({as_int(i), chain.ion(i).name, eq.positions[i], eq.positions[i] * x0});
    return r;
}

Result cmd_modes(const RunConfig& cfg) {
    const ModeSet modes = normal_modes(cfg.chain());
    Result r;
    r.table.columns = {{"mode_index", "1"}, {"freq_scaled", "sqrt(u0/m_min)"}, {"freq_hz", "Hz"}, {"parity", "-"}};
    for (std::size_t i = 0; i < modes.size(); ++i)
        r.table.columns.push_back({"beta_prime_" + std::to_string(i + 1), "1"});
    for (std::size_t a = 0; a < modes.size(); ++a) {
        std::vector<Cell> row{as_int(a), modes.frequencies[a], modes.frequency_si(a) / kTwoPi,
                              std::string(to_string(modes.parity[a]))};
        for (std::size_t i = 0; i < modes.size(); ++i)
            row.emplace_back(modes.beta_prime(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)));
        r.table.add_row(std::move(row));
    }
    return r;
}

struct TwoIonScanOptions {
    double mu_min = 1.0;
    double mu_max = 10.0;
    int steps = 100;
};

Result cmd_two_ion_scan(const TwoIonScanOptions& o) {
    if (!(o.mu_min >= 1.0) || !(o.mu_max >= o.mu_min)) throw ConfigError("--mu-min/--mu-max need 1 <= mu-min <= mu-max");
    if (o.steps < 1) throw ConfigError("--steps must be at least 1");
    Result r;
    r.table.columns = {{"mu", "1"},          {"omega_minus", "sqrt(u0/m)"}, {"omega_plus", "sqrt(u0/m)"},
                       {"q_minus_1", "1"},   {"q_minus_2", "1"},            {"q_plus_1", "1"},
                       {"q_plus_2", "1"}};
    for (int k = 0; k <= o.steps; ++k) {
        const double mu = o.mu_min + (o.mu_max - o.mu_min) * k / o.steps;
        const auto a = two_ion_analytic(mu);
        r.table.add_row({mu, a.omega_minus, a.omega_plus, a.q_minus[0], a.q_minus[1], a.q_plus[0], a.q_plus[1]});
        if (o.mu_max == o.mu_min) break;
    }
    return r;
}

struct LambDickeOptions {
    std::optional<double> mean_energy;
    std::string cooling_species;
};

Result cmd_lambdicke(const RunConfig& cfg, const LambDickeOptions& o, std::ostream& err) {
    const ModeSet modes = normal_modes(cfg.chain());
    const LambDickeMatrix ld = lamb_dicke_matrix(modes);
    Result r;
    r.table.columns = {{"ion_index", "1"}, {"species", "-"}, {"mode_index", "1"}, {"eta", "1"}};
    for (std::size_t i = 0; i < ld.ions(); ++i)
        for (std::size_t a = 0; a < ld.mode_count(); ++a)
            r.table.add_row({as_int(i), modes.chain.ion(i).name, as_int(a),
                             ld.eta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a))});
    if (o.mean_energy) {
        const auto trunc = spectrum_truncation(modes, *o.mean_energy, {}, 1e-6);
        const auto state = thermal_state(modes, *o.mean_energy * modes.frequencies[0], trunc);
        const std::string species = o.cooling_species.empty() ? lightest_species(cfg) : o.cooling_species;
        const auto ions = cooling_positions(modes.chain, species);
        const double value = lamb_dicke_check(ld, state.mean_occupations, ions);
        err << "lamb-dicke check: max eta^2 n = " << format_number(value) << " for " << species
            << " ions (threshold 0.1)" << (value > 0.1 ? ": outside the Lamb-Dicke regime" : "") << '\n';
    }
    return r;
}

struct CoolScanOptions {
    std::string cooling_species = "Mg";
    int n = 0;
    std::string normalization_species;
};

Result cmd_coolscan(const RunConfig& cfg, const CoolScanOptions& o, std::ostream& err) {
    auto names = cfg.distinct_species();
    if (names.size() == 1) names.push_back(names[0] == "Mg" ? "In" : "Mg");
    if (names.size() != 2) throw ConfigError("coolscan needs a chain built from exactly two species");
    std::sort(names.begin(), names.end());
    const int n = o.n > 0 ? o.n : static_cast<int>(cfg.sequence.size());
    CoolingScanOptions scan;
    scan.k_projection = cfg.k_projection;
    scan.common_wavelength = cfg.common_wavelength;
    if (!o.normalization_species.empty()) scan.normalization_species = cfg.find_species(o.normalization_species);
    const auto reports = scan_sequences_cooling(cfg.find_species(names[0]), cfg.find_species(names[1]), n,
                                                cfg.find_species(o.cooling_species), cfg.trap_u0(), scan);
    Result r;
    r.table.columns = {{"sequence", "-"}, {"mode_index", "1"}, {"w_normalized", "1"}, {"w_absolute", "1"}};
    for (const auto& rep : reports) {
        if (rep.cooling_ion_positions.empty())
            err << "note: " << rep.sequence.label() << " holds no " << o.cooling_species << " ion; W = 0\n";
        for (std::size_t a = 0; a < rep.w.size(); ++a)
            r.table.add_row({rep.sequence.label(), as_int(a), rep.w_normalized[a], rep.w[a]});
    }
    return r;
}

struct SpectrumOptions {
    std::size_t driven_ion = 0;
    double mean_energy = 5.0;
    std::vector<int> n_max;
    double grouping_tol = 1e-9;
    std::optional<double> lorentzian_gamma;
};

Result cmd_spectrum(const RunConfig& cfg, const SpectrumOptions& o) {
    const ModeSet modes = normal_modes(cfg.chain());
    if (o.driven_ion >= modes.size()) throw ConfigError("--driven-ion is out of range");
    if (!(o.mean_energy >= 0.0)) throw ConfigError("--mean-energy must be non-negative");
    const auto trunc = spectrum_truncation(modes, o.mean_energy, o.n_max, 1e-6);
    const auto state = thermal_state(modes, o.mean_energy * modes.frequencies[0], trunc);
    const auto spec = absorption_spectrum(lamb_dicke_matrix(modes), o.driven_ion, state, trunc, o.grouping_tol);
    const double to_hz = modes.chain.frequency_unit() / kTwoPi;
    Result r;
    r.table.columns = {{"delta_scaled", "sqrt(u0/m_min)"}, {"delta_hz", "Hz"}, {"weight", "1"}};
    if (o.lorentzian_gamma) r.table.columns.push_back({"lorentzian", "1/sqrt(u0/m_min)"});
    for (const auto& line : spec.lines) {
        std::vector<Cell> row{line.delta, line.delta * to_hz, line.weight};
        if (o.lorentzian_gamma) row.emplace_back(spec.lorentzian(line.delta, *o.lorentzian_gamma));
        r.table.add_row(std::move(row));
    }
    return r;
}

struct CoolOptions {
    std::size_t mode = 0;
    std::string cooling_species;
    double initial_n = 5.0;
    int n_max = 80;
    double t_final = 100.0;
    double sample = 1.0;
    std::optional<double> gamma_over_omega;
};

Result cmd_cool(const RunConfig& cfg, const CoolOptions& o, std::ostream& err) {
    const ModeSet modes = normal_modes(cfg.chain());
    if (o.mode >= modes.size()) throw ConfigError("--mode is out of range");
    const std::string species = o.cooling_species.empty() ? lightest_species(cfg) : o.cooling_species;
    const auto ions = cooling_positions(modes.chain, species);
    const auto report = cooling_rate_factor(lamb_dicke_matrix(modes), ions);
    const double omega = modes.frequency_si(o.mode);
    LaserParams laser;
    laser.gamma = o.gamma_over_omega ? *o.gamma_over_omega * omega
                                     : cfg.laser_gamma.value_or(0.1 * omega);
    laser.detuning_delta = cfg.laser_delta.value_or(-omega);
    laser.rabi_g = cfg.laser_g.value_or(0.01 * laser.gamma);
    if (laser.saturation_warning()) err << "warning: g > 0.1 gamma; the low-saturation rate model is stretched\n";
    if (laser.gamma > omega) err << "warning: gamma > omega; sidebands are not resolved\n";
    if (std::abs(laser.detuning_delta + omega) > 1e-6 * omega)
        err << "note: the rate equation assumes the laser sits on the first red sideband\n";
    const auto traj = ld_rate_evolve(omega, report.w[o.mode], laser, thermal_rate_state(o.initial_n, o.n_max),
                                     o.t_final, o.sample);
    Result r;
    r.table.columns = {{"time_tau", "gamma/g^2"}, {"mean_n", "1"}, {"leakage", "1"}};
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        r.table.add_row({traj.times[k], traj.mean_n[k], traj.leakage[k]});
    return r;
}

struct Fig5Options {
    std::string anharmonic = "on";
    bool quartic = false;
    double coupling_scale = 1.0;
    double omega = 1.0e6;
    double t_final = 150.0;
    double sample = 1.0;
    std::vector<int> n_max{25, 14};
    std::vector<double> initial_n{2.0, 1.0};
    std::string dump;
};

Result cmd_simulate_fig5(const Fig5Options& o) {
    if (o.n_max.size() != 2 || o.initial_n.size() != 2) throw ConfigError("--nmax and --initial-n take two values");
    DegenerateCoolingConfig c;
    c.omega = o.omega;
    c.t_final = o.t_final;
    c.sample_interval = o.sample;
    c.truncation = FockTruncation(o.n_max, kMaxLeakage);
    c.initial_mean = o.initial_n;
    c.hamiltonian.coupling_on = o.anharmonic == "on";
    c.hamiltonian.coupling_scale = o.coupling_scale;
    c.hamiltonian.include_quartic = o.quartic;
    const auto res = simulate_degenerate_cooling(c);
    const auto& t = res.trajectory;
    Result r;
    r.table.columns = {{"time_tau", "gamma/g^2"}, {"mean_n1", "1"}, {"mean_n2", "1"}, {"leakage", "1"}};
    for (std::size_t k = 0; k < t.times.size(); ++k)
        r.table.add_row({t.times[k], t.mean_n[k][0], t.mean_n[k][1], t.leakage[k]});
    if (!o.dump.empty()) {
        Table dist;
        dist.columns = {{"n1", "1"}, {"n2", "1"}, {"probability", "1"}};
        for (std::size_t s = 0; s < t.final_bare_distribution.size(); ++s) {
            const auto occ = c.truncation.unflatten(s);
            dist.add_row({static_cast<long long>(occ[0]), static_cast<long long>(occ[1]), t.final_bare_distribution[s]});
        }
        r.extra_files.push_back({o.dump, to_csv(dist)});
    }
    return r;
}

struct AnharmonicOptions {
    int n = 10;
    int order = 3;
    double freq_mhz = 1.0;
};

Result cmd_anharmonic_estimate(const RunConfig& cfg, const AnharmonicOptions& o, std::ostream& err) {
    if (o.order != 3 && o.order != 4) throw ConfigError("--phonon-order must be 3 or 4");
    if (o.n < 1) throw ConfigError("--n must be at least 1");
    if (!(o.freq_mhz > 0.0)) throw ConfigError("--freq-mhz must be positive");
    if (cfg.sequence.size() != 2) err << "note: estimate for N > 2 reuses the two-ion formula (heuristic)\n";
    Result r;
    r.prefer_json = true;
    r.table.columns = {{"convention", "-"},      {"omega_rad_s", "rad/s"}, {"prefactor", "1"}, {"shift_hz", "Hz"},
                       {"tau_anh_s", "s"},       {"n_validity", "1"}};
    nlohmann::json conventions = nlohmann::json::object();
    // The quoted "MHz" read as rad/s (angular) and as cycles/s (hz).
    for (const auto& [name, omega] :
         std::vector<std::pair<std::string, double>>{{"angular", o.freq_mhz * 1e6}, {"hz", kTwoPi * o.freq_mhz * 1e6}}) {
        const ModeSet modes = modes_with_lowest_frequency(cfg, omega);
        const auto est = perturbative_shift(modes, o.n, 0, o.order);
        const long bound = perturbation_validity_bound(est);
        const double shift_hz = est.shift_over_hbar / kTwoPi;
        r.table.add_row({name, omega, est.prefactor, shift_hz, est.tau_anh, static_cast<long long>(bound)});
        conventions[name] = {{"omega_rad_s", omega}, {"prefactor", est.prefactor}, {"shift_hz", shift_hz},
                             {"tau_anh_s", est.tau_anh}, {"n_validity", bound}};
    }
    nlohmann::json doc = conventions["angular"];
    doc["convention"] = "angular";
    doc["phonon_order"] = o.order;
    doc["n"] = o.n;
    doc["conventions"] = conventions;
    r.json_doc = doc;
    return r;
}

struct DegeneracyOptions {
    double tol = 0.05;
    int order = 3;
    int n_max = 10;
    std::vector<double> frequencies;
};

Result cmd_degeneracy_scan(const RunConfig& cfg, const DegeneracyOptions& o) {
    const std::vector<double> freqs = o.frequencies.empty() ? normal_modes(cfg.chain()).frequencies : o.frequencies;
    const auto pairs = degeneracy_scan(freqs, o.order, o.tol, o.n_max);
    Result r;
    r.table.columns = {{"lower", "phonons"}, {"upper", "phonons"}, {"gap", "omega_min"}};
    for (const auto& p : pairs) r.table.add_row({join_occupations(p.lower), join_occupations(p.upper), p.gap});
    return r;
}

struct SequencesOptions {
    int n = 3;
};

Result cmd_sequences(const RunConfig& cfg, const SequencesOptions& o) {
    auto names = cfg.distinct_species();
    if (names.size() == 1) names.push_back(names[0] == "Mg" ? "In" : "Mg");
    if (names.size() != 2) throw ConfigError("sequences needs a chain built from exactly two species");
    const auto seqs = enumerate_sequences(cfg.find_species(names[0]), cfg.find_species(names[1]), o.n, cfg.trap_u0());
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        std::string key;
        for (const auto& ion : seqs[i].sequence()) key += ion.name + "|";
        index_of[key] = i;
    }
    Result r;
    r.table.columns = {{"index", "1"}, {"sequence", "-"}, {"total_mass_amu", "u"}, {"palindromic", "bool"},
                       {"mirror_index", "1"}};
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        std::string mirrored;
        const auto& ions = seqs[i].sequence();
        for (auto it = ions.rbegin(); it != ions.rend(); ++it) mirrored += it->name + "|";
        r.table.add_row({as_int(i), seqs[i].label(), seqs[i].total_mass_amu(),
                         std::string(seqs[i].is_palindromic() ? "true" : "false"), as_int(index_of.at(mirrored))});
    }
    return r;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON configuration file");
    sub->add_option("--out", c.out, "Output file (default: standard output)");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

std::string digest_input(const std::string& command, const RunConfig& cfg, const std::vector<std::string>& args) {
    std::string s = "command=" + command + "\nconfig=" + cfg.canonical.dump() + "\nargs=";
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == command) continue;
        if (a == "--out" || a == "--config") {
            ++i;
            continue;
        }
        if (a.rfind("--out=", 0) == 0 || a.rfind("--config=", 0) == 0) continue;
        s += a + '\x1f';
    }
    return s;
}

} // namespace

const char* tool_version() { return CHAINLAB_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normal modes, couplings and cooling of mixed-species ion chains", "chainlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CHAINLAB_VERSION));

    Common common;
    std::map<std::string, Handler> handlers;
    auto sub = [&](const std::string& name, const std::string& description) {
        CLI::App* s = app.add_subcommand(name, description);
        add_common(s, common);
        return s;
    };

    sub("equilibrium", "Equilibrium positions of the configured chain");
    handlers["equilibrium"] = [](const RunConfig& cfg, std::ostream&) { return cmd_equilibrium(cfg); };

    sub("modes", "Normal-mode frequencies, parities and eigenvectors");
    handlers["modes"] = [](const RunConfig& cfg, std::ostream&) { return cmd_modes(cfg); };

    TwoIonScanOptions scan_opts;
    {
        auto* s = sub("two-ion-scan", "Analytic two-ion modes versus mass ratio");
        s->add_option("--mu-min", scan_opts.mu_min, "Smallest mass ratio")->capture_default_str();
        s->add_option("--mu-max", scan_opts.mu_max, "Largest mass ratio")->capture_default_str();
        s->add_option("--steps", scan_opts.steps, "Number of intervals")->capture_default_str();
    }
    handlers["two-ion-scan"] = [&](const RunConfig&, std::ostream&) { return cmd_two_ion_scan(scan_opts); };

    LambDickeOptions ld_opts;
    {
        auto* s = sub("lambdicke", "Lamb-Dicke parameters of every ion and mode");
        s->add_option("--mean-energy", ld_opts.mean_energy,
                      "Thermal energy in units of hbar times the lowest mode frequency; enables the regime check");
        s->add_option("--cooling-species", ld_opts.cooling_species, "Driven species for the regime check");
    }
    handlers["lambdicke"] = [&](const RunConfig& cfg, std::ostream& e) { return cmd_lambdicke(cfg, ld_opts, e); };

    CoolScanOptions cs_opts;
    {
        auto* s = sub("coolscan", "Cooling-rate factor W for every two-species sequence");
        s->add_option("--cooling-species", cs_opts.cooling_species, "Laser-cooled species")->capture_default_str();
        s->add_option("--n", cs_opts.n, "Chain length (default: configured chain)");
        s->add_option("--normalization-species", cs_opts.normalization_species,
                      "Homogeneous reference chain for W^max (default: lighter species)");
    }
    handlers["coolscan"] = [&](const RunConfig& cfg, std::ostream& e) { return cmd_coolscan(cfg, cs_opts, e); };

    SpectrumOptions sp_opts;
    {
        auto* s = sub("spectrum", "Thermal absorption spectrum of one ion");
        s->add_option("--driven-ion", sp_opts.driven_ion, "Index of the driven ion")->capture_default_str();
        s->add_option("--mean-energy", sp_opts.mean_energy,
                      "Mean motional energy in units of hbar times the lowest mode frequency")
            ->capture_default_str();
        s->add_option("--nmax", sp_opts.n_max, "Fock cut-off per mode, comma separated")->delimiter(',');
        s->add_option("--grouping-tol", sp_opts.grouping_tol, "Line merge tolerance (scaled)")->capture_default_str();
        s->add_option("--lorentzian-gamma", sp_opts.lorentzian_gamma, "Add a Lorentzian-convolved column (scaled)");
    }
    handlers["spectrum"] = [&](const RunConfig& cfg, std::ostream&) { return cmd_spectrum(cfg, sp_opts); };

    CoolOptions cool_opts;
    {
        auto* s = sub("cool", "Lamb-Dicke sideband-cooling rate equation for one mode");
        s->add_option("--mode", cool_opts.mode, "Mode index")->capture_default_str();
        s->add_option("--cooling-species", cool_opts.cooling_species, "Driven species (default: lightest)");
        s->add_option("--initial-n", cool_opts.initial_n, "Initial thermal occupation")->capture_default_str();
        s->add_option("--n-max", cool_opts.n_max, "Highest Fock level")->capture_default_str();
        s->add_option("--t-final", cool_opts.t_final, "Duration in units of gamma/g^2")->capture_default_str();
        s->add_option("--sample", cool_opts.sample, "Sampling interval in units of gamma/g^2")->capture_default_str();
        s->add_option("--gamma-over-omega", cool_opts.gamma_over_omega, "Linewidth relative to the mode (default: laser config, else 0.1)");
    }
    handlers["cool"] = [&](const RunConfig& cfg, std::ostream& e) { return cmd_cool(cfg, cool_opts, e); };

    Fig5Options f5_opts;
    {
        auto* s = sub("simulate-fig5", "Cooling of two modes at omega and 2 omega with anharmonic mixing");
        s->add_option("--anharmonic", f5_opts.anharmonic, "Anharmonic coupling")
            ->check(CLI::IsMember({"on", "off"}))
            ->capture_default_str();
        s->add_flag("--quartic", f5_opts.quartic, "Include the fourth-order term");
        s->add_option("--coupling-scale", f5_opts.coupling_scale, "Multiplier on the anharmonic coupling")
            ->capture_default_str();
        s->add_option("--omega-rad-s", f5_opts.omega, "Lower mode frequency in rad/s")->capture_default_str();
        s->add_option("--t-final", f5_opts.t_final, "Duration in units of gamma/g^2")->capture_default_str();
        s->add_option("--sample", f5_opts.sample, "Sampling interval in units of gamma/g^2")->capture_default_str();
        s->add_option("--nmax", f5_opts.n_max, "Fock cut-off per mode")->delimiter(',')->expected(2);
        s->add_option("--initial-n", f5_opts.initial_n, "Initial thermal occupations")->delimiter(',')->expected(2);
        s->add_option("--dump", f5_opts.dump, "Write the final bare distribution (n1,n2,probability) here");
    }
    handlers["simulate-fig5"] = [&](const RunConfig&, std::ostream&) { return cmd_simulate_fig5(f5_opts); };

    AnharmonicOptions an_opts;
    {
        auto* s = sub("anharmonic-estimate", "Perturbative anharmonic shift and time scale");
        s->add_option("--n", an_opts.n, "Phonon occupation")->capture_default_str();
        s->add_option("--phonon-order", an_opts.order, "Expansion order (3 or 4)")->capture_default_str();
        s->add_option("--freq-mhz", an_opts.freq_mhz, "Lowest mode frequency, read in both conventions")
            ->capture_default_str();
    }
    handlers["anharmonic-estimate"] = [&](const RunConfig& cfg, std::ostream& e) {
        return cmd_anharmonic_estimate(cfg, an_opts, e);
    };

    DegeneracyOptions dg_opts;
    {
        auto* s = sub("degeneracy-scan", "Near-degenerate bare states coupled by the anharmonic term");
        s->add_option("--tol", dg_opts.tol, "Energy window in units of the lowest frequency")->capture_default_str();
        s->add_option("--phonon-order", dg_opts.order, "Number of phonons exchanged")->capture_default_str();
        s->add_option("--n-max", dg_opts.n_max, "Highest occupation per mode")->capture_default_str();
        s->add_option("--frequencies", dg_opts.frequencies, "Override mode frequencies")->delimiter(',');
    }
    handlers["degeneracy-scan"] = [&](const RunConfig& cfg, std::ostream&) { return cmd_degeneracy_scan(cfg, dg_opts); };

    SequencesOptions sq_opts;
    {
        auto* s = sub("sequences", "All orderings of the two configured species");
        s->add_option("--n", sq_opts.n, "Chain length")->capture_default_str();
    }
    handlers["sequences"] = [&](const RunConfig& cfg, std::ostream&) { return cmd_sequences(cfg, sq_opts); };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        if (code == 0) return kExitOk;
        err << app.help();
        return kExitConfig;
    }

    const CLI::App* parsed = app.get_subcommands().front();
    const std::string command = parsed->get_name();
    try {
        const RunConfig cfg = common.config.empty() ? default_config() : load_config(common.config);
        Result result = handlers.at(command)(cfg, err);

        const bool json = parsed->get_option("--format")->count() > 0 ? common.format == "json" : result.prefer_json;
        std::string text;
        if (json)
            text = (result.json_doc ? *result.json_doc : to_json(result.table)).dump(2) + "\n";
        else
            text = to_csv(result.table);

        if (common.out.empty()) {
            out << text;
            for (const auto& f : result.extra_files) write_atomic(f.path, f.contents);
            return kExitOk;
        }
        RunManifest manifest;
        manifest.command = command;
        manifest.config_digest = hex64(fnv1a64(digest_input(command, cfg, args)));
        manifest.tool_version = CHAINLAB_VERSION;
        manifest.timestamp = iso_timestamp();
        manifest.outputs.push_back(common.out);
        write_atomic(common.out, text);
        for (const auto& f : result.extra_files) {
            write_atomic(f.path, f.contents);
            manifest.outputs.push_back(f.path);
        }
        write_atomic(common.out + ".manifest.json", manifest.to_json().dump(2) + "\n");
        return kExitOk;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace chainlab::cli
