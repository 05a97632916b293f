// Command-line front end: reproduces the level tables, sensitivity scans,
// shift budgets, Rabi-rate reports, line-shape profiles, cooling runs and
// bottle-cancellation reports as deterministic CSV artifacts driven by a
// single block-structured config file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "h2pt/bottle.hpp"
#include "h2pt/coefficients.hpp"
#include "h2pt/config.hpp"
#include "h2pt/cooling.hpp"
#include "h2pt/csv.hpp"
#include "h2pt/e2.hpp"
#include "h2pt/lineshape.hpp"
#include "h2pt/spin_hamiltonian.hpp"
#include "h2pt/systematics.hpp"

namespace {

using namespace h2pt;

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::string coeff_file;
    std::uint64_t seed = 1;
    bool dry_run = false;
};

Species parse_species(const std::string& s) {
    if (s == "matter") return Species::matter;
    if (s == "antimatter") return Species::antimatter;
    throw Error(ErrorKind::config,
                "species must be 'matter' or 'antimatter', got: " + s);
}

std::string out_path(const Common& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    return (std::filesystem::path(c.out_dir) / name).string();
}

CoefficientTable load_table(const Common& c, const RunConfig& cfg) {
    std::string path = c.coeff_file;
    if (path.empty()) {
        path = cfg.block("files").get_string("coefficients");
    }
    return load_coefficients(path);
}

TrapConfig read_trap(const RunConfig& cfg) {
    const auto& b = cfg.block("trap");
    TrapConfig t;
    t.B0 = b.get_double("B0");
    t.B2 = b.get_double_or("B2", 0.0);
    t.nu_z = b.get_double_or("nu_z", 0.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.nu_plus = b.get_double_or("nu_plus", nan);
    t.nu_minus = b.get_double_or("nu_minus", nan);
    t.T_z = b.get_double_or("T_z", nan);
    t.T_plus = b.get_double_or("T_plus", nan);
    t.T_minus = b.get_double_or("T_minus", nan);
    t.r_orbital = b.get_double_or("r_orbital", nan);
    t.environment_temperature =
        b.get_double_or("environment_temperature", 4.2);
    t.validate();
    return t;
}

TransitionSpec read_transition(const ConfigBlock& b,
                               const CoefficientTable& table) {
    TransitionSpec sp;
    sp.lower.v = int(b.get_int("v"));
    sp.lower.N = int(b.get_int("N"));
    sp.lower.two_M_s = int(b.get_int_or("two_M_s", -1));
    sp.lower.M_N = int(b.get_int_or("M_N", 0));
    sp.upper.v = int(b.get_int("vp"));
    sp.upper.N = int(b.get_int("Np"));
    sp.upper.two_M_s = int(b.get_int_or("two_M_s_p", sp.lower.two_M_s));
    sp.upper.M_N = int(b.get_int_or("M_N_p", sp.lower.M_N));
    sp.lower.species = sp.upper.species =
        parse_species(b.get_string_or("species", "matter"));
    sp.f_vib0 = b.get_double_or("f_vib0", 0.0);
    if (!table.contains(sp.lower.v, sp.lower.N)) {
        throw Error(ErrorKind::config,
                    "level (" + std::to_string(sp.lower.v) + "," +
                        std::to_string(sp.lower.N) + ") not in table");
    }
    if (!table.contains(sp.upper.v, sp.upper.N)) {
        throw Error(ErrorKind::config,
                    "level (" + std::to_string(sp.upper.v) + "," +
                        std::to_string(sp.upper.N) + ") not in table");
    }
    sp.validate();
    return sp;
}

// All transition-config blocks: [transition], [transition.2], ...
std::vector<TransitionSpec> read_transitions(const RunConfig& cfg,
                                             const CoefficientTable& table) {
    std::vector<TransitionSpec> out;
    if (cfg.has_block("transition")) {
        out.push_back(read_transition(cfg.block("transition"), table));
    }
    for (int i = 2; i <= 16; ++i) {
        const std::string name = "transition." + std::to_string(i);
        if (cfg.has_block(name)) {
            out.push_back(read_transition(cfg.block(name), table));
        }
    }
    if (out.empty()) {
        throw Error(ErrorKind::config, "config: empty transition list "
                                       "(no [transition] block)");
    }
    return out;
}

// All allowed spin components of a transition: same-spin E2 components with
// |Delta M_N| <= 2 for optical lines, Delta M_s = +-1 with Delta M_N = 0
// for ESR lines.
std::vector<TransitionSpec> spin_components(const TransitionSpec& base) {
    std::vector<TransitionSpec> out;
    if (base.is_esr()) {
        for (int mn = -base.lower.N; mn <= base.lower.N; ++mn) {
            TransitionSpec c = base;
            c.lower.M_N = c.upper.M_N = mn;
            c.lower.two_M_s = -1;
            c.upper.two_M_s = +1;
            out.push_back(c);
        }
        return out;
    }
    for (int two_ms : {-1, +1}) {
        for (int mn = -base.lower.N; mn <= base.lower.N; ++mn) {
            for (int mnp = -base.upper.N; mnp <= base.upper.N; ++mnp) {
                if (std::abs(mnp - mn) > 2) continue;
                TransitionSpec c = base;
                c.lower.two_M_s = c.upper.two_M_s = two_ms;
                c.lower.M_N = mn;
                c.upper.M_N = mnp;
                out.push_back(c);
            }
        }
    }
    return out;
}

int cmd_levels(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto table = load_table(c, cfg);
    const TrapConfig trap = read_trap(cfg);
    const auto& lb = cfg.block("level");
    const int v = int(lb.get_int("v"));
    const int N = int(lb.get_int("N"));
    const Species sp = parse_species(lb.get_string_or("species", "matter"));
    if (!table.contains(v, N)) {
        throw Error(ErrorKind::config, "level (" + std::to_string(v) + "," +
                                           std::to_string(N) +
                                           ") not in table");
    }
    if (N != 2) {
        throw Error(ErrorKind::config,
                    "cmd_levels supports the para N = 2 manifold only");
    }
    if (c.dry_run) return 0;
    const auto& lc = table.at(v, N);
    ExternalFields f;
    f.B = trap.B0;
    const DiagonalTerms t = build_diagonal_terms(lc, f, sp);
    const auto levels = diagonalize_para_n2(lc, t, trap.B0, sp);
    CsvWriter out(out_path(c, "levels.csv"),
                  {"two_M_F", "group", "E_exact_hz", "E_table2_hz",
                   "difference_hz"});
    for (const auto& lv : levels) {
        const BranchGroup g = (lv.label.two_M_s == -1) ? BranchGroup::lower
                                                       : BranchGroup::higher;
        const int two_mf = 2 * lv.label.M_N + lv.label.two_M_s;
        const double approx = expansion_energy(lc, t, trap.B0, two_mf, g);
        out.row({double(two_mf), (g == BranchGroup::lower) ? 0.0 : 1.0,
                 lv.energy, approx, lv.energy - approx});
    }
    return 0;
}

int cmd_sensitivity(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto table = load_table(c, cfg);
    const TrapConfig trap = read_trap(cfg);
    const auto transitions = read_transitions(cfg, table);
    if (c.dry_run) return 0;
    CsvWriter t4(out_path(c, "table4.csv"),
                 {"v", "N", "vp", "Np", "two_M_s", "M_N", "M_N_p",
                  "delta_f_mag_hz", "beta_hz_per_t"});
    for (const auto& base : transitions) {
        for (const auto& comp : spin_components(base)) {
            t4.row({double(comp.lower.v), double(comp.lower.N),
                    double(comp.upper.v), double(comp.upper.N),
                    double(comp.lower.two_M_s), double(comp.lower.M_N),
                    double(comp.upper.M_N),
                    total_magnetic_shift(comp, table, trap.B0),
                    sensitivity_beta(comp, table, trap.B0)});
        }
    }
    const auto& sb = cfg.block("scan");
    const double b_min = sb.get_double("B_min");
    const double b_max = sb.get_double("B_max");
    const int steps = int(sb.get_int("steps"));
    CsvWriter sc(out_path(c, "fig2_scan.csv"),
                 {"transition_index", "B_t", "delta_f_mag_hz",
                  "beta_hz_per_t"});
    int idx = 0;
    for (const auto& base : transitions) {
        const auto scan = sensitivity_scan(base, table, b_min, b_max, steps);
        for (const auto& r : scan.rows) {
            sc.row({double(idx), r.B, r.delta_f_mag, r.beta});
        }
        for (double z : scan.beta_zero_crossings) {
            std::printf("transition %d: beta zero crossing at B = %s T\n",
                        idx, format_double(z).c_str());
        }
        ++idx;
    }
    return 0;
}

int cmd_budget(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto table = load_table(c, cfg);
    const TrapConfig trap = read_trap(cfg);
    const auto transitions = read_transitions(cfg, table);
    if (c.dry_run) return 0;
    CsvWriter out(out_path(c, "budget.csv"),
                  {"transition_index", "item", "shift_hz", "fractional"});
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const auto b = shift_budget(transitions[i], table, trap, 0.0);
        for (const auto& item : b.items) {
            out.row(std::vector<std::string>{
                format_double(double(i)), item.name,
                format_double(item.value_hz),
                format_double(item.fractional)});
        }
        out.row(std::vector<std::string>{
            format_double(double(i)), "total", format_double(b.total_hz),
            format_double(transitions[i].f_vib0 > 0.0
                              ? b.total_hz / transitions[i].f_vib0
                              : 0.0)});
    }
    return 0;
}

int cmd_rabi(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto table = load_table(c, cfg);
    const auto transitions = read_transitions(cfg, table);
    const auto& gb = cfg.block("geometry");
    Geometry g;
    g.xi = gb.get_double_or("xi", 0.0);
    g.gamma = gb.get_double_or("gamma", 0.0);
    g.theta = gb.get_double("theta");
    g.phi = gb.get_double("phi");
    const double intensity = gb.get_double_or("intensity", 1.0);
    const std::string e2_path =
        cfg.block("files").get_string("e2_factors");
    const auto e2 = load_e2_factors(e2_path);
    if (c.dry_run) return 0;
    CsvWriter out(out_path(c, "rabi.csv"),
                  {"v", "N", "vp", "Np", "two_M_s", "M_N", "M_N_p", "q",
                   "cg", "tensor_factor", "rabi_rad_s"});
    for (const auto& base : transitions) {
        if (base.is_esr()) continue;
        for (const auto& comp : spin_components(base)) {
            const auto r = rabi_frequency(comp, e2, intensity, g);
            out.row({double(comp.lower.v), double(comp.lower.N),
                     double(comp.upper.v), double(comp.upper.N),
                     double(comp.lower.two_M_s), double(comp.lower.M_N),
                     double(comp.upper.M_N), double(r.q), r.cg,
                     r.tensor_factor, r.omega_rabi});
        }
    }
    return 0;
}

int cmd_lineshape(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto& lb = cfg.block("lineshape");
    const double sigma = lb.get_double("qds_scale");
    const double f_lo = lb.get_double("grid_min");
    const double f_hi = lb.get_double("grid_max");
    const int n = int(lb.get_int("grid_points"));
    std::vector<double> multipliers{1.0, 10.0, 50.0};
    if (lb.has("delta_multipliers")) {
        multipliers.clear();
        std::stringstream ss(lb.get_string("delta_multipliers"));
        double x;
        while (ss >> x) multipliers.push_back(x);
    }
    if (c.dry_run) return 0;
    std::vector<double> grid;
    for (int i = 0; i < n; ++i) {
        grid.push_back(f_lo + (f_hi - f_lo) * i / double(n - 1));
    }
    CsvWriter out(out_path(c, "lineshape.csv"),
                  {"delta_int_hz", "detuning_hz", "amplitude_per_hz"});
    for (double m : multipliers) {
        const double delta = m * sigma;
        const auto p = line_profile(delta, sigma, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out.row({delta, p.detuning[i], p.amplitude[i]});
        }
    }
    return 0;
}

int cmd_cooling(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto& cb = cfg.block("cooling");
    CoolingConfig cc;
    if (cb.get_string_or("pair", "matter") == "antimatter") {
        cc = antimatter_config();
    }
    cc.s0 = cb.get_double_or("s0", cc.s0);
    cc.nu_z = cb.get_double_or("nu_z", cc.nu_z);
    cc.sweep_start = cb.get_double_or("sweep_start", cc.sweep_start);
    cc.sweep_end = cb.get_double_or("sweep_end", cc.sweep_end);
    cc.sweep_duration = cb.get_double_or("sweep_duration", cc.sweep_duration);
    cc.sweep_steps = int(cb.get_int_or("sweep_steps", cc.sweep_steps));
    cc.dt = cb.get_double_or("dt", cc.dt);
    if (c.dry_run) return 0;
    const auto& k = constants();
    if (cb.has("initial_energy_k")) {
        const double e0 = cb.get_double("initial_energy_k") * k.kB;
        const double ef = simulate_cooling(e0, cc);
        CsvWriter out(out_path(c, "cooling.csv"),
                      {"initial_energy_k", "final_energy_k"});
        out.row({e0 / k.kB, ef / k.kB});
        std::printf("final molecular energy: %s K\n",
                    format_double(ef / k.kB).c_str());
    }
    if (cb.has("ensemble_n")) {
        const double T = cb.get_double_or("ensemble_temperature", 4.0);
        const int n = int(cb.get_int("ensemble_n"));
        const double thr =
            cb.get_double_or("threshold_k", 1.0) * k.kB;
        const double fr = ensemble_cooling_fraction(T, cc, n, thr, c.seed);
        CsvWriter out(out_path(c, "cooling_ensemble.csv"),
                      {"temperature_k", "n", "threshold_k", "fraction"});
        out.row({T, double(n), thr / k.kB, fr});
        std::printf("ensemble cooled fraction: %s\n",
                    format_double(fr).c_str());
    }
    return 0;
}

int cmd_bottle(const Common& c) {
    const RunConfig cfg = RunConfig::parse_file(c.config_path);
    const auto table = load_table(c, cfg);
    const TrapConfig trap = read_trap(cfg);
    const auto transitions = read_transitions(cfg, table);
    const double cap =
        cfg.has_block("bottle")
            ? cfg.block("bottle").get_double_or("b2_cap", 250e3)
            : 250e3;
    if (c.dry_run) return 0;
    CsvWriter out(out_path(c, "bottle.csv"),
                  {"transition_index", "key", "value"});
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const auto rep = cancellation_report(transitions[i], table, trap, cap);
        const auto emit = [&](const std::string& key, double v) {
            out.row(std::vector<std::string>{format_double(double(i)), key,
                                             format_double(v)});
        };
        emit("beta_hz_per_t", rep.beta);
        emit("f_b0_hz", rep.f_B0);
        emit("magic_b2_t_per_m2", rep.magic_b2);
        emit("b2_positive", rep.b2_positive ? 1.0 : 0.0);
        emit("feasible", rep.feasible ? 1.0 : 0.0);
        emit("b2_cap_t_per_m2", rep.b2_cap);
        emit("max_nu_z_hz", rep.max_nu_z);
        emit("residual_radial_hz", rep.residual_radial);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"para-H2+ Penning-trap spectroscopy toolkit"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "config file path")
        ->required();
    app.add_option("--out", common.out_dir, "output directory");
    app.add_option("--seed", common.seed, "RNG seed");
    app.add_option("--coeff-file", common.coeff_file,
                   "coefficient table override");
    app.add_flag("--dry-run", common.dry_run,
                 "validate config without computing");

    int (*handler)(const Common&) = nullptr;
    app.add_subcommand("levels", "exact vs expansion level energies")
        ->fallthrough()
        ->callback([&] { handler = cmd_levels; });
    app.add_subcommand("sensitivity", "magnetic shifts and sensitivities")
        ->fallthrough()
        ->callback([&] { handler = cmd_sensitivity; });
    app.add_subcommand("budget", "systematic shift budget")
        ->fallthrough()
        ->callback([&] { handler = cmd_budget; });
    app.add_subcommand("rabi", "quadrupole Rabi rates")
        ->fallthrough()
        ->callback([&] { handler = cmd_rabi; });
    app.add_subcommand("lineshape", "convolved line profiles")
        ->fallthrough()
        ->callback([&] { handler = cmd_lineshape; });
    app.add_subcommand("cooling", "sympathetic-cooling simulation")
        ->fallthrough()
        ->callback([&] { handler = cmd_cooling; });
    app.add_subcommand("bottle", "magnetic-bottle cancellation report")
        ->fallthrough()
        ->callback([&] { handler = cmd_bottle; });

    CLI11_PARSE(app, argc, argv);
    try {
        return handler(common);
    } catch (const h2pt::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return (e.kind() == h2pt::ErrorKind::config ||
                e.kind() == h2pt::ErrorKind::parse ||
                e.kind() == h2pt::ErrorKind::unsupported_level)
                   ? 2
                   : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
