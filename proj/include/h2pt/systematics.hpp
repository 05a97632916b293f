#pragma once
// Systematic shifts of rovibrational / electron-spin transition components:
// magnetic shifts and sensitivities, Stark, electric-quadrupole, quadratic
// Doppler, and assembled shift budgets.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "h2pt/coefficients.hpp"
#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"
#include "h2pt/spin_hamiltonian.hpp"
#include "h2pt/spin_state.hpp"

namespace h2pt {

// A transition between two spin components of the same species.  Optical
// (rovibrational) transitions obey electric-quadrupole selection rules;
// electron-spin-resonance (ESR) transitions have Delta v = Delta N = 0 and
// Delta M_s = +-1.
struct TransitionSpec {
    SpinState lower;
    SpinState upper;
    double f_vib0 = 0.0;  // spin-averaged zero-field frequency, Hz

    bool is_esr() const {
        return lower.v == upper.v && lower.N == upper.N;
    }

    void validate() const {
        lower.validate();
        upper.validate();
        if (lower.species != upper.species) {
            throw Error(ErrorKind::invariant,
                        "TransitionSpec: species differ between levels");
        }
        if (is_esr()) {
            if (std::abs(upper.two_M_s - lower.two_M_s) != 2) {
                throw Error(ErrorKind::invariant,
                            "TransitionSpec: ESR requires Delta M_s = +-1");
            }
            return;
        }
        const int dN = std::abs(upper.N - lower.N);
        if (dN != 0 && dN != 2) {
            throw Error(ErrorKind::invariant,
                        "TransitionSpec: quadrupole rule needs N' = N, N+-2");
        }
        if (lower.N == 0 && upper.N == 0) {
            throw Error(ErrorKind::invariant,
                        "TransitionSpec: N=0 -> N'=0 is forbidden");
        }
        const double dMF = std::abs(upper.M_F() - lower.M_F());
        if (dMF > 2.0 + 1e-12) {
            throw Error(ErrorKind::invariant,
                        "TransitionSpec: |Delta M_F| must be <= 2");
        }
    }
};

// Trap and motional-state parameters.  Optional quantities default to NaN
// (= not specified); explicit zeros mean "present but zero".
struct TrapConfig {
    double B0 = 0.0;      // T
    double B2 = 0.0;      // magnetic bottle strength, T/m^2
    double nu_z = 0.0;    // axial frequency, Hz
    double nu_plus = std::numeric_limits<double>::quiet_NaN();   // Hz
    double nu_minus = std::numeric_limits<double>::quiet_NaN();  // Hz
    double T_z = std::numeric_limits<double>::quiet_NaN();       // K
    double T_plus = std::numeric_limits<double>::quiet_NaN();    // K
    double T_minus = std::numeric_limits<double>::quiet_NaN();   // K
    double r_orbital = std::numeric_limits<double>::quiet_NaN();  // m
    double environment_temperature = 4.2;  // K

    void validate() const {
        if (!(B0 > 0.0)) {
            throw Error(ErrorKind::config, "TrapConfig: B0 must be > 0");
        }
        if (std::isfinite(nu_plus) && std::isfinite(nu_minus) && nu_z > 0.0 &&
            !(nu_minus < nu_z && nu_z < nu_plus)) {
            throw Error(ErrorKind::config,
                        "TrapConfig: require nu_minus < nu_z < nu_plus");
        }
        for (double T : {T_z, T_plus, T_minus}) {
            if (std::isfinite(T) && T < 0.0) {
                throw Error(ErrorKind::config,
                            "TrapConfig: temperatures must be >= 0");
            }
        }
    }
};

struct ShiftItem {
    std::string name;
    double value_hz = 0.0;
    double fractional = 0.0;
    std::string note;
};

struct ShiftBudget {
    std::vector<ShiftItem> items;
    double total_hz = 0.0;
};

namespace detail {

inline double finite_or_zero(double x) { return std::isfinite(x) ? x : 0.0; }

// Ion mass and (signed) charge for a species of H2+/anti-H2+.
inline double ion_mass() { return constants().mass_H2plus; }
inline double ion_charge(Species sp) {
    return (sp == Species::matter) ? constants().e : -constants().e;
}

// Spin energy (Hz, including xi) of a labeled state at the given fields.
inline double labeled_level_energy(const LevelCoefficients& c,
                                   const ExternalFields& f,
                                   const SpinState& s) {
    const DiagonalTerms t = build_diagonal_terms(c, f, s.species);
    const auto& k = constants();
    if (c.N == 0) {
        return -t.mu_sign * c.g_e * k.mu_B * f.B * s.M_s() / k.h + t.xi;
    }
    for (const auto& lv : diagonalize_para_n2(c, t, f.B, s.species)) {
        if (lv.label.M_N == s.M_N && lv.label.two_M_s == s.two_M_s) {
            return lv.energy + t.xi;
        }
    }
    throw Error(ErrorKind::domain,
                "labeled_level_energy: no eigenstate with requested label");
}

}  // namespace detail

// Rotational Zeeman shift of a transition: -mu_n (M_N' g_r' - M_N g_r) B/h
// with the species sign of the nuclear moment.
inline double rotational_zeeman_shift(const TransitionSpec& spec,
                                      const CoefficientTable& table,
                                      double B) {
    spec.validate();
    const auto& k = constants();
    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    const double sign = (spec.lower.species == Species::matter) ? 1.0 : -1.0;
    return -sign * k.mu_n *
           (spec.upper.M_N * cu.g_r - spec.lower.M_N * cl.g_r) * B / k.h;
}

// Diamagnetic (magnetizability) shift, split into scalar and tensor parts.
inline std::pair<double, double> diamagnetic_shift(
    const TransitionSpec& spec, const CoefficientTable& table, double B) {
    spec.validate();
    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    const double scalar = detail::magnetizability_shift_hz(cu.chi_s, B) -
                          detail::magnetizability_shift_hz(cl.chi_s, B);
    auto tensor_level = [&](const LevelCoefficients& c, int M_N) {
        if (c.N == 0) return 0.0;
        const double w = M_N * M_N - c.N * (c.N + 1) / 3.0;
        return detail::magnetizability_shift_hz(c.chi_t, B) * w;
    };
    const double tensor = tensor_level(cu, spec.upper.M_N) -
                          tensor_level(cl, spec.lower.M_N);
    return {scalar, tensor};
}

namespace detail {

// Stark energy (Hz) of one level for given squared axial/radial fields.
inline double stark_level_energy(const LevelCoefficients& c, int M_N,
                                 double E_z_sq, double E_r_sq) {
    double e = polarizability_shift_hz(c.alpha_s_dc, E_z_sq + E_r_sq);
    if (c.N >= 1) {
        const double e_tilde_sq = E_z_sq - 0.5 * E_r_sq;
        const double w = 2.0 * M_N * M_N - (2.0 / 3.0) * c.N * (c.N + 1);
        e += polarizability_shift_hz(c.alpha_t_dc, e_tilde_sq) * w;
    }
    return e;
}

}  // namespace detail

// d.c. Stark shift from the trap's electric fields: axial thermal field
// <E_z^2> = k_B T_z m (2 pi nu_z)^2 / q^2 and motionally induced radial
// field, either |E_r| = (|q|/m) B^2 r_orbital or the thermal form
// |E_r|^2 = 2 E_kin,r B^2 / m, depending on which input is given.
inline double dc_stark_shift(const TransitionSpec& spec,
                             const CoefficientTable& table,
                             const TrapConfig& trap) {
    spec.validate();
    trap.validate();
    const auto& k = constants();
    const double m = detail::ion_mass();
    const double q = std::abs(detail::ion_charge(spec.lower.species));
    const double B = trap.B0;

    double E_z_sq = 0.0;
    if (std::isfinite(trap.T_z) && trap.nu_z > 0.0) {
        const double wz = 2.0 * k.pi * trap.nu_z;
        E_z_sq = k.kB * trap.T_z * m * wz * wz / (q * q);
    }

    double E_r_sq;
    if (std::isfinite(trap.r_orbital)) {
        const double Er = q / m * B * B * trap.r_orbital;
        E_r_sq = Er * Er;
    } else if (std::isfinite(trap.T_plus) || std::isfinite(trap.T_minus)) {
        const double e_kin = 0.5 * k.kB * (detail::finite_or_zero(trap.T_plus) +
                                           detail::finite_or_zero(trap.T_minus));
        E_r_sq = 2.0 * e_kin * B * B / m;
    } else {
        throw Error(ErrorKind::config,
                    "dc_stark_shift: set either r_orbital or a radial "
                    "temperature (T_plus / T_minus)");
    }

    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    return detail::stark_level_energy(cu, spec.upper.M_N, E_z_sq, E_r_sq) -
           detail::stark_level_energy(cl, spec.lower.M_N, E_z_sq, E_r_sq);
}

// Light shift of the transition for a wave of the given intensity polarized
// along B, with F^2 = 2 I/(eps0 c) and the a.c. polarizabilities.
inline double ac_stark_shift(const TransitionSpec& spec,
                             const CoefficientTable& table, double intensity) {
    spec.validate();
    if (intensity < 0.0) {
        throw Error(ErrorKind::domain, "ac_stark_shift: intensity < 0");
    }
    const double F2 = detail::light_field_sq(intensity);
    auto level = [&](const LevelCoefficients& c, int M_N) {
        double e = detail::polarizability_shift_hz(c.alpha_s_ac, F2);
        if (c.N >= 1) {
            const double w = 2.0 * M_N * M_N - (2.0 / 3.0) * c.N * (c.N + 1);
            e += detail::polarizability_shift_hz(c.alpha_t_ac, F2) * w;
        }
        return e;
    };
    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    return level(cu, spec.upper.M_N) - level(cl, spec.lower.M_N);
}

// Electric-quadrupole shift from the static trap gradient V_zz = m w_z^2 / q.
// For the antimatter species both the quadrupole coupling and V_zz change
// sign, so the shift is even under conjugation.
inline double eqs_shift(const TransitionSpec& spec,
                        const CoefficientTable& table, double nu_z,
                        double mass, double charge) {
    spec.validate();
    if (!(nu_z > 0.0)) {
        throw Error(ErrorKind::domain, "eqs_shift: nu_z must be > 0");
    }
    const auto& k = constants();
    const double wz = 2.0 * k.pi * nu_z;
    const double V_zz = mass * wz * wz / charge;  // signed
    const double csign = (spec.lower.species == Species::matter) ? 1.0 : -1.0;
    auto level = [&](const LevelCoefficients& c, int M_N) {
        if (c.N == 0) return 0.0;
        const double w = M_N * M_N - c.N * (c.N + 1) / 3.0;
        return detail::quadrupole_coeff_hz(csign * c.e14, V_zz) * w;
    };
    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    return level(cu, spec.upper.M_N) - level(cl, spec.lower.M_N);
}

// Mean quadratic Doppler shift for Boltzmann-distributed motion in the three
// modes: Delta f = -f0 kB (T_z + T_plus + T_minus)/(2 m c^2).
inline double qds_mean(double mass, double T_z, double T_plus, double T_minus,
                       double f0) {
    if (T_z < 0.0 || T_plus < 0.0 || T_minus < 0.0) {
        throw Error(ErrorKind::domain, "qds_mean: temperatures must be >= 0");
    }
    const auto& k = constants();
    return -f0 * k.kB * (T_z + T_plus + T_minus) / (2.0 * mass * k.c * k.c);
}

// Quadratic Doppler shift of the quantized cyclotron mode at mean occupation
// n_plus: Delta f = -f0 (n+1/2) hbar w_+ / (2 m c^2), i.e. -3 hbar w_+ /
// (4 m c^2) * f0 at <n_+> = 1; n = 0 gives the zero-point value.
inline double qds_quantum(double mass, double n_plus, double nu_plus,
                          double f0) {
    if (n_plus < 0.0) {
        throw Error(ErrorKind::domain, "qds_quantum: n_plus must be >= 0");
    }
    const auto& k = constants();
    const double w_plus = 2.0 * k.pi * nu_plus;
    return -f0 * (n_plus + 0.5) * k.hbar * w_plus / (2.0 * mass * k.c * k.c);
}

// Total magnetic shift Delta f_mag of a transition component: difference of
// spin energies from diagonalization (Zeeman, anisotropic Zeeman, spin-
// rotation mixing, dia/paramagnetic scalar+tensor), referenced so the
// B-independent diagonal spin-rotation energy c_e M_s M_N of each level is
// excluded (it is part of the hyperfine component definition, not a shift).
// Stark-type terms are excluded.
inline double total_magnetic_shift(const TransitionSpec& spec,
                                   const CoefficientTable& table, double B) {
    spec.validate();
    ExternalFields f;
    f.B = B;
    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    const double eu = detail::labeled_level_energy(cu, f, spec.upper);
    const double el = detail::labeled_level_energy(cl, f, spec.lower);
    const double spin_ref = cu.c_e * spec.upper.M_s() * spec.upper.M_N -
                            cl.c_e * spec.lower.M_s() * spec.lower.M_N;
    return eu - el - spin_ref;
}

// Magnetic sensitivity beta = d(Delta f_mag)/dB by central finite difference
// with relative step 1e-4.
inline double sensitivity_beta(const TransitionSpec& spec,
                               const CoefficientTable& table, double B) {
    const double dB = 1e-4 * B;
    return (total_magnetic_shift(spec, table, B + dB) -
            total_magnetic_shift(spec, table, B - dB)) /
           (2.0 * dB);
}

struct SensitivityRow {
    double B = 0.0;
    double delta_f_mag = 0.0;  // Hz
    double beta = 0.0;         // Hz/T
};

struct SensitivityScan {
    std::vector<SensitivityRow> rows;
    std::vector<double> beta_zero_crossings;  // T, linear interpolation
};

// Evaluate Delta f_mag and beta on a linear grid over [B_min, B_max] and
// locate sign changes of beta.
inline SensitivityScan sensitivity_scan(const TransitionSpec& spec,
                                        const CoefficientTable& table,
                                        double B_min, double B_max,
                                        int steps) {
    if (!(B_min > 0.1 && B_max < 10.0 && B_min <= B_max)) {
        throw Error(ErrorKind::domain,
                    "sensitivity_scan: B range must lie within (0.1, 10) T");
    }
    if (steps < 1) {
        throw Error(ErrorKind::domain, "sensitivity_scan: steps must be >= 1");
    }
    SensitivityScan scan;
    scan.rows.reserve(std::size_t(steps));
    for (int i = 0; i < steps; ++i) {
        SensitivityRow row;
        row.B = (steps == 1)
                    ? B_min
                    : B_min + (B_max - B_min) * double(i) / (steps - 1);
        row.delta_f_mag = total_magnetic_shift(spec, table, row.B);
        row.beta = sensitivity_beta(spec, table, row.B);
        scan.rows.push_back(row);
    }
    for (std::size_t i = 1; i < scan.rows.size(); ++i) {
        const auto& a = scan.rows[i - 1];
        const auto& b = scan.rows[i];
        if (a.beta == 0.0) scan.beta_zero_crossings.push_back(a.B);
        else if (a.beta * b.beta < 0.0) {
            scan.beta_zero_crossings.push_back(
                a.B + (b.B - a.B) * (-a.beta) / (b.beta - a.beta));
        }
    }
    return scan;
}

// Resistive-cooling thermalization time tau = m D^2 / (R_p q^2) for an ion
// in a trap of effective electrode distance D and detector resistance R_p.
inline double thermalization_time(double mass, double trap_length_D,
                                  double resistance, double charge) {
    if (!(mass > 0.0 && trap_length_D > 0.0 && resistance > 0.0 &&
          charge != 0.0)) {
        throw Error(ErrorKind::domain,
                    "thermalization_time: all parameters must be positive");
    }
    return mass * trap_length_D * trap_length_D /
           (resistance * charge * charge);
}

// Magic magnetic field at which the motional radial Stark shift cancels the
// quadratic Doppler shift: B = sqrt(h f0 / ((-Delta alpha) c^2)), defined
// only when the effective polarizability difference for the radial field is
// negative; returns nullopt otherwise (or above a 100 T cap).
inline std::optional<double> magic_magnetic_field(
    const TransitionSpec& spec, const CoefficientTable& table) {
    spec.validate();
    const auto& k = constants();
    // Effective alpha per unit E_r^2 (SI, J/(V/m)^2): scalar part plus the
    // radial-field tensor part, Etilde^2 = -E_r^2/2.
    auto level_alpha = [&](const LevelCoefficients& c, int M_N) {
        double a = c.alpha_s_dc;
        if (c.N >= 1) {
            const double w = 2.0 * M_N * M_N - (2.0 / 3.0) * c.N * (c.N + 1);
            a += -0.5 * c.alpha_t_dc * w;
        }
        return a * k.hartree / (k.atomic_field * k.atomic_field);
    };
    const auto& cl = table.at(spec.lower.v, spec.lower.N);
    const auto& cu = table.at(spec.upper.v, spec.upper.N);
    const double dalpha = level_alpha(cu, spec.upper.M_N) -
                          level_alpha(cl, spec.lower.M_N);
    if (dalpha >= 0.0) return std::nullopt;
    const double B = std::sqrt(k.h * spec.f_vib0 / ((-dalpha) * k.c * k.c));
    if (B > 100.0) return std::nullopt;
    return B;
}

// Itemized shift budget for one transition component in a given trap.
// Temperatures or radii left unset contribute zero.  The black-body entry is
// carried as a fractional bound, not a model.
inline ShiftBudget shift_budget(const TransitionSpec& spec,
                                const CoefficientTable& table,
                                const TrapConfig& trap, double intensity) {
    spec.validate();
    trap.validate();
    const double f0 = spec.f_vib0;
    const double m = detail::ion_mass();
    const double q = detail::ion_charge(spec.lower.species);

    ShiftBudget budget;
    auto add = [&](const std::string& name, double value,
                   const std::string& note) {
        ShiftItem item;
        item.name = name;
        item.value_hz = value;
        item.fractional = (f0 != 0.0) ? value / f0 : 0.0;
        item.note = note;
        budget.items.push_back(item);
        budget.total_hz += value;
    };

    add("magnetic", total_magnetic_shift(spec, table, trap.B0),
        "spin + Zeeman + dia/paramagnetic at B0");
    if (trap.nu_z > 0.0) {
        add("eqs", eqs_shift(spec, table, trap.nu_z, m, q),
            "static trap gradient V_zz = m w_z^2/q");
    } else {
        add("eqs", 0.0, "nu_z not set");
    }
    if (std::isfinite(trap.r_orbital) || std::isfinite(trap.T_plus) ||
        std::isfinite(trap.T_minus)) {
        add("dc_stark", dc_stark_shift(spec, table, trap),
            "axial thermal + motional radial field");
    } else {
        add("dc_stark", 0.0, "no radial motion specified");
    }
    add("light", ac_stark_shift(spec, table, intensity),
        "spectroscopy wave light shift");
    add("qds",
        qds_mean(m, detail::finite_or_zero(trap.T_z),
                 detail::finite_or_zero(trap.T_plus),
                 detail::finite_or_zero(trap.T_minus), f0),
        "quadratic Doppler, Boltzmann mean");
    add("bbr", 0.0, "black-body shift bounded below 1e-19 fractionally");
    return budget;
}

// CPT-difference budget: every item is delta = value(matter transition) -
// value(antimatter transition with conjugated labels), same trap.
inline ShiftBudget shift_budget_cpt_difference(const TransitionSpec& spec,
                                               const CoefficientTable& table,
                                               const TrapConfig& trap,
                                               double intensity) {
    TransitionSpec conj = spec;
    conj.lower = charge_conjugate(spec.lower);
    conj.upper = charge_conjugate(spec.upper);
    const ShiftBudget a = shift_budget(spec, table, trap, intensity);
    const ShiftBudget b = shift_budget(conj, table, trap, intensity);
    ShiftBudget d;
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        ShiftItem item = a.items[i];
        item.value_hz -= b.items[i].value_hz;
        item.fractional -= b.items[i].fractional;
        item.note = "matter minus antimatter";
        d.items.push_back(item);
        d.total_hz += item.value_hz;
    }
    return d;
}

// Linear combinations of measured transition components (App.-C style).
enum class CombinationScheme {
    rotational_zeeman_free,  // mean of M_N -> M_N and -M_N -> -M_N pairs
    tensor_slot,  // (mean of +-2 -> +-2) - (0 -> 0), averaged over M_s
};

struct MeasuredComponent {
    SpinState lower;
    SpinState upper;
    double frequency = 0.0;  // Hz
};

struct CombinationResult {
    double value = 0.0;  // Hz (scheme-dependent meaning)
    std::string note;
};

// rotational_zeeman_free: mean of all supplied components; valid when the
// set is closed under M_N -> -M_N so odd-in-M_N Zeeman terms cancel.
// tensor_slot: [ (f(+2->+2) + f(-2->-2))/2 - f(0->0) ] / 4, averaged over
// the electron spin orientations present; isolates the joint tensor
// coefficient difference (magnetizability-tensor + tensor-Stark), which
// enters transition frequencies only through Delta(gamma) * M_N^2.
inline CombinationResult component_combination(
    const std::vector<MeasuredComponent>& comps, CombinationScheme scheme) {
    if (comps.size() < 2) {
        throw Error(ErrorKind::domain,
                    "component_combination: need >= 2 components");
    }
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (std::size_t j = i + 1; j < comps.size(); ++j) {
            if (comps[i].lower.M_N == comps[j].lower.M_N &&
                comps[i].upper.M_N == comps[j].upper.M_N &&
                comps[i].lower.two_M_s == comps[j].lower.two_M_s &&
                comps[i].upper.two_M_s == comps[j].upper.two_M_s) {
                throw Error(ErrorKind::domain,
                            "component_combination: linearly dependent set "
                            "(duplicate component labels)");
            }
        }
    }
    CombinationResult r;
    if (scheme == CombinationScheme::rotational_zeeman_free) {
        for (const auto& c : comps) {
            bool mirrored = false;
            for (const auto& d : comps) {
                if (d.lower.M_N == -c.lower.M_N && d.upper.M_N == -c.upper.M_N &&
                    d.lower.two_M_s == c.lower.two_M_s &&
                    d.upper.two_M_s == c.upper.two_M_s) {
                    mirrored = true;
                    break;
                }
            }
            if (!mirrored) {
                throw Error(ErrorKind::domain,
                            "component_combination: set not closed under "
                            "M_N -> -M_N");
            }
            r.value += c.frequency / comps.size();
        }
        r.note = "mean over +-M_N components; rotational Zeeman canceled";
        return r;
    }

    // tensor_slot
    double sum = 0.0;
    int n_spin = 0;
    for (int two_M_s : {-1, +1}) {
        const MeasuredComponent* f0 = nullptr;
        const MeasuredComponent* fp2 = nullptr;
        const MeasuredComponent* fm2 = nullptr;
        for (const auto& c : comps) {
            if (c.lower.two_M_s != two_M_s || c.upper.two_M_s != two_M_s ||
                c.lower.M_N != c.upper.M_N) {
                continue;
            }
            if (c.lower.M_N == 0) f0 = &c;
            if (c.lower.M_N == 2) fp2 = &c;
            if (c.lower.M_N == -2) fm2 = &c;
        }
        if (f0 && fp2 && fm2) {
            sum += (0.5 * (fp2->frequency + fm2->frequency) - f0->frequency) /
                   4.0;
            ++n_spin;
        }
    }
    if (n_spin == 0) {
        throw Error(ErrorKind::domain,
                    "component_combination: tensor_slot needs (0->0, 2->2, "
                    "-2->-2) components for at least one M_s");
    }
    r.value = sum / n_spin;
    r.note = (n_spin == 2)
                 ? "tensor slot, averaged over both M_s orientations"
                 : "tensor slot from a single M_s orientation (residual "
                   "anisotropic-Zeeman contribution remains)";
    return r;
}

}  // namespace h2pt
