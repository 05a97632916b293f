#pragma once

// Magnetic-bottle field model and quadratic-Doppler-shift cancellation
// algebra.  A quadratic field inhomogeneity B2 makes the transition
// frequency sample the axial oscillation; for the right B2 the period-
// averaged magnetic shift cancels the axial relativistic Doppler shift, so
// the averaged frequency becomes independent of the axial amplitude.

#include <cmath>
#include <limits>

#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"
#include "h2pt/systematics.hpp"

namespace h2pt {

// Axially symmetric bottle field around the trap center; z0 is the ion's
// equilibrium offset from the bottle center.
struct BottleField {
    double B0 = 0.0;  // T
    double B2 = 0.0;  // T/m^2
    double z0 = 0.0;  // m

    void validate() const {
        if (!(B0 > 0.0)) {
            throw Error(ErrorKind::invariant, "BottleField: B0 must be > 0");
        }
    }
};

// Axial component of B(z,r) = [B0 + B2 (z^2 - r^2/2)] e_z - B2 z r e_r.
inline double bottle_field_axial(const BottleField& bottle, double z,
                                 double r) {
    bottle.validate();
    return bottle.B0 + bottle.B2 * (z * z - 0.5 * r * r);
}

// Bottle strength cancelling the amplitude-dependent part of the period-
// averaged axial shift: B2 = (f/beta) (2 pi nu_z)^2 / (2 c^2).  A negative
// return value means the cancellation needs B2 < 0, which is flagged by the
// caller-visible sign (B2 > 0 is the easily realizable polarity, so one
// prefers transitions with beta > 0).
inline double magic_b2(double beta, double f_B0, double nu_z) {
    if (beta == 0.0) {
        throw Error(ErrorKind::domain,
                    "magic_b2: beta = 0, no bottle value cancels the shift");
    }
    const auto& k = constants();
    const double w_z = 2.0 * k.pi * nu_z;
    return (f_B0 / beta) * w_z * w_z / (2.0 * k.c * k.c);
}

// Period-averaged frequency shift of an ion oscillating axially with
// amplitude A about offset z0, referenced to f(B0):
//   <f> - f(B0) = beta B2 z0^2 + (A^2/2) (beta B2 - w_z^2 f(B0)/(2 c^2)).
// The first term is the static bottle shift at the offset position; the
// second combines the bottle's magnetic modulation with the axial
// second-order Doppler shift.
inline double axial_period_averaged_shift(const BottleField& bottle,
                                          double beta, double f_B0,
                                          double nu_z, double amplitude) {
    bottle.validate();
    const auto& k = constants();
    const double w_z = 2.0 * k.pi * nu_z;
    const double a2 = amplitude * amplitude;
    return beta * bottle.B2 * bottle.z0 * bottle.z0 +
           0.5 * a2 *
               (beta * bottle.B2 - w_z * w_z * f_B0 / (2.0 * k.c * k.c));
}

struct RadialShiftResult {
    double shift_hz = 0.0;           // period-averaged radial shift
    double magnetron_null_b2 = 0.0;  // B2 nulling the magnetron term, T/m^2
};

// Period-averaged radial shift of the two radial modes (modified cyclotron
// "+", magnetron "-") in the bottle:
//   <df> = sum_pm (-beta B2/(2 (2 pi nu_pm)^2) - f/(2 c^2)) <v_pm^2>.
// The bottle term enters through the orbit radius r^2 = <v^2>/w^2; the
// second term is the radial second-order Doppler shift.  Also reports the
// B2 that nulls the magnetron contribution.
inline RadialShiftResult radial_period_averaged_shift(
    const BottleField& bottle, double beta, double f_B0, double nu_plus,
    double nu_minus, double v_plus_sq, double v_minus_sq) {
    bottle.validate();
    if (!(nu_plus > 0.0) || !(nu_minus > 0.0)) {
        throw Error(ErrorKind::domain,
                    "radial_period_averaged_shift: mode frequencies must be "
                    "positive");
    }
    const auto& k = constants();
    const double c2 = k.c * k.c;
    const double w_p = 2.0 * k.pi * nu_plus;
    const double w_m = 2.0 * k.pi * nu_minus;
    RadialShiftResult res;
    res.shift_hz =
        (-beta * bottle.B2 / (2.0 * w_p * w_p) - f_B0 / (2.0 * c2)) *
            v_plus_sq +
        (-beta * bottle.B2 / (2.0 * w_m * w_m) - f_B0 / (2.0 * c2)) *
            v_minus_sq;
    if (beta != 0.0) {
        res.magnetron_null_b2 = -f_B0 * w_m * w_m / (beta * c2);
    } else {
        res.magnetron_null_b2 =
            std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

// Feasibility analysis of axial-QDS cancellation for one transition
// component in a given trap.
struct CancellationReport {
    double beta = 0.0;           // Hz/T at B0
    double f_B0 = 0.0;           // transition frequency at B0, Hz
    double magic_b2 = 0.0;       // T/m^2
    bool b2_positive = false;    // realizable polarity
    bool feasible = false;       // |B2| within cap and B2 > 0
    double b2_cap = 250e3;       // T/m^2
    double max_nu_z = 0.0;       // Hz, largest nu_z keeping |B2| <= cap
    double residual_radial = 0.0;  // Hz, radial shift at the magic B2
};

// Evaluates the magic bottle strength for the configured transition, checks
// it against a realizable cap (default 250 kT/m^2) and reports the largest
// axial frequency that stays within the cap.  The residual radial shift is
// evaluated at the trap's radial mode temperatures when available.
inline CancellationReport cancellation_report(const TransitionSpec& spec,
                                              const CoefficientTable& table,
                                              const TrapConfig& trap,
                                              double b2_cap = 250e3) {
    spec.validate();
    trap.validate();
    if (!(trap.nu_z > 0.0)) {
        throw Error(ErrorKind::config,
                    "cancellation_report: trap nu_z must be set");
    }
    const auto& k = constants();
    CancellationReport rep;
    rep.b2_cap = b2_cap;
    rep.beta = sensitivity_beta(spec, table, trap.B0);
    rep.f_B0 = spec.f_vib0 + total_magnetic_shift(spec, table, trap.B0);
    if (rep.beta == 0.0) {
        rep.magic_b2 = std::numeric_limits<double>::quiet_NaN();
        rep.feasible = false;
        rep.max_nu_z = 0.0;
        return rep;
    }
    rep.magic_b2 = magic_b2(rep.beta, rep.f_B0, trap.nu_z);
    rep.b2_positive = rep.magic_b2 > 0.0;
    rep.feasible = rep.b2_positive && rep.magic_b2 <= b2_cap;
    // |B2| = (f/|beta|) w_z^2/(2 c^2) <= cap  =>  w_z <= sqrt(2 c^2 cap
    // |beta|/f).
    rep.max_nu_z = std::sqrt(2.0 * k.c * k.c * b2_cap *
                             std::abs(rep.beta) / rep.f_B0) /
                   (2.0 * k.pi);
    const bool have_radial = std::isfinite(trap.nu_plus) &&
                             std::isfinite(trap.nu_minus) &&
                             std::isfinite(trap.T_plus) &&
                             std::isfinite(trap.T_minus);
    if (have_radial) {
        const double mass = detail::ion_mass();
        // <v^2> = kB T/m per radial mode (1D quadrature pair averaged).
        const double v_p_sq = k.kB * trap.T_plus / mass;
        const double v_m_sq = k.kB * trap.T_minus / mass;
        BottleField b;
        b.B0 = trap.B0;
        b.B2 = rep.magic_b2;
        rep.residual_radial =
            radial_period_averaged_shift(b, rep.beta, rep.f_B0, trap.nu_plus,
                                         trap.nu_minus, v_p_sq, v_m_sq)
                .shift_hz;
    }
    return rep;
}

} // namespace h2pt
