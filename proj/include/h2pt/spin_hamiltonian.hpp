#pragma once
// Effective spin Hamiltonian of H2+ / anti-H2+ levels in strong magnetic
// field (Paschen-Back regime).  For para levels (I = 0) with N = 2 the
// Hamiltonian in the decoupled product basis |M_N; M_s> is block-diagonal
// in M_F = M_N + M_s, with blocks of dimension {1,2,2,2,2,1}, so all
// eigenvalues follow in closed form.  Energies are in Hz throughout and are
// reported relative to the state-independent offset xi, which is carried
// separately and added back when absolute transition frequencies are needed.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "h2pt/coefficients.hpp"
#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"
#include "h2pt/spin_state.hpp"

namespace h2pt {

inline constexpr std::size_t kParaN2Dim = 10;

struct BasisState {
    int M_N;
    int two_M_s;
    double M_s() const { return 0.5 * two_M_s; }
    double M_F() const { return M_N + 0.5 * two_M_s; }
};

// Product basis for (I=0, N=2), ordered by M_F ascending, and within equal
// M_F by M_s ascending.  Index pairs (1,2), (3,4), (5,6), (7,8) [0-based]
// form the four 2x2 blocks with M_F = -3/2, -1/2, +1/2, +3/2.
inline const std::array<BasisState, kParaN2Dim>& para_n2_basis() {
    static const std::array<BasisState, kParaN2Dim> basis = {{
        {-2, -1},  // M_F = -5/2
        {-1, -1},  // M_F = -3/2
        {-2, +1},
        {0, -1},  // M_F = -1/2
        {-1, +1},
        {1, -1},  // M_F = +1/2
        {0, +1},
        {2, -1},  // M_F = +3/2
        {1, +1},
        {2, +1},  // M_F = +5/2
    }};
    return basis;
}

using Matrix10 = std::array<std::array<double, kParaN2Dim>, kParaN2Dim>;

// Spin-rotation interaction c_e * (N . S_e) in the product basis, Hz.
// Diagonal part c_e*M_N*M_s; ladder part (c_e/2)*sqrt(N(N+1)-M_N(M_N+-1)) *
// sqrt(3/4 - M_s(M_s-+1)) connecting |M_N; -1/2> and |M_N-1; +1/2>.
inline Matrix10 build_spin_rotation_matrix(double c_e) {
    Matrix10 m{};
    const auto& basis = para_n2_basis();
    constexpr int N = 2;
    for (std::size_t i = 0; i < kParaN2Dim; ++i) {
        m[i][i] = c_e * basis[i].M_N * basis[i].M_s();
        for (std::size_t j = i + 1; j < kParaN2Dim; ++j) {
            // N+ S- coupling: |M_N; -1/2> <-> |M_N+1; +1/2>
            const BasisState& a = basis[i];
            const BasisState& b = basis[j];
            if (a.two_M_s == -1 && b.two_M_s == +1 && b.M_N == a.M_N - 1) {
                const double ladder =
                    0.5 * std::sqrt(double(N * (N + 1) - a.M_N * (a.M_N - 1)));
                m[i][j] = m[j][i] = c_e * ladder;
            }
        }
    }
    return m;
}

// Parameters of the diagonal (in |M_N; M_s>) part of the Hamiltonian.
// E_diag/h = -mu_sign*g_e_prime*mu_B*B*M_s/h - mu_sign*g_l*mu_B*B*M_N/h
//            + gamma*M_N^2 + mu_sign*zeta_B*M_s*M_N^2 + xi.
// gamma, zeta_B, xi in Hz; g_e_prime and g_l dimensionless; mu_sign = +1 for
// matter, -1 for antimatter (both magnetic moments reverse together).
struct DiagonalTerms {
    double g_e_prime = 0.0;
    double g_l = 0.0;
    double gamma = 0.0;   // Hz per M_N^2
    double zeta_B = 0.0;  // Hz per M_s*M_N^2 (matter-convention sign)
    double xi = 0.0;      // Hz, state-independent
    double mu_sign = 1.0;
};

// External (classical) fields entering the diagonal terms.  Static electric
// field enters via its quadratic invariants; intensity is the time-averaged
// laser intensity of the trapping/probe light.
struct ExternalFields {
    double B = 0.0;            // T, axial
    double E_z_sq = 0.0;       // (V/m)^2, axial static field squared
    double E_perp_sq = 0.0;    // (V/m)^2, radial static field squared
    double V_zz = 0.0;         // V/m^2, electric field gradient d(E_z)/dz
    double intensity = 0.0;    // W/m^2
};

namespace detail {

// Tensor normalization sqrt(N(N+1)(2N-1)(2N+3)); = sqrt(126) for N=2.
inline double tensor_norm(int N) {
    return std::sqrt(double(N) * (N + 1) * (2 * N - 1) * (2 * N + 3));
}

// Squared-field amplitude of light of given intensity, F^2 = 2 I/(eps0 c).
inline double light_field_sq(double intensity) {
    const auto& k = constants();
    return 2.0 * intensity / (k.epsilon0 * k.c);
}

// Energy shift (Hz) of a polarizability term -1/2 * alpha * F^2 with alpha in
// atomic units and F^2 in (V/m)^2.
inline double polarizability_shift_hz(double alpha_au, double field_sq) {
    const auto& k = constants();
    return -0.5 * alpha_au * field_sq / (k.atomic_field * k.atomic_field) *
           k.hartree_hz;
}

// Energy (Hz) of the magnetizability term -(alpha_fs^2/2) * chi * Btilde^2,
// chi in atomic units, with Btilde^2 = (4 pi/mu0) a0^3 B^2 expressed in
// Hartree via division by E_h.
inline double magnetizability_shift_hz(double chi_au, double B) {
    const auto& k = constants();
    const double bt2_joule =
        (4.0 * k.pi / k.mu0) * k.a0 * k.a0 * k.a0 * B * B;
    return -0.5 * k.alpha_fs * k.alpha_fs * chi_au * (bt2_joule / k.hartree) *
           k.hartree_hz;
}

// Electric-quadrupole coupling: e14 is tabulated in MHz per (GV/m^2); the
// Hamiltonian term is (3/2)^{3/2} E14 V_zz (N_z^2 - N^2/3).
inline double quadrupole_coeff_hz(double e14, double V_zz) {
    const double e14_hz_per_v = e14 * 1e6 / 1e9;  // Hz per (V/m^2)
    return std::pow(1.5, 1.5) * e14_hz_per_v * V_zz;
}

}  // namespace detail

// Collect the diagonal-term parameters for a given level and field
// configuration.  Scalar pieces (independent of M_N, M_s) go to xi; pieces
// proportional to M_N^2 go to gamma.
inline DiagonalTerms build_diagonal_terms(const LevelCoefficients& c,
                                          const ExternalFields& f,
                                          Species species = Species::matter) {
    c.validate();
    const auto& k = constants();
    const int N = c.N;
    const double nn1 = double(N) * (N + 1);

    DiagonalTerms t;
    t.mu_sign = (species == Species::matter) ? 1.0 : -1.0;
    t.g_l = c.g_r * k.mu_n / k.mu_B;
    t.g_e_prime = c.g_e;
    if (N >= 1) {
        const double norm = detail::tensor_norm(N);
        t.g_e_prime = c.g_e - c.g_t * nn1 / norm;
        t.zeta_B = -3.0 * c.g_t * k.mu_B * f.B / (norm * k.h);
    }

    // Magnetizability (diamagnetic) shift: scalar part plus tensor part
    // -(alpha_fs^2/2) chi_t Btilde^2 (M_N^2 - N(N+1)/3).
    t.xi += detail::magnetizability_shift_hz(c.chi_s, f.B);
    if (N >= 1) {
        const double tens = detail::magnetizability_shift_hz(c.chi_t, f.B);
        t.gamma += tens;
        t.xi += -tens * nn1 / 3.0;
    }

    // Static Stark: -1/2 alpha_s |E|^2 - 1/2 alpha_t Etilde^2 (2 N_z^2 -
    // 2 N^2/3), with Etilde^2 = E_z^2 - E_perp^2/2.
    const double e_tot_sq = f.E_z_sq + f.E_perp_sq;
    const double e_tilde_sq = f.E_z_sq - 0.5 * f.E_perp_sq;
    t.xi += detail::polarizability_shift_hz(c.alpha_s_dc, e_tot_sq);
    if (N >= 1) {
        const double tens =
            2.0 * detail::polarizability_shift_hz(c.alpha_t_dc, e_tilde_sq);
        t.gamma += tens;
        t.xi += -tens * nn1 / 3.0;
    }

    // Light shift at the trapping-light frequency, same structure with the
    // a.c. polarizabilities and F^2 = 2 I/(eps0 c).
    if (f.intensity != 0.0) {
        const double F2 = detail::light_field_sq(f.intensity);
        t.xi += detail::polarizability_shift_hz(c.alpha_s_ac, F2);
        if (N >= 1) {
            const double tens =
                2.0 * detail::polarizability_shift_hz(c.alpha_t_ac, F2);
            t.gamma += tens;
            t.xi += -tens * nn1 / 3.0;
        }
    }

    // Electric-quadrupole shift from the trap field gradient.
    if (N >= 1 && f.V_zz != 0.0) {
        const double q = detail::quadrupole_coeff_hz(c.e14, f.V_zz);
        t.gamma += q;
        t.xi += -q * nn1 / 3.0;
    }
    return t;
}

// Energy (Hz, excluding xi) of a pure product state |M_N; M_s> under the
// diagonal terms plus the diagonal part of the spin-rotation coupling.
inline double product_state_energy(const LevelCoefficients& c,
                                   const DiagonalTerms& t, double B, int M_N,
                                   double M_s) {
    const auto& k = constants();
    return c.c_e * M_s * M_N -
           t.mu_sign * t.g_e_prime * k.mu_B * B * M_s / k.h -
           t.mu_sign * t.g_l * k.mu_B * B * M_N / k.h +
           t.gamma * M_N * M_N + t.mu_sign * t.zeta_B * M_s * M_N * M_N;
}

struct EigenLevel {
    double energy = 0.0;       // Hz, relative to xi
    double M_F = 0.0;          // exact quantum number
    SpinState label;           // adiabatic (dominant-component) label
    // Amplitudes on the two basis states of the block, ordered by M_s
    // ascending; {1, 0} for the pure stretched states.
    std::array<double, 2> mixing = {1.0, 0.0};
};

// All ten spin eigenstates of a para (I = 0), N = 2 level, solved per
// M_F block in closed form.  Sorted by M_F ascending, then energy ascending.
inline std::vector<EigenLevel> diagonalize_para_n2(
    const LevelCoefficients& c, const DiagonalTerms& t, double B,
    Species species = Species::matter) {
    if (c.N != 2) {
        throw Error(ErrorKind::unsupported_level,
                    "diagonalize_para_n2: level (v=" + std::to_string(c.v) +
                        ", N=" + std::to_string(c.N) + ") is not an N=2 level");
    }
    const auto& basis = para_n2_basis();
    std::vector<EigenLevel> out;
    out.reserve(kParaN2Dim);

    auto make_state = [&](const BasisState& b) {
        SpinState s;
        s.v = c.v;
        s.N = c.N;
        s.two_M_s = b.two_M_s;
        s.M_N = b.M_N;
        s.M_I = 0;
        s.species = species;
        return s;
    };

    // Stretched 1x1 blocks.
    auto push_pure = [&](std::size_t i) {
        EigenLevel lv;
        lv.energy = product_state_energy(c, t, B, basis[i].M_N, basis[i].M_s());
        lv.M_F = basis[i].M_F();
        lv.label = make_state(basis[i]);
        lv.mixing = {1.0, 0.0};
        out.push_back(lv);
    };

    // 2x2 block on basis indices (lo, hi); lo has M_s = -1/2.
    auto push_block = [&](std::size_t lo, std::size_t hi) {
        const double a = product_state_energy(c, t, B, basis[lo].M_N, -0.5);
        const double d = product_state_energy(c, t, B, basis[hi].M_N, +0.5);
        constexpr int N = 2;
        const double ladder = 0.5 * std::sqrt(double(
            N * (N + 1) - basis[lo].M_N * (basis[lo].M_N - 1)));
        const double b = c.c_e * ladder;
        const double mean = 0.5 * (a + d);
        const double half_diff = 0.5 * (a - d);
        const double r = std::hypot(half_diff, b);

        for (int sign : {-1, +1}) {
            EigenLevel lv;
            lv.energy = mean + sign * r;
            lv.M_F = basis[lo].M_F();
            // Eigenvector of [[a, b], [b, d]] for eigenvalue lambda:
            // (b, lambda - a), normalized; stable because |lambda - a| ~ r
            // for the eigenvalue further from a.
            double u = b;
            double w = lv.energy - a;
            if (r == 0.0) {  // degenerate, uncoupled
                u = (sign < 0) ? 1.0 : 0.0;
                w = (sign < 0) ? 0.0 : 1.0;
            }
            const double norm = std::hypot(u, w);
            lv.mixing = {u / norm, w / norm};
            const std::size_t dominant =
                (std::abs(lv.mixing[0]) >= std::abs(lv.mixing[1])) ? lo : hi;
            lv.label = make_state(basis[dominant]);
            out.push_back(lv);
        }
        // Sort the pair by energy ascending.
        const std::size_t n = out.size();
        if (out[n - 2].energy > out[n - 1].energy)
            std::swap(out[n - 2], out[n - 1]);
    };

    push_pure(0);
    push_block(1, 2);
    push_block(3, 4);
    push_block(5, 6);
    push_block(7, 8);
    push_pure(9);
    return out;
}

// Which branch of a 2x2 block an expansion refers to.  BranchGroup::lower is
// the predominantly M_s = -1/2 state, which lies lower in energy for matter
// (g_e < 0); for antimatter the energy ordering reverses but the labeling
// stays tied to M_s.
enum class BranchGroup { lower, higher };

// Perturbative closed-form energies (Hz, excluding xi) of the N=2 para spin
// states, valid in the strong-field regime where c_e << mu_B B |g_e|/h.
// Second order in the spin-rotation coupling; two_M_F = 2*M_F in
// {-5,-3,-1,1,3,5}.  When neglect_Z_in_denominators is set, the small
// anisotropic-Zeeman correction Z inside the second-order denominators is
// dropped (the simpler leading form); the default keeps it.
inline double expansion_energy(const LevelCoefficients& c,
                               const DiagonalTerms& t, double B, int two_M_F,
                               BranchGroup group,
                               bool neglect_Z_in_denominators = false) {
    if (c.N != 2) {
        throw Error(ErrorKind::unsupported_level,
                    "expansion_energy: requires an N=2 level");
    }
    const int atmf = std::abs(two_M_F);
    if (two_M_F == 0 || atmf % 2 == 0 || atmf > 5) {
        throw Error(ErrorKind::domain,
                    "expansion_energy: two_M_F must be odd with |2 M_F| <= 5");
    }
    // The stretched M_F = +-5/2 states are pure: only M_s = +1/2 exists at
    // M_F = +5/2 and only M_s = -1/2 at M_F = -5/2.
    if ((two_M_F == 5 && group == BranchGroup::lower) ||
        (two_M_F == -5 && group == BranchGroup::higher)) {
        throw Error(ErrorKind::domain,
                    "expansion_energy: no such state (stretched M_F has a "
                    "single M_s character)");
    }
    const auto& k = constants();
    const double mB = t.mu_sign * k.mu_B * B / k.h;  // Hz per unit g-factor
    if (mB == 0.0) {
        throw Error(ErrorKind::domain,
                    "expansion_energy: requires nonzero magnetic field");
    }
    const double g = t.g_e_prime;
    const double gl = t.g_l;
    // Z = zeta_B/(mu_B B/h) is dimensionless and species-invariant.
    const double Z = t.zeta_B / (k.mu_B * B / k.h);
    const double ce = c.c_e;
    const double gam = t.gamma;
    const bool low = (group == BranchGroup::lower);  // M_s = -1/2 character
    const double ce2 = ce * ce / mB;
    const double zd = neglect_Z_in_denominators ? 0.0 : Z;
    const double den5 = 2.0 * g - 2.0 * gl - 5.0 * zd;
    const double den1 = 2.0 * g - 2.0 * gl - zd;

    switch (two_M_F) {
        case -5:  // pure |-2; -1/2>
            return ce + 4.0 * gam + 0.5 * mB * (g + 4.0 * gl - 4.0 * Z);
        case +5:  // pure |+2; +1/2>
            return ce + 4.0 * gam - 0.5 * mB * (g + 4.0 * gl - 4.0 * Z);
        case -3:
            if (low)  // ~|-1; -1/2>
                return 0.5 * ce + gam + 2.0 * ce2 / den5 +
                       0.5 * mB * (g + 2.0 * gl - Z);
            // ~|-2; +1/2>
            return -ce + 4.0 * gam - 2.0 * ce2 / den5 -
                   0.5 * mB * (g - 4.0 * (gl + Z));
        case +3:
            if (low)  // ~|+2; -1/2>
                return -ce + 4.0 * gam + 2.0 * ce2 / den5 +
                       0.5 * mB * (g - 4.0 * (gl + Z));
            // ~|+1; +1/2>
            return 0.5 * ce + gam - 2.0 * ce2 / den5 -
                   0.5 * mB * (g + 2.0 * gl - Z);
        case -1:
            if (low)  // ~|0; -1/2>
                return 0.5 * mB * g + 3.0 * ce2 / den1;
            // ~|-1; +1/2>
            return -0.5 * ce + gam - 3.0 * ce2 / den1 -
                   0.5 * mB * (g - 2.0 * gl - Z);
        default:  // two_M_F == +1
            if (low)  // ~|+1; -1/2>
                return -0.5 * ce + gam + 3.0 * ce2 / den1 +
                       0.5 * mB * (g - 2.0 * gl - Z);
            // ~|0; +1/2>
            return -0.5 * mB * g - 3.0 * ce2 / den1;
    }
}

// Fully decoupled (zeroth-order) energy of a product state, Hz: spin-rotation
// diagonal + electron and rotational Zeeman + anisotropic electron Zeeman.
inline double decoupled_energy(const LevelCoefficients& c, double B, int M_N,
                               double M_s, Species species = Species::matter) {
    const auto& k = constants();
    const double sign = (species == Species::matter) ? 1.0 : -1.0;
    double e = c.c_e * M_s * M_N -
               sign * c.g_e * k.mu_B * B * M_s / k.h -
               sign * c.g_r * k.mu_n * B * M_N / k.h;
    if (c.N >= 1) {
        const double nn1 = double(c.N) * (c.N + 1);
        e += -sign * c.g_t * k.mu_B * B * M_s *
             (3.0 * M_N * M_N - nn1) / (detail::tensor_norm(c.N) * k.h);
    }
    return e;
}

// Spin energy (Hz) of an ortho (I = 1) level in the decoupled strong-field
// basis |M_s, M_I, M_N>; includes Fermi contact b_F, dipolar d_1, and the
// three Zeeman terms (g_p = bare proton g-factor).
inline double ortho_energy(const LevelCoefficients& c, double B, double M_s,
                           int M_I, int M_N,
                           Species species = Species::matter) {
    if (c.N % 2 == 0) {
        throw Error(ErrorKind::unsupported_level,
                    "ortho_energy: requires odd N (ortho nuclear spin I=1)");
    }
    const auto& k = constants();
    const double sign = (species == Species::matter) ? 1.0 : -1.0;
    const double nn1 = double(c.N) * (c.N + 1);
    const double dterm = c.d_1 / double((2 * c.N - 1) * (2 * c.N + 3)) *
                         ((2.0 / 3.0) * nn1 * M_N - 2.0 * M_N * M_N * M_I) *
                         M_s;
    return c.c_e * M_s * M_N + c.b_F * M_s * M_I + dterm -
           sign * c.g_e * k.mu_B * B * M_s / k.h -
           sign * k.g_p * k.mu_n * B * M_I / k.h -
           sign * c.g_r * k.mu_n * B * M_N / k.h;
}

// Field-insensitive difference of the two nuclear-spin-flip frequencies
// measured in opposite electron spin orientations:
// delta f = b_F - 2 d_1 M_N^2 / (4 N(N+1) - 3), Hz.
inline double nuclear_spinflip_difference(const LevelCoefficients& c,
                                          int M_N) {
    if (c.N % 2 == 0) {
        throw Error(ErrorKind::unsupported_level,
                    "nuclear_spinflip_difference: requires odd N");
    }
    return c.b_F -
           2.0 * c.d_1 * M_N * M_N / (4.0 * c.N * (c.N + 1) - 3.0);
}

}  // namespace h2pt
