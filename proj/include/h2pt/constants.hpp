#pragma once
// CODATA-2018 constants plus a few derived quantities, SI units.

namespace h2pt {

struct PhysicalConstants {
    double pi = 3.14159265358979323846;
    double mu_B = 9.2740100783e-24;   // Bohr magneton, J/T
    double mu_n = 5.0507837461e-27;   // nuclear magneton, J/T
    double kB = 1.380649e-23;         // J/K
    double h = 6.62607015e-34;        // J s
    double hbar = 1.054571817e-34;    // J s
    double c = 2.99792458e8;          // m/s
    double e = 1.602176634e-19;       // C
    double a0 = 5.29177210903e-11;    // Bohr radius, m
    double epsilon0 = 8.8541878128e-12;  // F/m
    double mu0 = 1.25663706212e-6;       // N/A^2
    double alpha_fs = 7.2973525693e-3;   // fine-structure constant
    double amu = 1.66053906660e-27;      // kg
    double m_e = 9.1093837015e-31;       // kg
    double m_p = 1.67262192369e-27;      // kg
    double g_e_free = -2.00231930436256; // free-electron g factor
    double g_p = 5.5856946893;           // bare-proton g factor

    double mass_H2plus = 2 * 1.67262192369e-27 + 9.1093837015e-31;  // kg
    double mass_Be9plus =
        9.012183065 * 1.66053906660e-27 - 9.1093837015e-31;  // kg

    double hartree = 4.3597447222071e-18;       // J
    double hartree_hz = 4.3597447222071e-18 / 6.62607015e-34;  // Hz
    // Atomic unit of electric field E_h/(e a0), V/m.
    double atomic_field = 5.14220674763e11;
};

inline const PhysicalConstants& constants() {
    static const PhysicalConstants k;
    return k;
}

}  // namespace h2pt
