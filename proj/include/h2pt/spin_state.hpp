#pragma once

// Spin-state labels (v, N, M_s, M_N, M_I) and the species (charge)
// conjugation rules: conjugation negates all projection quantum numbers
// and flips the signs of the magnetic moments mu_B, mu_n.

#include <utility>

#include "h2pt/errors.hpp"

namespace h2pt {

enum class Species { matter, antimatter };

struct SpinState {
    int v = 0;
    int N = 0;
    int two_M_s = 1; // 2*M_s, i.e. +1 or -1
    int M_N = 0;
    int M_I = 0;     // 0 for para (even N), -1..1 for ortho
    Species species = Species::matter;

    double M_s() const { return 0.5 * two_M_s; }
    double M_F() const { return M_s() + M_N + M_I; }

    void validate() const {
        if (two_M_s != 1 && two_M_s != -1)
            throw Error(ErrorKind::domain, "M_s must be +1/2 or -1/2");
        if (M_N < -N || M_N > N)
            throw Error(ErrorKind::domain, "|M_N| must not exceed N");
        if (M_I < -1 || M_I > 1)
            throw Error(ErrorKind::domain, "M_I must be in {-1,0,1}");
        if (N % 2 == 0 && M_I != 0)
            throw Error(ErrorKind::domain, "even-N (para) states have M_I=0");
    }

    bool operator==(const SpinState&) const = default;
};

inline SpinState charge_conjugate(SpinState s) {
    s.two_M_s = -s.two_M_s;
    s.M_N = -s.M_N;
    s.M_I = -s.M_I;
    s.species =
        s.species == Species::matter ? Species::antimatter : Species::matter;
    return s;
}

// (mu_B sign, mu_n sign): every magnetic-moment term downstream multiplies
// by these. Both flip together for the antimatter species.
inline std::pair<double, double> sign_factors(Species sp) {
    return sp == Species::matter ? std::pair{1.0, 1.0} : std::pair{-1.0, -1.0};
}

} // namespace h2pt
