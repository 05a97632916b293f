#pragma once
// Electric-quadrupole (E2) transition amplitudes: Clebsch-Gordan
// coefficients, polarization-geometry tensor factors, Rabi frequencies, and
// the tabulated reduced matrix elements / dimensional factors.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"
#include "h2pt/systematics.hpp"

namespace h2pt {

namespace detail {

inline double factorial(int n) {
    // Exact in double up to 22!; arguments here stay far below that only for
    // small N, so fall back to tgamma beyond the table.
    static const double table[] = {1., 1., 2., 6., 24., 120., 720., 5040.,
                                   40320., 362880., 3628800., 39916800.,
                                   479001600., 6227020800., 87178291200.,
                                   1307674368000., 20922789888000.,
                                   355687428096000., 6402373705728000.,
                                   121645100408832000., 2432902008176640000.};
    if (n < 0) return 0.0;
    if (n < int(sizeof(table) / sizeof(table[0]))) return table[n];
    return std::tgamma(double(n) + 1.0);
}

}  // namespace detail

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j3 m3> for integer angular
// momenta, by the Racah closed-form sum.  Returns 0 when the projection or
// triangle conditions fail.
inline double clebsch_gordan(int j1, int m1, int j2, int m2, int j3, int m3) {
    using detail::factorial;
    if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
    if (m1 + m2 != m3) return 0.0;
    if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
    const double pref =
        std::sqrt((2.0 * j3 + 1.0) * factorial(j1 + j2 - j3) *
                  factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3) /
                  factorial(j1 + j2 + j3 + 1)) *
        std::sqrt(factorial(j1 + m1) * factorial(j1 - m1) * factorial(j2 + m2) *
                  factorial(j2 - m2) * factorial(j3 + m3) * factorial(j3 - m3));
    double sum = 0.0;
    const int k_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
    const int k_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
    for (int k = k_min; k <= k_max; ++k) {
        const double den = factorial(k) * factorial(j1 + j2 - j3 - k) *
                           factorial(j1 - m1 - k) * factorial(j2 + m2 - k) *
                           factorial(j3 - j2 + m1 + k) *
                           factorial(j3 - j1 - m2 + k);
        sum += ((k % 2 == 0) ? 1.0 : -1.0) / den;
    }
    return pref * sum;
}

// Beam/polarization geometry.  xi is the angle between B and the wave vector
// k; gamma is the remaining Euler angle of the frame rotation; the complex
// polarization vector in the wave frame is (cos theta, sin theta e^{i phi}, 0).
struct Geometry {
    double xi = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

// Squared geometry factor |T^(2)q|^2 for q in {-2..2}.
inline double tensor_factor_sq(int q, const Geometry& g) {
    if (q < -2 || q > 2) {
        throw Error(ErrorKind::domain, "tensor_factor_sq: q must be in [-2,2]");
    }
    const double cgp = std::cos(g.gamma + g.theta);
    const double cgm = std::cos(g.gamma - g.theta);
    const double sgp = std::sin(g.gamma + g.theta);
    const double sgm = std::sin(g.gamma - g.theta);
    const double s2g = std::sin(2.0 * g.gamma);
    const double s2t = std::sin(2.0 * g.theta);
    const double cphi = std::cos(g.phi);
    const double sphi = std::sin(g.phi);
    const double sx = std::sin(g.xi);
    const double cx = std::cos(g.xi);
    const double s2x = std::sin(2.0 * g.xi);
    const double c2x = std::cos(2.0 * g.xi);

    if (q == 0) {
        return (1.0 / 8.0) * s2x * s2x *
               (cgm * cgm + cgp * cgp - s2g * s2t * cphi);
    }
    if (q == 1 || q == -1) {
        const double sign = (q == 1) ? -1.0 : 1.0;  // the -+ term, upper = +1
        return (1.0 / 12.0) * c2x * c2x * (cgp * cgp + cgm * cgm) +
               (1.0 / 12.0) * cx * cx * (sgp * sgp + sgm * sgm) +
               (1.0 / 12.0) * (1.0 + 2.0 * c2x) * sx * sx * s2g * s2t * cphi +
               sign * (1.0 / 6.0) * cx * c2x * s2t * sphi;
    }
    // |q| == 2
    const double sign = (q == 2) ? -1.0 : 1.0;
    return (1.0 / 6.0) * sx * sx -
           (1.0 / 12.0) * sx * sx * sx * sx * (cgp * cgp + cgm * cgm) +
           (1.0 / 12.0) * sx * sx * sx * sx * s2g * s2t * cphi +
           sign * (1.0 / 12.0) * sx * s2x * s2t * sphi;
}

// One row of the E2 reduced-matrix-element table: reduced elements in units
// e a0^2 (already divided by sqrt(2N'+1)), the dimensional factor F_if for
// intensities in W/m^2, and the approximate transition frequency.
struct E2Factor {
    int v = 0, N = 0, vp = 0, Np = 0;
    double reduced_bo = 0.0;
    double reduced_var = std::numeric_limits<double>::quiet_NaN();
    double f_if = 0.0;
    double freq_hz = 0.0;
};

class E2FactorTable {
  public:
    void insert(const E2Factor& f) {
        rows_[{f.v, f.N, f.vp, f.Np}] = f;
    }
    const E2Factor& at(int v, int N, int vp, int Np) const {
        auto it = rows_.find({v, N, vp, Np});
        if (it == rows_.end()) {
            throw Error(ErrorKind::unsupported_level,
                        "E2FactorTable: no entry for (" + std::to_string(v) +
                            "," + std::to_string(N) + ")->(" +
                            std::to_string(vp) + "," + std::to_string(Np) +
                            ")");
        }
        return it->second;
    }
    bool contains(int v, int N, int vp, int Np) const {
        return rows_.count({v, N, vp, Np}) != 0;
    }
    std::size_t size() const { return rows_.size(); }
    const std::map<std::tuple<int, int, int, int>, E2Factor>& rows() const {
        return rows_;
    }

  private:
    std::map<std::tuple<int, int, int, int>, E2Factor> rows_;
};

inline E2FactorTable load_e2_factors(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::parse, "load_e2_factors: cannot open " + path);
    }
    E2FactorTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (!std::isdigit(static_cast<unsigned char>(line[first])) &&
            line[first] != '-') {
            continue;  // column-name header line
        }
        std::istringstream ss(line);
        E2Factor f;
        std::string rbo, rvar, fif, freq;
        if (!(ss >> f.v >> f.N >> f.vp >> f.Np >> rbo >> rvar >> fif >> freq)) {
            if (ss.eof() && line.find_first_not_of(" \t\r") == std::string::npos)
                continue;  // blank / comment-only line
            throw Error(ErrorKind::parse,
                        path + ":" + std::to_string(lineno) +
                            ": expected 8 columns (v N v' N' reduced_bo "
                            "reduced_var f_if freq_thz)");
        }
        try {
            f.reduced_bo = std::stod(rbo);
            f.reduced_var = std::stod(rvar);  // "nan" parses to NaN
            f.f_if = std::stod(fif);
            f.freq_hz = std::stod(freq) * 1e12;
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) +
                                              ": malformed numeric field");
        }
        table.insert(f);
    }
    if (table.size() == 0) {
        throw Error(ErrorKind::parse, "load_e2_factors: no rows in " + path);
    }
    return table;
}

// Reconstruct F_if from the reduced element and the transition frequency:
// F_if = (omega_if / 2 hbar c) * reduced * e a0^2, adjusted for intensities
// in W/m^2 via the 27.45 sqrt(I) field conversion in the Rabi formula.
inline double f_if_from_reduced(double reduced_ea02, double freq_hz) {
    const auto& k = constants();
    const double omega = 2.0 * k.pi * freq_hz;
    return omega / (2.0 * k.hbar * k.c) * reduced_ea02 * k.e * k.a0 * k.a0;
}

struct SelectionVerdict {
    bool allowed = true;
    std::string reason;  // violated rule when forbidden
};

// E2 selection rules: N' = N or N +- 2 (0 -> 0 excluded), |Delta M_F| <= 2,
// |Delta M_N| <= 2.
inline SelectionVerdict selection_check(const TransitionSpec& spec) {
    SelectionVerdict v;
    const int dN = std::abs(spec.upper.N - spec.lower.N);
    if (dN != 0 && dN != 2) {
        return {false, "N' must equal N or N +- 2"};
    }
    if (spec.lower.N == 0 && spec.upper.N == 0) {
        return {false, "rotational 0 -> 0 is excluded"};
    }
    if (std::abs(spec.upper.M_N - spec.lower.M_N) > 2) {
        return {false, "|Delta M_N| must be <= 2"};
    }
    if (std::abs(spec.upper.M_F() - spec.lower.M_F()) > 2.0 + 1e-12) {
        return {false, "|Delta M_F| must be <= 2"};
    }
    return v;
}

struct RabiResult {
    double omega_rabi = 0.0;     // rad/s
    int q = 0;                   // Delta M_N
    double cg = 0.0;             // Clebsch-Gordan coefficient
    double tensor_factor = 0.0;  // |T^(2)q|
    double f_if = 0.0;           // dimensional factor (per sqrt(W/m^2))
};

// Rabi frequency Omega = 27.45 * F_if * sqrt(I) * |C| * |T^(2)q| for a spin
// component of an E2 transition with the given beam geometry.
inline RabiResult rabi_frequency(const TransitionSpec& spec,
                                 const E2FactorTable& factors,
                                 double intensity, const Geometry& g) {
    const auto verdict = selection_check(spec);
    if (!verdict.allowed) {
        throw Error(ErrorKind::domain,
                    "rabi_frequency: forbidden transition (" + verdict.reason +
                        ")");
    }
    if (intensity < 0.0) {
        throw Error(ErrorKind::domain, "rabi_frequency: intensity < 0");
    }
    RabiResult r;
    r.q = spec.upper.M_N - spec.lower.M_N;
    r.f_if = factors.at(spec.lower.v, spec.lower.N, spec.upper.v,
                        spec.upper.N).f_if;
    r.cg = clebsch_gordan(spec.lower.N, spec.lower.M_N, 2, r.q, spec.upper.N,
                          spec.upper.M_N);
    r.tensor_factor = std::sqrt(tensor_factor_sq(r.q, g));
    r.omega_rabi = 27.45 * r.f_if * std::sqrt(intensity) * std::abs(r.cg) *
                   r.tensor_factor;
    return r;
}

// Intensity needed to reach a target Rabi frequency (quadratic inversion of
// rabi_frequency).
inline double required_intensity(const TransitionSpec& spec,
                                 const E2FactorTable& factors,
                                 double target_rabi, const Geometry& g) {
    const RabiResult unit = rabi_frequency(spec, factors, 1.0, g);
    if (unit.omega_rabi == 0.0) {
        throw Error(ErrorKind::domain,
                    "required_intensity: transition amplitude vanishes for "
                    "this geometry/component");
    }
    const double ratio = target_rabi / unit.omega_rabi;
    return ratio * ratio;
}

}  // namespace h2pt
