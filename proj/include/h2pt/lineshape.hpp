#pragma once
// Spectral line profiles broadened by the quadratic Doppler shift of
// Boltzmann-distributed axial motion: a Lorentzian convolved with a
// one-sided exponential supported on red (negative) detunings, plus a
// derivative-free line-center fitter and statistical-uncertainty arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"

namespace h2pt {

// Exponential scale of the axial-QDS red tail: sigma = f0 kB T_z/(2 m c^2),
// the mean axial quadratic-Doppler magnitude.
inline double qds_scale_from_temperature(double mass, double T_z, double f0) {
    if (T_z < 0.0) {
        throw Error(ErrorKind::domain,
                    "qds_scale_from_temperature: T_z must be >= 0");
    }
    const auto& k = constants();
    return f0 * k.kB * T_z / (2.0 * mass * k.c * k.c);
}

// Fractional statistical uncertainty of the line-center determination,
// delta_int * sqrt(tau_c / tau).
inline double statistical_uncertainty(double delta_int_fractional,
                                      double cycle_time, double total_time) {
    if (!(cycle_time > 0.0) || total_time < cycle_time) {
        throw Error(ErrorKind::domain,
                    "statistical_uncertainty: need total_time >= cycle_time "
                    "> 0");
    }
    return delta_int_fractional * std::sqrt(cycle_time / total_time);
}

namespace detail {

// Normalized Lorentzian of FWHM delta at detuning x.
inline double lorentzian(double x, double delta) {
    const double g = 0.5 * delta;  // HWHM
    return g / (constants().pi * (x * x + g * g));
}

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double fa, double fm,
                               double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

// Density at detuning f (Hz, relative to the unperturbed line center):
// p(f) = int_0^inf L(f + radial_offset + s; delta) exp(-s/sigma)/sigma ds.
// Shifts are red, so the support of the exponential pushes weight to f < 0.
inline double line_density(double f, double delta_int, double qds_scale,
                           double radial_offset = 0.0) {
    if (!(delta_int > 0.0) || qds_scale < 0.0) {
        throw Error(ErrorKind::domain,
                    "line_density: need delta_int > 0 and qds_scale >= 0");
    }
    const double x0 = f + radial_offset;
    if (qds_scale == 0.0) return detail::lorentzian(x0, delta_int);
    const double sigma = qds_scale;
    // Substitute s = sigma*u; split at the Lorentzian peak u* = -x0/sigma
    // when it lies inside the domain, and truncate the exponential tail.
    auto g = [&](double u) {
        return detail::lorentzian(x0 + sigma * u, delta_int) * std::exp(-u);
    };
    const double u_peak = -x0 / sigma;
    const double u_max = 60.0 + std::max(0.0, u_peak) +
                         20.0 * delta_int / sigma;
    const double tol = 1e-10 / delta_int;  // ~1e-10 of a peak density scale
    double result = 0.0;
    double lo = 0.0;
    if (u_peak > 0.0 && u_peak < u_max) {
        // Resolve the narrow Lorentzian: tight window around the peak.
        const double w = 20.0 * delta_int / sigma;
        const double p_lo = std::max(0.0, u_peak - w);
        const double p_hi = std::min(u_max, u_peak + w);
        result += detail::integrate(g, lo, p_lo, tol);
        result += detail::integrate(g, p_lo, p_hi, tol);
        lo = p_hi;
    }
    result += detail::integrate(g, lo, u_max, tol);
    return result;
}

struct LineProfile {
    std::vector<double> detuning;   // Hz
    std::vector<double> amplitude;  // 1/Hz
    double delta_int = 0.0;
    double qds_scale = 0.0;
    double radial_offset = 0.0;
    bool grid_too_coarse = false;  // spacing > delta_int/4
};

inline LineProfile line_profile(double delta_int, double qds_scale,
                                const std::vector<double>& grid,
                                double radial_offset = 0.0) {
    LineProfile p;
    p.detuning = grid;
    p.delta_int = delta_int;
    p.qds_scale = qds_scale;
    p.radial_offset = radial_offset;
    p.amplitude.reserve(grid.size());
    for (double f : grid) {
        p.amplitude.push_back(
            line_density(f, delta_int, qds_scale, radial_offset));
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] - grid[i - 1] > delta_int / 4.0) {
            p.grid_too_coarse = true;
            break;
        }
    }
    return p;
}

struct LineSample {
    double detuning = 0.0;     // Hz
    double probability = 0.0;  // excitation probability (arbitrary scale)
    double weight = 1.0;
};

struct FitResult {
    double f0 = 0.0;          // line-center offset estimate, Hz
    double qds_scale = 0.0;   // sigma estimate, Hz
    double delta_int = 0.0;   // Hz
    double amplitude = 0.0;
    double T_z = 0.0;          // K, when mass and carrier frequency given
    std::array<double, 4> sigma_params{};  // 1-sigma of (f0, sigma, delta, A)
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitInit {
    double f0 = 0.0;
    double qds_scale = 1.0;
    double delta_int = 0.1;
    double amplitude = 1.0;
    double mass = 0.0;        // optional, for T_z conversion
    double carrier_f0 = 0.0;  // optional, Hz
    int max_iterations = 200;
};

namespace detail {

inline double fit_chi2(const std::vector<LineSample>& samples,
                       const std::array<double, 4>& p) {
    const double f0 = p[0];
    const double sigma = std::abs(p[1]);
    const double delta = std::abs(p[2]);
    const double amp = p[3];
    if (delta < 1e-12) return 1e300;
    double chi2 = 0.0;
    for (const auto& s : samples) {
        const double m = amp * line_density(s.detuning - f0, delta, sigma);
        const double r = s.probability - m;
        chi2 += s.weight * r * r;
    }
    return chi2;
}

}  // namespace detail

// Weighted least-squares fit of (f0, qds_scale, delta_int, amplitude) by
// Nelder-Mead simplex with one restart; 1-sigma uncertainties from the local
// quadratic approximation of chi^2 at the optimum.
inline FitResult fit_line_center(const std::vector<LineSample>& samples,
                                 const FitInit& init) {
    if (samples.size() < 8) {
        throw Error(ErrorKind::domain,
                    "fit_line_center: need at least 8 samples");
    }
    int n_left = 0, n_right = 0;
    for (const auto& s : samples) {
        (s.detuning < init.f0 ? n_left : n_right)++;
    }
    if (n_left == 0 || n_right == 0) {
        throw Error(ErrorKind::domain,
                    "fit_line_center: degenerate design, all samples on one "
                    "side of the initial center");
    }

    auto chi2 = [&](const std::array<double, 4>& p) {
        return detail::fit_chi2(samples, p);
    };

    std::array<double, 4> best{init.f0, init.qds_scale, init.delta_int,
                               init.amplitude};
    double best_val = chi2(best);
    // Absolute convergence floor: noise-free data drives chi2 all the way to
    // rounding level, where a purely relative spread test never triggers.
    const double chi2_floor = 1e-16 * best_val;
    int total_iter = 0;
    bool converged = false;

    for (int restart = 0; restart < 2 && !converged; ++restart) {
        // Initial simplex around the current best.
        std::array<std::array<double, 4>, 5> simplex;
        std::array<double, 5> val;
        const std::array<double, 4> step{
            0.5 * std::max(init.delta_int, std::abs(best[1]) * 0.1),
            0.2 * std::max(std::abs(best[1]), init.delta_int),
            0.2 * std::abs(best[2]) + 1e-6,
            0.2 * std::abs(best[3]) + 1e-12};
        simplex[0] = best;
        val[0] = chi2(best);
        for (int i = 0; i < 4; ++i) {
            simplex[i + 1] = best;
            simplex[i + 1][i] += step[i];
            val[i + 1] = chi2(simplex[i + 1]);
        }
        for (int it = 0; it < init.max_iterations; ++it) {
            ++total_iter;
            // Order: find best, worst, second-worst.
            int ib = 0, iw = 0, is = 0;
            for (int i = 1; i < 5; ++i) {
                if (val[i] < val[ib]) ib = i;
                if (val[i] > val[iw]) iw = i;
            }
            for (int i = 0; i < 5; ++i) {
                if (i != iw && val[i] > val[is]) is = i;
            }
            if (val[iw] - val[ib] <
                1e-12 * (std::abs(val[ib]) + 1e-300) + chi2_floor + 1e-300) {
                converged = true;
                best = simplex[ib];
                best_val = val[ib];
                break;
            }
            std::array<double, 4> centroid{};
            for (int i = 0; i < 5; ++i) {
                if (i == iw) continue;
                for (int d = 0; d < 4; ++d) centroid[d] += simplex[i][d] / 4.0;
            }
            auto blend = [&](double t) {
                std::array<double, 4> p;
                for (int d = 0; d < 4; ++d) {
                    p[d] = centroid[d] + t * (simplex[iw][d] - centroid[d]);
                }
                return p;
            };
            const auto refl = blend(-1.0);
            const double v_refl = chi2(refl);
            if (v_refl < val[ib]) {
                const auto expd = blend(-2.0);
                const double v_exp = chi2(expd);
                if (v_exp < v_refl) {
                    simplex[iw] = expd;
                    val[iw] = v_exp;
                } else {
                    simplex[iw] = refl;
                    val[iw] = v_refl;
                }
            } else if (v_refl < val[is]) {
                simplex[iw] = refl;
                val[iw] = v_refl;
            } else {
                const auto contr = blend(0.5);
                const double v_con = chi2(contr);
                if (v_con < val[iw]) {
                    simplex[iw] = contr;
                    val[iw] = v_con;
                } else {
                    // Shrink toward the best vertex.
                    for (int i = 0; i < 5; ++i) {
                        if (i == ib) continue;
                        for (int d = 0; d < 4; ++d) {
                            simplex[i][d] =
                                simplex[ib][d] +
                                0.5 * (simplex[i][d] - simplex[ib][d]);
                        }
                        val[i] = chi2(simplex[i]);
                    }
                }
            }
            best = simplex[ib];
            best_val = val[ib];
        }
    }

    FitResult r;
    r.f0 = best[0];
    r.qds_scale = std::abs(best[1]);
    r.delta_int = std::abs(best[2]);
    r.amplitude = best[3];
    r.chi2 = best_val;
    r.iterations = total_iter;
    r.converged = converged;
    if (!converged) {
        throw Error(ErrorKind::numerical,
                    "fit_line_center: no convergence after " +
                        std::to_string(total_iter) +
                        " iterations, last chi2 = " + std::to_string(best_val));
    }
    if (init.mass > 0.0 && init.carrier_f0 > 0.0) {
        const auto& k = constants();
        r.T_z = r.qds_scale * 2.0 * init.mass * k.c * k.c /
                (k.kB * init.carrier_f0);
    }
    // 1-sigma estimates from the diagonal quadratic curvature of chi^2,
    // scaled by the reduced chi^2 (pseudo weights).
    const double dof = std::max<double>(1.0, double(samples.size()) - 4.0);
    const double s2 = best_val / dof;
    for (int d = 0; d < 4; ++d) {
        const double h = std::max(1e-8, 1e-4 * std::abs(best[d]));
        auto p1 = best, p2 = best;
        p1[d] += h;
        p2[d] -= h;
        const double c = (chi2(p1) - 2.0 * best_val + chi2(p2)) / (h * h);
        r.sigma_params[d] = (c > 0.0) ? std::sqrt(2.0 * s2 / c) : 0.0;
    }
    return r;
}

}  // namespace h2pt
