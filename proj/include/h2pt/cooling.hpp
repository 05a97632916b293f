#pragma once
// 1D classical dynamics of a Be+ / (anti-)H2+ pair in a double-well coupling
// trap: velocity-Verlet integration with regularized Coulomb coupling,
// exchange-time prediction, frequency-sweep cooling protocols, and ensemble
// statistics over Boltzmann-distributed initial energies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"

namespace h2pt {

struct ParticleState {
    double mass = 0.0;    // kg
    double charge = 0.0;  // C, signed
    double z = 0.0;       // m
    double v = 0.0;       // m/s

    void validate() const {
        if (!(mass > 0.0) || charge == 0.0) {
            throw Error(ErrorKind::invariant,
                        "ParticleState: mass > 0 and charge != 0 required");
        }
    }
};

enum class SpeciesPair { matter_pair, antimatter_pair };

// Full exchange time of the axial energies of two resonantly coupled ions in
// a double well: tau_ex = 2 pi^2 eps0 s0^3 sqrt(m_a m_b) w_z / |q_a q_b|.
inline double exchange_time(double m_a, double m_b, double q_a, double q_b,
                            double omega_z, double s0) {
    if (!(m_a > 0.0 && m_b > 0.0 && omega_z > 0.0 && s0 > 0.0) || q_a == 0.0 ||
        q_b == 0.0) {
        throw Error(ErrorKind::domain,
                    "exchange_time: all magnitudes must be positive");
    }
    const auto& k = constants();
    return 2.0 * k.pi * k.pi * k.epsilon0 * s0 * s0 * s0 *
           std::sqrt(m_a * m_b) * omega_z / std::abs(q_a * q_b);
}

// Symmetric double-well potential: two minima at -+s0/2, per-species
// curvature m_i w_i^2 at its own minimum.  Profile (per half, x = distance
// from the nearer minimum): harmonic 1/2 k x^2 on the outer side, softened
// quartic 1/2 k x^2 (1 - x^2/(2 b^2)) with b = s0/2 on the inner side, which
// is C2 at the minima and at the midpoint barrier (height k b^2/4).
struct DoubleWell {
    double s0 = 0.0;       // m
    double omega_a = 0.0;  // rad/s, particle a (well at -s0/2)
    double omega_b = 0.0;  // rad/s, particle b (well at +s0/2)
    SpeciesPair pair = SpeciesPair::matter_pair;

    // Potential energy (J) of a particle of mass m / angular frequency w
    // whose own well sits at z = center.
    static double well_potential(double z, double center, double s0, double m,
                                 double w) {
        const double k = m * w * w;
        const double b = 0.5 * s0;
        // Nearer minimum: the particle's own well or the mirror well.
        const double zc = (std::abs(z - center) <= std::abs(z + center))
                              ? center
                              : -center;
        const double x = z - zc;
        const bool inner = (zc < 0.0) ? (x > 0.0 && x <= 2.0 * b)
                                      : (x < 0.0 && x >= -2.0 * b);
        if (inner) {
            return 0.5 * k * x * x * (1.0 - x * x / (2.0 * b * b));
        }
        return 0.5 * k * x * x;
    }

    static double well_force(double z, double center, double s0, double m,
                             double w) {
        const double k = m * w * w;
        const double b = 0.5 * s0;
        const double zc = (std::abs(z - center) <= std::abs(z + center))
                              ? center
                              : -center;
        const double x = z - zc;
        const bool inner = (zc < 0.0) ? (x > 0.0 && x <= 2.0 * b)
                                      : (x < 0.0 && x >= -2.0 * b);
        if (inner) {
            return -k * x * (1.0 - x * x / (b * b));
        }
        return -k * x;
    }
};

inline DoubleWell build_double_well(double s0, double omega_a, double omega_b,
                                    SpeciesPair pair) {
    const auto& k = constants();
    const double two_pi = 2.0 * k.pi;
    if (!(s0 >= 0.1e-3 && s0 <= 2e-3)) {
        throw Error(ErrorKind::config,
                    "build_double_well: s0 must be in [0.1, 2] mm");
    }
    for (double w : {omega_a, omega_b}) {
        if (!(w >= two_pi * 50e3 && w <= two_pi * 1000e3)) {
            throw Error(ErrorKind::config,
                        "build_double_well: omega must be within "
                        "2 pi x [50, 1000] kHz");
        }
    }
    DoubleWell well;
    well.s0 = s0;
    well.omega_a = omega_a;
    well.omega_b = omega_b;
    well.pair = pair;
    return well;
}

// Frequency sweep of the b-particle well, realized as a staircase of n_steps
// curvature levels following the linear-in-time omega^2 ramp (curvature is
// proportional to the applied voltage).
struct SweepProtocol {
    double f_start = 0.0;  // Hz
    double f_end = 0.0;    // Hz
    double duration = 0.0; // s
    int n_steps = 1;

    void validate() const {
        if (!(duration > 0.0) || n_steps < 1 || !(f_start > 0.0) ||
            !(f_end > 0.0)) {
            throw Error(ErrorKind::config,
                        "SweepProtocol: need duration > 0, n_steps >= 1, "
                        "positive frequencies");
        }
    }

    // omega^2 of the swept well at time t (clamped to the final value).
    double omega_sq(double t) const {
        const auto& k = constants();
        const double w0 = 2.0 * k.pi * f_start;
        const double w1 = 2.0 * k.pi * f_end;
        double frac = std::clamp(t / duration, 0.0, 1.0);
        if (n_steps > 1) {
            // Hold the midpoint value of each staircase segment.
            const double seg = std::floor(frac * n_steps);
            frac = std::min((seg + 0.5) / n_steps, 1.0);
        }
        return w0 * w0 + (w1 * w1 - w0 * w0) * frac;
    }
};

inline constexpr double kCoulombRegularization = 1e-6;  // m

struct IntegrationResult {
    std::vector<double> t;    // s (sampled at the configured stride)
    std::vector<double> z_a, v_a, E_a;  // particle a trajectory and energy (J)
    std::vector<double> z_b, v_b, E_b;
    bool collision = false;   // separation fell below the regularization floor
    double collision_time = 0.0;
    ParticleState final_a, final_b;
};

namespace detail {

// Regularized 1D Coulomb force on particle a (Newton's third law gives -F
// on b): F_a = q_a q_b / (4 pi eps0 (d^2 + eps^2)) * sign(z_a - z_b).
inline double coulomb_force(double q_a, double q_b, double z_a, double z_b,
                            double eps) {
    const auto& k = constants();
    const double d = z_a - z_b;
    const double mag = q_a * q_b / (4.0 * k.pi * k.epsilon0 *
                                    (d * d + eps * eps));
    return (d >= 0.0) ? mag : -mag;
}

// Potential energy consistent with the regularized force:
// U(d) = q_a q_b/(4 pi eps0 eps) * (pi/2 - atan(|d|/eps)).
inline double coulomb_potential(double q_a, double q_b, double z_a,
                                double z_b, double eps) {
    const auto& k = constants();
    const double d = std::abs(z_a - z_b);
    return q_a * q_b / (4.0 * k.pi * k.epsilon0 * eps) *
           (0.5 * k.pi - std::atan(d / eps));
}

}  // namespace detail

// Velocity-Verlet integration of the coupled pair.  Particle a sits in the
// well at -s0/2 (fixed frequency), particle b at +s0/2; a sweep, when given,
// ramps the b-well curvature.  Energies are per-particle kinetic + own-well
// potential + half the mutual Coulomb energy.
inline IntegrationResult integrate(ParticleState a, ParticleState b,
                                   const DoubleWell& well, double dt,
                                   double t_end,
                                   const std::optional<SweepProtocol>& sweep =
                                       std::nullopt,
                                   std::int64_t sample_stride = 1000,
                                   double eps = kCoulombRegularization,
                                   bool include_coulomb = true) {
    a.validate();
    b.validate();
    if (!(dt > 0.0 && dt <= 100e-9)) {
        throw Error(ErrorKind::domain, "integrate: dt must be in (0, 100 ns]");
    }
    const std::int64_t n_steps = std::int64_t(t_end / dt);
    if (n_steps > std::int64_t(1e9)) {
        throw Error(ErrorKind::domain, "integrate: t_end/dt exceeds 1e9");
    }
    if (sweep) sweep->validate();

    const double ca = -0.5 * well.s0;
    const double cb = +0.5 * well.s0;
    double wb_sq = sweep ? sweep->omega_sq(0.0)
                         : well.omega_b * well.omega_b;

    auto forces = [&](double za, double zb, double wbsq, double& Fa,
                      double& Fb) {
        const double Fc = include_coulomb
                              ? detail::coulomb_force(a.charge, b.charge, za,
                                                      zb, eps)
                              : 0.0;
        Fa = DoubleWell::well_force(za, ca, well.s0, a.mass, well.omega_a) +
             Fc;
        Fb = DoubleWell::well_force(zb, cb, well.s0, b.mass,
                                    std::sqrt(wbsq)) -
             Fc;
    };

    IntegrationResult res;
    double Fa, Fb;
    forces(a.z, b.z, wb_sq, Fa, Fb);

    auto sample = [&](double t) {
        const double uc = include_coulomb
                              ? detail::coulomb_potential(a.charge, b.charge,
                                                          a.z, b.z, eps)
                              : 0.0;
        res.t.push_back(t);
        res.z_a.push_back(a.z);
        res.v_a.push_back(a.v);
        res.E_a.push_back(0.5 * a.mass * a.v * a.v +
                          DoubleWell::well_potential(a.z, ca, well.s0, a.mass,
                                                     well.omega_a) +
                          0.5 * uc);
        res.z_b.push_back(b.z);
        res.v_b.push_back(b.v);
        res.E_b.push_back(0.5 * b.mass * b.v * b.v +
                          DoubleWell::well_potential(b.z, cb, well.s0, b.mass,
                                                     std::sqrt(wb_sq)) +
                          0.5 * uc);
    };
    sample(0.0);

    for (std::int64_t i = 0; i < n_steps; ++i) {
        const double t_next = (i + 1) * dt;
        a.v += 0.5 * dt * Fa / a.mass;
        b.v += 0.5 * dt * Fb / b.mass;
        a.z += dt * a.v;
        b.z += dt * b.v;
        if (sweep) wb_sq = sweep->omega_sq(t_next);
        forces(a.z, b.z, wb_sq, Fa, Fb);
        a.v += 0.5 * dt * Fa / a.mass;
        b.v += 0.5 * dt * Fb / b.mass;
        if (include_coulomb && std::abs(a.z - b.z) < eps) {
            res.collision = true;
            res.collision_time = t_next;
            sample(t_next);
            break;
        }
        if ((i + 1) % sample_stride == 0 || i + 1 == n_steps) {
            sample(t_next);
        }
    }
    res.final_a = a;
    res.final_b = b;
    return res;
}

// Cooling-protocol configuration for one Be+ / (anti-)H2+ run.  The Be+ ion
// starts effectively at rest in its own well; the molecular ion starts at a
// turning point of its well with the requested energy.  The sweep ramps the
// Be+ well curvature; the bare well frequencies are Coulomb-compensated so
// the stated frequencies are the effective small-oscillation values.
struct CoolingConfig {
    double s0 = 0.7e-3;                 // m
    double nu_z = 300e3;                // Hz, molecular-ion well frequency
    double sweep_start = 270e3;         // Hz (Be+ well, start of ramp)
    double sweep_end = 305e3;           // Hz; overshoot past nu_z compensates
                                        // the Be+ well's own amplitude-
                                        // dependent softening at high energy
    double sweep_duration = 1.0;        // s
    int sweep_steps = 3000;
    double hold_duration = 0.0;         // s, optional resonant stage after
    double dt = 50e-9;                  // s
    SpeciesPair pair = SpeciesPair::matter_pair;
};

// Defaults that capture the antimatter pair: the attractive Coulomb
// interaction plus anharmonic softening place a hot (up to ~17 K k_B)
// anti-H2+ well below 270 kHz, so the ramp starts lower and runs longer.
inline CoolingConfig antimatter_config() {
    CoolingConfig cfg;
    cfg.pair = SpeciesPair::antimatter_pair;
    cfg.sweep_start = 250e3;
    cfg.sweep_duration = 1.5;
    return cfg;
}

namespace detail {

// Shift of a well's squared frequency produced by the Coulomb interaction
// with the other ion sitting a distance s0 away: d2/dz2 of the (un-
// regularized) pair potential is 2 q_a q_b/(4 pi eps0 s0^3).
inline double coulomb_curvature_shift(double q_a, double q_b, double s0,
                                      double mass) {
    const auto& k = constants();
    return 2.0 * q_a * q_b / (4.0 * k.pi * k.epsilon0 * s0 * s0 * s0 * mass);
}

// Bare well angular frequency giving the requested effective frequency once
// the Coulomb curvature is added.
inline double compensated_omega(double f_eff, double q_a, double q_b,
                                double s0, double mass) {
    const auto& k = constants();
    const double w = 2.0 * k.pi * f_eff;
    const double shift = coulomb_curvature_shift(q_a, q_b, s0, mass);
    const double w2 = w * w - shift;
    if (!(w2 > 0.0)) {
        throw Error(ErrorKind::domain,
                    "compensated_omega: Coulomb curvature exceeds well "
                    "curvature");
    }
    return std::sqrt(w2);
}

// Inner-side turning point displacement x for energy E in the softened
// quartic U = 1/2 k x^2 (1 - x^2/(2 b^2)); valid for E below the barrier
// k b^2/4.
inline double quartic_turning_point(double E, double k_spring, double b) {
    const double barrier = 0.25 * k_spring * b * b;
    if (E >= barrier) {
        throw Error(ErrorKind::domain,
                    "quartic_turning_point: energy above the well barrier");
    }
    // x^2 = b^2 (1 - sqrt(1 - 4E/(k b^2))) (smaller root).
    const double x2 =
        b * b * (1.0 - std::sqrt(1.0 - 4.0 * E / (k_spring * b * b)));
    return std::sqrt(x2);
}

}  // namespace detail

// Run the sweep protocol (plus optional resonant hold stage) for a molecular
// ion of the given initial axial energy; returns its final total energy (J).
inline double simulate_cooling(double initial_energy,
                               const CoolingConfig& cfg) {
    if (initial_energy < 0.0) {
        throw Error(ErrorKind::domain,
                    "simulate_cooling: initial_energy must be >= 0");
    }
    const auto& k = constants();
    const bool anti = (cfg.pair == SpeciesPair::antimatter_pair);
    ParticleState mol;  // particle a, well at -s0/2
    mol.mass = k.mass_H2plus;
    mol.charge = anti ? -k.e : k.e;
    ParticleState be;  // particle b, well at +s0/2 (swept)
    be.mass = k.mass_Be9plus;
    be.charge = k.e;

    const double wa = detail::compensated_omega(cfg.nu_z, mol.charge,
                                                be.charge, cfg.s0, mol.mass);
    const double wb0 = detail::compensated_omega(cfg.sweep_start, mol.charge,
                                                 be.charge, cfg.s0, be.mass);
    DoubleWell well = build_double_well(cfg.s0, wa, wb0, cfg.pair);

    // Place the molecule at the inner turning point of its well; Be+ at its
    // Coulomb-shifted equilibrium (at rest).
    mol.z = -0.5 * cfg.s0;
    if (initial_energy > 0.0) {
        mol.z += detail::quartic_turning_point(
            initial_energy, mol.mass * wa * wa, 0.5 * cfg.s0);
    }
    mol.v = 0.0;
    be.z = 0.5 * cfg.s0;
    be.v = 0.0;

    SweepProtocol sweep;
    sweep.f_start = cfg.sweep_start;
    sweep.f_end = cfg.sweep_end;
    sweep.duration = cfg.sweep_duration;
    sweep.n_steps = cfg.sweep_steps;
    // Compensate the sweep endpoints too: sweep in bare frequency such that
    // the staircase passes the stated effective values.
    const double shift = detail::coulomb_curvature_shift(
        mol.charge, be.charge, cfg.s0, be.mass);
    auto bare = [&](double f) {
        const double w = 2.0 * k.pi * f;
        const double w2 = w * w - shift;
        if (!(w2 > 0.0)) {
            throw Error(ErrorKind::domain,
                        "simulate_cooling: sweep frequency too low for "
                        "Coulomb compensation");
        }
        return std::sqrt(w2) / (2.0 * k.pi);
    };
    sweep.f_start = bare(cfg.sweep_start);
    sweep.f_end = bare(cfg.sweep_end);

    const double t_total = cfg.sweep_duration + cfg.hold_duration;
    auto res = integrate(mol, be, well, cfg.dt, t_total, sweep, 1 << 16);
    if (res.collision) {
        throw Error(ErrorKind::numerical,
                    "simulate_cooling: particle collision at t = " +
                        std::to_string(res.collision_time));
    }
    return res.E_a.back();
}

// Deterministic exponential (Boltzmann) energy draws with mean k_B T, via
// explicit inverse-CDF on the raw 64-bit generator output.
inline std::vector<double> boltzmann_ensemble(double T, int n,
                                              std::uint64_t seed) {
    if (!(T > 0.0) || n < 1) {
        throw Error(ErrorKind::domain,
                    "boltzmann_ensemble: need T > 0 and n >= 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> energies;
    energies.reserve(std::size_t(n));
    const double kT = constants().kB * T;
    for (int i = 0; i < n; ++i) {
        const double u = double(rng() >> 11) * 0x1p-53;  // [0, 1)
        energies.push_back(-kT * std::log1p(-u));
    }
    return energies;
}

// Fraction of a Boltzmann ensemble cooled below the threshold energy by the
// protocol; trajectories run in parallel across hardware threads.
inline double ensemble_cooling_fraction(double T, const CoolingConfig& cfg,
                                        int n, double threshold_energy,
                                        std::uint64_t seed,
                                        int n_threads = 0) {
    const auto energies = boltzmann_ensemble(T, n, seed);
    if (n_threads <= 0) {
        n_threads = int(std::max(1u, std::thread::hardware_concurrency()));
    }
    n_threads = std::min(n_threads, n);
    std::vector<int> success(std::size_t(n), 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += n_threads) {
                try {
                    const double e_final =
                        simulate_cooling(energies[std::size_t(i)], cfg);
                    success[std::size_t(i)] =
                        (e_final < threshold_energy) ? 1 : 0;
                } catch (const Error&) {
                    success[std::size_t(i)] = 0;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    int count = 0;
    for (int s : success) count += s;
    return double(count) / double(n);
}

struct CoolingMapCell {
    double initial_energy = 0.0;  // J
    double nu_z = 0.0;            // Hz
    bool success = false;
    double final_energy = 0.0;    // J
};

struct CoolingMap {
    std::vector<CoolingMapCell> cells;
    // Largest successful initial energy per nu_z (J), aligned with nu_z_grid.
    std::vector<double> boundary;
    std::vector<double> nu_z_grid;
    double fit_slope = 0.0;      // d(boundary energy)/d(nu_z), J per Hz
    double fit_intercept = 0.0;  // J
};

// Success map of fixed-frequency (resonant, harmonic-regime) coupling:
// starting from each grid energy, did the molecular ion's energy drop below
// the threshold at any point within a few exchange periods?
inline CoolingMap cooling_map(const std::vector<double>& energy_grid,
                              const std::vector<double>& nu_z_grid, double s0,
                              double threshold_K,
                              SpeciesPair pair = SpeciesPair::matter_pair,
                              int n_threads = 0) {
    for (std::size_t i = 1; i < energy_grid.size(); ++i) {
        if (energy_grid[i] <= energy_grid[i - 1]) {
            throw Error(ErrorKind::domain, "cooling_map: grids must increase");
        }
    }
    for (std::size_t i = 1; i < nu_z_grid.size(); ++i) {
        if (nu_z_grid[i] <= nu_z_grid[i - 1]) {
            throw Error(ErrorKind::domain, "cooling_map: grids must increase");
        }
    }
    const auto& k = constants();
    const double threshold = threshold_K * k.kB;
    const bool anti = (pair == SpeciesPair::antimatter_pair);

    CoolingMap map;
    map.nu_z_grid = nu_z_grid;
    map.cells.resize(energy_grid.size() * nu_z_grid.size());
    if (n_threads <= 0) {
        n_threads = int(std::max(1u, std::thread::hardware_concurrency()));
    }

    auto run_cell = [&](std::size_t idx) {
        const std::size_t ie = idx % energy_grid.size();
        const std::size_t in = idx / energy_grid.size();
        CoolingMapCell cell;
        cell.initial_energy = energy_grid[ie];
        cell.nu_z = nu_z_grid[in];
        ParticleState mol;
        mol.mass = k.mass_H2plus;
        mol.charge = anti ? -k.e : k.e;
        ParticleState be;
        be.mass = k.mass_Be9plus;
        be.charge = k.e;
        try {
            const double wa = detail::compensated_omega(
                cell.nu_z, mol.charge, be.charge, s0, mol.mass);
            const double wb = detail::compensated_omega(
                cell.nu_z, mol.charge, be.charge, s0, be.mass);
            DoubleWell well = build_double_well(s0, wa, wb, pair);
            mol.z = -0.5 * s0 +
                    ((cell.initial_energy > 0.0)
                         ? detail::quartic_turning_point(
                               cell.initial_energy, mol.mass * wa * wa,
                               0.5 * s0)
                         : 0.0);
            be.z = 0.5 * s0;
            const double tau = exchange_time(mol.mass, be.mass, mol.charge,
                                             be.charge, wa, s0);
            auto res = integrate(mol, be, well, 50e-9, 2.5 * tau,
                                 std::nullopt, 400);
            double e_min = res.E_a.back();
            for (double e : res.E_a) e_min = std::min(e_min, e);
            cell.final_energy = e_min;
            cell.success = !res.collision && (e_min < threshold);
        } catch (const Error&) {
            cell.success = false;
            cell.final_energy = cell.initial_energy;
        }
        map.cells[idx] = cell;
    };

    std::vector<std::thread> pool;
    const std::size_t total = map.cells.size();
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = std::size_t(t); i < total;
                 i += std::size_t(n_threads)) {
                run_cell(i);
            }
        });
    }
    for (auto& th : pool) th.join();

    map.boundary.assign(nu_z_grid.size(), 0.0);
    for (std::size_t in = 0; in < nu_z_grid.size(); ++in) {
        for (std::size_t ie = 0; ie < energy_grid.size(); ++ie) {
            const auto& cell = map.cells[in * energy_grid.size() + ie];
            if (cell.success) {
                map.boundary[in] =
                    std::max(map.boundary[in], cell.initial_energy);
            }
        }
    }
    // Least-squares linear fit boundary(nu_z).
    const std::size_t n = nu_z_grid.size();
    if (n >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += nu_z_grid[i];
            sy += map.boundary[i];
            sxx += nu_z_grid[i] * nu_z_grid[i];
            sxy += nu_z_grid[i] * map.boundary[i];
        }
        const double det = n * sxx - sx * sx;
        if (det != 0.0) {
            map.fit_slope = (n * sxy - sx * sy) / det;
            map.fit_intercept = (sy - map.fit_slope * sx) / n;
        }
    }
    return map;
}

}  // namespace h2pt
