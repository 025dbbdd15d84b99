#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "smoothing.hpp"
#include "states.hpp"
#include "wigner.hpp"

namespace wigner_deco {

/// σ₀ = (ħ³/Dm)^{1/4}, t₀ = √(ħm/D), t_D = 3^{1/4}·t₀.
struct DecoherenceScales {
    double sigma0 = 0.0;
    double t0 = 0.0;
    double tD = 0.0;
};

inline DecoherenceScales scales(const PhysicalParams& params) {
    params.validate();
    const double hbar = params.hbar;
    const double m = params.mass;
    const double d = params.diffusion_D;
    const double t0 = std::sqrt(hbar * m / d);
    return {std::pow(hbar * hbar * hbar / (d * m), 0.25), t0, std::pow(3.0, 0.25) * t0};
}

/// Covariance C_W(t) = D·t·[[t²/3m², t/2m], [t/2m, 1]] of the Gaussian that
/// propagates the sheared initial field to time t.
struct PropagatorCovariance {
    double time = 0.0;
    CovarianceMatrix2 matrix;

    /// D²t⁴/12m², evaluated without cancellation.
    double det_closed_form(const PhysicalParams& params) const {
        const double dt2 = params.diffusion_D * time * time / params.mass;
        return dt2 * dt2 / 12.0;
    }
};

inline PropagatorCovariance propagator_covariance(double t, const PhysicalParams& params) {
    params.validate();
    if (!std::isfinite(t) || t < 0.0) throw NegativeTimeError("time must be non-negative");
    const double d = params.diffusion_D;
    const double m = params.mass;
    return {t, {d * t * t * t / (3.0 * m * m), d * t * t / (2.0 * m), d * t}};
}

namespace detail {

inline void check_same_hbar(const WignerField& w, const PhysicalParams& params) {
    params.validate();
    if (w.params().hbar != params.hbar) throw ParameterError("field and parameters disagree on hbar");
}

// Largest |p| among momentum rows carrying at least 1e-6 of the peak.
inline double momentum_support(const WignerField& w) {
    const std::size_t n = w.size();
    const double floor = 1e-6 * w.max_abs();
    double reach = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(w(i, k)) >= floor) {
                reach = std::max(reach, std::abs(w.p(k)));
                break;
            }
    return reach;
}

// W(x, p) → W(x − p·t/m, p) by a phase ramp on each momentum row's x spectrum.
inline std::vector<double> shear(const WignerField& w, double t, double mass) {
    const std::size_t n = w.size();
    std::vector<fft::cplx> data(w.values().begin(), w.values().end());
    fft::transform_cols(data, n, n, fft::Direction::forward);
    const double kx_step = 2.0 * std::numbers::pi / w.x_grid().span();
    const double scale = 1.0 / static_cast<double>(n);
    parallel_for(n, [&](std::size_t j) {
        const double kx = kx_step * static_cast<double>(fft::signed_index(j, n));
        for (std::size_t k = 0; k < n; ++k)
            data[j * n + k] *= scale * std::polar(1.0, -kx * w.p(k) * t / mass);
    });
    fft::transform_cols(data, n, n, fft::Direction::backward);
    std::vector<double> out(n * n);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = data[j].real();
    return out;
}

} // namespace detail

/// One-shot solution of the Fokker–Planck flow from t = 0:
/// W(x,p;t) = g(C_W(t)) ⋆ W₀(x − pt/m, p).
inline WignerField evolve_exact(const WignerField& w0, double t, const PhysicalParams& params) {
    detail::check_same_hbar(w0, params);
    const auto prop = propagator_covariance(t, params);
    if (t == 0.0) return w0;
    const double transport = detail::momentum_support(w0) * t / params.mass + 3.0 * std::sqrt(prop.matrix.c_xx);
    if (transport > 0.5 * w0.x_grid().span())
        throw SupportError("transport " + std::to_string(transport) + " exceeds half the grid span");
    WignerField sheared(w0.x_grid(), w0.params(), detail::shear(w0, t, params.mass));
    WignerField out = coarse_grain(sheared, prop.matrix);
    check_normalization(out, "evolve_exact");
    return out;
}

// ---------------------------------------------------------------------------
// Explicit finite-difference engine
// ---------------------------------------------------------------------------

struct FdOptions {
    /// Integer x-refinement applied before stepping; the result is sampled
    /// back onto the original grid.
    std::size_t x_refine = 1;
};

/// Largest dt satisfying both dt ≤ 0.5·dx·m/max|p| and dt ≤ 0.25·dp²/D.
inline double fd_stable_dt(const WignerField& w, const PhysicalParams& params, const FdOptions& options = {}) {
    const double dx = w.dx() / static_cast<double>(options.x_refine);
    const double p_max = std::max(std::abs(w.p(0)), std::abs(w.p(w.size() - 1)));
    return std::min(0.5 * dx * params.mass / p_max, 0.25 * w.dp() * w.dp() / params.diffusion_D);
}

namespace detail {

// Trigonometric upsampling of every momentum row along x by an integer factor.
inline std::vector<double> refine_x(const WignerField& w, std::size_t factor) {
    const std::size_t n = w.size();
    const std::size_t nf = n * factor;
    std::vector<double> out(nf * n);
    parallel_for(n, [&](std::size_t k) {
        std::vector<fft::cplx> coarse(n), fine(nf);
        for (std::size_t i = 0; i < n; ++i) coarse[i] = w(i, k);
        fft::transform(coarse, fft::Direction::forward);
        for (std::size_t j = 0; j < n / 2; ++j) fine[j] = coarse[j];
        for (std::size_t j = n / 2 + 1; j < n; ++j) fine[nf - n + j] = coarse[j];
        fine[n / 2] = 0.5 * coarse[n / 2];
        fine[nf - n / 2] = 0.5 * coarse[n / 2];
        fft::transform(fine, fft::Direction::backward);
        for (std::size_t i = 0; i < nf; ++i) out[i * n + k] = fine[i].real() / static_cast<double>(n);
    });
    return out;
}

} // namespace detail

/// Forward-Euler stepping of ∂W/∂t = −(p/m)∂W/∂x + (D/2)∂²W/∂p² with
/// first-order upwind advection in x and central diffusion in p, periodic
/// in both directions.
inline WignerField evolve_fd(const WignerField& w0, double t, double dt, const PhysicalParams& params,
                             const FdOptions& options = {}) {
    detail::check_same_hbar(w0, params);
    if (!std::isfinite(t) || t < 0.0) throw NegativeTimeError("time must be non-negative");
    if (options.x_refine < 1) throw ParameterError("x_refine must be at least 1");
    const double limit = fd_stable_dt(w0, params, options);
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
        throw StabilityError("dt " + std::to_string(dt) + " exceeds the stability limit " + std::to_string(limit));
    if (t == 0.0) return w0;

    const std::size_t steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    const double h = t / static_cast<double>(steps);
    const std::size_t np = w0.size();
    const std::size_t nx = np * options.x_refine;
    const double dx = w0.dx() / static_cast<double>(options.x_refine);
    const double mu = params.diffusion_D * h / (2.0 * w0.dp() * w0.dp());
    std::vector<double> courant(np);
    for (std::size_t k = 0; k < np; ++k) courant[k] = w0.p(k) / params.mass * h / dx;

    std::vector<double> cur = options.x_refine == 1 ? std::vector<double>(w0.values().begin(), w0.values().end())
                                                    : detail::refine_x(w0, options.x_refine);
    std::vector<double> next(cur.size());
    for (std::size_t s = 0; s < steps; ++s) {
        parallel_for(nx, [&](std::size_t i) {
            const double* row = &cur[i * np];
            const double* left = &cur[((i + nx - 1) % nx) * np];
            const double* right = &cur[((i + 1) % nx) * np];
            double* out = &next[i * np];
            for (std::size_t k = 0; k < np; ++k) {
                const double c = courant[k];
                const double advect = c > 0.0 ? c * (row[k] - left[k]) : c * (right[k] - row[k]);
                const double up = row[(k + 1) % np];
                const double down = row[(k + np - 1) % np];
                out[k] = row[k] - advect + mu * (up - 2.0 * row[k] + down);
            }
        });
        cur.swap(next);
    }

    std::vector<double> values(np * np);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t k = 0; k < np; ++k) values[i * np + k] = cur[i * options.x_refine * np + k];
    WignerField out(w0.x_grid(), w0.params(), std::move(values));
    check_normalization(out, "evolve_fd");
    return out;
}

// ---------------------------------------------------------------------------
// Density-matrix splitting engine
// ---------------------------------------------------------------------------

struct TrotterOptions {
    bool kinetic = true;
    bool decoherence = true;
};

namespace detail {

inline std::size_t step_count(double t, double dt, const PhysicalParams& params) {
    if (!std::isfinite(t) || t < 0.0) throw NegativeTimeError("time must be non-negative");
    const double max_dt = scales(params).t0 / 200.0;
    if (!(dt > 0.0) || dt > max_dt * (1.0 + 1e-12))
        throw StepSizeError("dt " + std::to_string(dt) + " exceeds t0/200 = " + std::to_string(max_dt));
    return static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
}

// exp(−iħk²τ/2m) per DFT bin.
inline std::vector<fft::cplx> kinetic_phases(const PositionGrid& grid, double tau, const PhysicalParams& params) {
    const std::size_t n = grid.size();
    std::vector<fft::cplx> phase(n);
    const double k_step = 2.0 * std::numbers::pi / grid.span();
    for (std::size_t a = 0; a < n; ++a) {
        const double k = k_step * static_cast<double>(fft::signed_index(a, n));
        phase[a] = std::polar(1.0, -params.hbar * k * k * tau / (2.0 * params.mass));
    }
    return phase;
}

} // namespace detail

/// Strang splitting of dρ/dt = −(i/ħ)[p̂²/2m, ρ] − (D/2ħ²)[x̂,[x̂,ρ]]: each
/// factor is the exact flow of its own generator (kinetic phase in the double
/// momentum representation, Gaussian damping of ρ(x, x') in x − x').
inline DensityMatrix evolve_density_trotter(const DensityMatrix& rho0, double t, double dt,
                                            const PhysicalParams& params, const TrotterOptions& options = {}) {
    params.validate();
    const std::size_t steps = detail::step_count(t, dt, params);
    if (steps == 0) return rho0;
    const double h = t / static_cast<double>(steps);
    const auto& grid = rho0.grid();
    const std::size_t n = grid.size();

    std::vector<double> half_damp(n * n), full_damp(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double sep = grid.x(i) - grid.x(j);
            const double rate = params.diffusion_D * sep * sep / (2.0 * params.hbar * params.hbar);
            half_damp[i * n + j] = std::exp(-rate * 0.5 * h);
            full_damp[i * n + j] = std::exp(-rate * h);
        }
    const auto phase = detail::kinetic_phases(grid, h, params);
    const double scale = 1.0 / static_cast<double>(n * n);

    std::vector<fft::cplx> rho(rho0.entries().begin(), rho0.entries().end());
    auto damp = [&](const std::vector<double>& factor) {
        if (!options.decoherence) return;
        for (std::size_t k = 0; k < rho.size(); ++k) rho[k] *= factor[k];
    };
    auto kinetic = [&] {
        if (!options.kinetic) return;
        fft::transform_cols(rho, n, n, fft::Direction::forward);
        fft::transform_rows(rho, n, n, fft::Direction::backward);
        parallel_for(n, [&](std::size_t a) {
            for (std::size_t b = 0; b < n; ++b) rho[a * n + b] *= scale * phase[a] * std::conj(phase[b]);
        });
        fft::transform_cols(rho, n, n, fft::Direction::backward);
        fft::transform_rows(rho, n, n, fft::Direction::forward);
    };

    damp(half_damp);
    for (std::size_t s = 0; s < steps; ++s) {
        kinetic();
        damp(s + 1 < steps ? full_damp : half_damp);
    }
    return DensityMatrix(grid, std::move(rho));
}

// ---------------------------------------------------------------------------
// Random-force Monte Carlo engine
// ---------------------------------------------------------------------------

namespace detail {

// Independent stream per trajectory, keyed by (seed, trajectory index).
inline std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t trajectory) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trajectory), static_cast<std::uint32_t>(trajectory >> 32)};
    return std::mt19937_64(seq);
}

} // namespace detail

/// Final wave functions of n_samples trajectories under the potential F(t)·x,
/// F piecewise constant per step with variance D/dt.
inline std::vector<std::vector<cplx>> montecarlo_trajectories(const WaveFunction& psi0, double t, double dt,
                                                              std::size_t n_samples, std::uint64_t seed,
                                                              const PhysicalParams& params) {
    params.validate();
    if (n_samples < 100) throw ParameterError("Monte Carlo needs at least 100 samples");
    const std::size_t steps = detail::step_count(t, dt, params);
    const auto& grid = psi0.grid();
    const std::size_t n = grid.size();
    const double h = steps ? t / static_cast<double>(steps) : 0.0;
    const auto phase = detail::kinetic_phases(grid, h, params);
    const double force_sd = steps ? std::sqrt(params.diffusion_D / h) : 0.0;

    std::vector<std::vector<cplx>> finals(n_samples);
    parallel_for(n_samples, [&](std::size_t traj) {
        auto rng = detail::trajectory_stream(seed, traj);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<cplx> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
        for (std::size_t s = 0; s < steps; ++s) {
            const double force = force_sd * noise(rng);
            for (std::size_t i = 0; i < n; ++i) psi[i] *= std::polar(1.0, -force * grid.x(i) * h / params.hbar);
            fft::transform(psi, fft::Direction::forward);
            for (std::size_t a = 0; a < n; ++a) psi[a] *= phase[a] / static_cast<double>(n);
            fft::transform(psi, fft::Direction::backward);
        }
        finals[traj] = std::move(psi);
    });
    return finals;
}

/// Trajectory average Σ_k |ψ_k⟩⟨ψ_k| / N, accumulated in trajectory order.
inline DensityMatrix average_trajectories(const PositionGrid& grid, const std::vector<std::vector<cplx>>& finals) {
    const std::size_t n = grid.size();
    const double weight = 1.0 / static_cast<double>(finals.size());
    std::vector<cplx> rho(n * n);
    parallel_for(n, [&](std::size_t i) {
        for (const auto& psi : finals) {
            const cplx a = weight * psi[i];
            for (std::size_t j = 0; j < n; ++j) rho[i * n + j] += a * std::conj(psi[j]);
        }
    });
    return DensityMatrix(grid, std::move(rho));
}

inline DensityMatrix evolve_montecarlo(const WaveFunction& psi0, double t, double dt, std::size_t n_samples,
                                       std::uint64_t seed, const PhysicalParams& params) {
    return average_trajectories(psi0.grid(), montecarlo_trajectories(psi0, t, dt, n_samples, seed, params));
}

// ---------------------------------------------------------------------------
// Finite-time positivity scan
// ---------------------------------------------------------------------------

struct ScanPoint {
    double t = 0.0;
    double min_W = 0.0;
    double relative_floor = 0.0;
    double det_CW = 0.0;
};

struct ScanResult {
    double first_nonneg_time = 0.0;
    std::vector<ScanPoint> trace;
    /// Set when a non-negative grid time precedes the last negative one.
    bool multiple_crossings = false;
};

/// Evaluates the exact engine at n_steps times spanning [0, t_max], each one
/// propagated from w0, and locates the onset of permanent non-negativity.
/// The crossing after the last negative grid time is refined by bisection
/// to 1e-3·t₀.
inline ScanResult decoherence_scan(const WignerField& w0, const PhysicalParams& params, double t_max,
                                   std::size_t n_steps) {
    const auto sc = scales(params);
    if (!(t_max >= sc.tD)) throw ParameterError("t_max must be at least tD = " + std::to_string(sc.tD));
    if (n_steps < 2) throw ParameterError("scan needs at least two time points");

    auto evaluate = [&](double t) {
        const auto report = min_value(evolve_exact(w0, t, params));
        return ScanPoint{t, report.min_value, report.relative_floor, propagator_covariance(t, params).matrix.det()};
    };
    auto negative = [](const ScanPoint& pt) { return pt.relative_floor < -kNegativityTolerance; };

    ScanResult result;
    result.trace.reserve(n_steps);
    for (std::size_t j = 0; j < n_steps; ++j)
        result.trace.push_back(evaluate(t_max * static_cast<double>(j) / static_cast<double>(n_steps - 1)));

    std::ptrdiff_t last_negative = -1;
    for (std::size_t j = 0; j < n_steps; ++j)
        if (negative(result.trace[j])) last_negative = static_cast<std::ptrdiff_t>(j);
    if (last_negative < 0) return result;
    if (static_cast<std::size_t>(last_negative) == n_steps - 1)
        throw NeverPositiveError("relative floor " + std::to_string(result.trace.back().relative_floor) +
                                 " still negative at t_max = " + std::to_string(t_max));
    for (std::ptrdiff_t j = 0; j < last_negative; ++j)
        if (!negative(result.trace[static_cast<std::size_t>(j)])) result.multiple_crossings = true;

    double lo = result.trace[static_cast<std::size_t>(last_negative)].t;
    double hi = result.trace[static_cast<std::size_t>(last_negative) + 1].t;
    while (hi - lo > 1e-3 * sc.t0) {
        const double mid = 0.5 * (lo + hi);
        (negative(evaluate(mid)) ? lo : hi) = mid;
    }
    result.first_nonneg_time = hi;
    return result;
}

} // namespace wigner_deco
