#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"

namespace wigner_deco {

using cplx = std::complex<double>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kLeakageTolerance = 1e-6;
inline constexpr double kPsdFloor = 1e-8;

namespace detail {

// "Outer 5%" of the samples: 2.5% at each edge.
inline std::size_t edge_band(std::size_t n) { return (n + 39) / 40; }

inline void check_edge_leakage(std::span<const cplx> amplitudes) {
    const std::size_t n = amplitudes.size();
    const std::size_t band = edge_band(n);
    double peak = 0.0;
    for (const auto& a : amplitudes) peak = std::max(peak, std::abs(a));
    double edge = 0.0;
    for (std::size_t i = 0; i < band; ++i) {
        edge = std::max(edge, std::abs(amplitudes[i]));
        edge = std::max(edge, std::abs(amplitudes[n - 1 - i]));
    }
    if (edge > kLeakageTolerance * peak)
        throw LeakageError("edge amplitude " + std::to_string(edge / peak) + " of peak exceeds 1e-6");
}

} // namespace detail

/// A pure state ψ(x_i) sampled on a PositionGrid; normalized and confined.
class WaveFunction {
public:
    WaveFunction(PositionGrid grid, std::vector<cplx> amplitudes)
        : grid_(grid), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != grid_.size()) throw GridMismatchError("amplitude count differs from grid size");
        detail::check_edge_leakage(amplitudes_);
        const double n = norm();
        if (!(std::abs(n - 1.0) <= kNormTolerance))
            throw NormalizationError("wave function norm " + std::to_string(n) + " differs from 1");
    }

    const PositionGrid& grid() const { return grid_; }
    std::span<const cplx> amplitudes() const { return amplitudes_; }
    cplx operator[](std::size_t i) const { return amplitudes_[i]; }

    double norm() const {
        std::vector<double> density(amplitudes_.size());
        for (std::size_t i = 0; i < density.size(); ++i) density[i] = std::norm(amplitudes_[i]);
        return compensated_sum(density) * grid_.dx();
    }

private:
    PositionGrid grid_;
    std::vector<cplx> amplitudes_;
};

/// ρ(x_i, x_j) stored row-major. Construction makes the matrix exactly
/// Hermitian and checks unit trace; positive semidefiniteness is checked on
/// request because it needs a full eigendecomposition.
class DensityMatrix {
public:
    DensityMatrix(PositionGrid grid, std::vector<cplx> entries) : grid_(grid), entries_(std::move(entries)) {
        const std::size_t n = grid_.size();
        if (entries_.size() != n * n) throw GridMismatchError("density matrix size differs from grid size");
        for (std::size_t i = 0; i < n; ++i) {
            entries_[i * n + i] = cplx(entries_[i * n + i].real(), 0.0);
            for (std::size_t j = i + 1; j < n; ++j) {
                const cplx upper = 0.5 * (entries_[i * n + j] + std::conj(entries_[j * n + i]));
                entries_[i * n + j] = upper;
                entries_[j * n + i] = std::conj(upper);
            }
        }
        const double tr = trace();
        if (!(std::abs(tr - 1.0) <= kNormTolerance))
            throw NormalizationError("density matrix trace " + std::to_string(tr) + " differs from 1");
    }

    const PositionGrid& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }
    std::span<const cplx> entries() const { return entries_; }
    cplx operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }

    double trace() const {
        std::vector<double> diag(size());
        for (std::size_t i = 0; i < size(); ++i) diag[i] = entries_[i * size() + i].real();
        return compensated_sum(diag) * grid_.dx();
    }

    /// tr(ρ²) = Σ_ij |ρ_ij|² dx².
    double purity() const {
        std::vector<double> sq(entries_.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(entries_[i]);
        return compensated_sum(sq) * grid_.dx() * grid_.dx();
    }

    /// Eigenvalues of the operator ρ (matrix entries scaled by dx), ascending.
    std::vector<double> eigenvalues() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXcd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = entries_[i * n + j] * grid_.dx();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        return {ev.data(), ev.data() + ev.size()};
    }

    /// Throws PSDError if some eigenvalue falls below −1e-8 × the largest one.
    void check_positive_semidefinite() const {
        const auto ev = eigenvalues();
        if (ev.front() < -kPsdFloor * ev.back())
            throw PSDError("eigenvalue " + std::to_string(ev.front()) + " below the PSD floor");
    }

private:
    PositionGrid grid_;
    std::vector<cplx> entries_;
};

namespace detail {

// Smallest admissible width is four grid steps; largest is a sixteenth of the span.
inline void check_width(const PositionGrid& grid, double sigma) {
    if (!std::isfinite(sigma) || sigma < 4.0 * grid.dx() || sigma > grid.span() / 16.0)
        throw GridResolutionError("sigma " + std::to_string(sigma) + " outside [4 dx, span/16]");
}

// Phase-space momentum reach is πħ/(2dx); keep the packet's momentum tail inside it.
inline void check_momentum_reach(const PositionGrid& grid, double p0, double sigma, double hbar) {
    const double reach = std::numbers::pi * hbar / (2.0 * grid.dx());
    if (std::abs(p0) + 8.0 * hbar / (2.0 * sigma) > reach)
        throw GridResolutionError("momentum " + std::to_string(p0) + " not resolvable on this grid");
}

inline std::vector<cplx> packet_amplitudes(const PositionGrid& grid, double x0, double p0, double sigma,
                                           double hbar) {
    const double prefactor = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    std::vector<cplx> psi(grid.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = grid.x(i);
        const double u = x - x0;
        psi[i] = prefactor * std::exp(-u * u / (4.0 * sigma * sigma)) * std::polar(1.0, p0 * x / hbar);
    }
    return psi;
}

} // namespace detail

/// Minimum-uncertainty packet ψ ∝ exp(−(x−x0)²/4σ² + i p0 x/ħ).
inline WaveFunction gaussian_packet(const PositionGrid& grid, double x0, double p0, double sigma,
                                    const PhysicalParams& params) {
    params.validate();
    detail::check_width(grid, sigma);
    detail::check_momentum_reach(grid, p0, sigma, params.hbar);
    return WaveFunction(grid, detail::packet_amplitudes(grid, x0, p0, sigma, params.hbar));
}

/// Normalized superposition of packets at +x0 and −x0 with relative phase e^{iφ}.
/// The normalization includes the packet overlap exp(−x0²/2σ²).
inline WaveFunction cat_state(const PositionGrid& grid, double x0, double sigma, double phase,
                              const PhysicalParams& params) {
    params.validate();
    detail::check_width(grid, sigma);
    detail::check_momentum_reach(grid, 0.0, sigma, params.hbar);
    const double overlap = std::exp(-x0 * x0 / (2.0 * sigma * sigma));
    const double norm2 = 2.0 + 2.0 * std::cos(phase) * overlap;
    if (!(norm2 > 1e-12)) throw ParameterError("cat components cancel exactly");
    const double scale = 1.0 / std::sqrt(norm2);
    const auto right = detail::packet_amplitudes(grid, x0, 0.0, sigma, params.hbar);
    const auto left = detail::packet_amplitudes(grid, -x0, 0.0, sigma, params.hbar);
    const cplx rel = std::polar(1.0, phase);
    std::vector<cplx> psi(grid.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = scale * (right[i] + rel * left[i]);
    return WaveFunction(grid, std::move(psi));
}

/// n-th Hermite function whose ground state has position variance σ².
inline WaveFunction oscillator_eigenstate(const PositionGrid& grid, int n, double sigma) {
    if (n < 0 || n > 10) throw ParameterError("eigenstate index must lie in [0, 10]");
    detail::check_width(grid, sigma);
    const double length = std::sqrt(2.0) * sigma;
    const double scale = 1.0 / std::sqrt(length);
    std::vector<cplx> psi(grid.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double xi = grid.x(i) / length;
        // Normalized Hermite-function recurrence; avoids overflow of raw H_n.
        double prev = 0.0;
        double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
        for (int k = 0; k < n; ++k) {
            const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
            prev = cur;
            cur = next;
        }
        psi[i] = scale * cur;
    }
    return WaveFunction(grid, std::move(psi));
}

inline DensityMatrix density_from_pure(const WaveFunction& psi) {
    const std::size_t n = psi.grid().size();
    std::vector<cplx> rho(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rho[i * n + j] = psi[i] * std::conj(psi[j]);
    return DensityMatrix(psi.grid(), std::move(rho));
}

/// Convex combination Σ w_k ρ_k. Weights must be non-negative and sum to one.
inline DensityMatrix mix(std::span<const std::pair<double, DensityMatrix>> states) {
    if (states.empty()) throw WeightError("mixture needs at least one component");
    double total = 0.0;
    for (const auto& [w, rho] : states) {
        if (!std::isfinite(w) || w < 0.0) throw WeightError("mixture weights must be non-negative");
        if (!(rho.grid() == states.front().second.grid())) throw GridMismatchError("mixture components on different grids");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw WeightError("mixture weights sum to " + std::to_string(total));
    const std::size_t count = states.front().second.entries().size();
    std::vector<cplx> out(count);
    for (const auto& [w, rho] : states) {
        const auto e = rho.entries();
        for (std::size_t k = 0; k < count; ++k) out[k] += w * e[k];
    }
    return DensityMatrix(states.front().second.grid(), std::move(out));
}

inline DensityMatrix mix(std::initializer_list<std::pair<double, DensityMatrix>> states) {
    return mix(std::span<const std::pair<double, DensityMatrix>>(states.begin(), states.size()));
}

} // namespace wigner_deco
