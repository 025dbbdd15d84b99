#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "states.hpp"

namespace wigner_deco {

/// "Non-negative" everywhere in this library means relative_floor ≥ −1e-9.
inline constexpr double kNegativityTolerance = 1e-9;
inline constexpr double kFieldNormTolerance = 1e-6;

/// Real samples W(x_i, p_k) on an n×n phase-space grid, stored x-major
/// (index i·n + k). The x samples are those of the position grid; the
/// momentum samples are p_k = (k − n/2)·πħ/(n·dx), the reach of the
/// correlation slice sampled with step 2·dx.
class WignerField {
public:
    WignerField(PositionGrid grid, PhysicalParams params, std::vector<double> values)
        : grid_(grid), params_(params), values_(std::move(values)) {
        if (values_.size() != grid_.size() * grid_.size())
            throw GridMismatchError("field size differs from grid size squared");
        for (double v : values_)
            if (!std::isfinite(v)) throw RealityError("field contains non-finite values");
    }

    const PositionGrid& x_grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    std::size_t size() const { return grid_.size(); }
    std::span<const double> values() const { return values_; }
    double operator()(std::size_t i, std::size_t k) const { return values_[i * size() + k]; }

    double x(std::size_t i) const { return grid_.x(i); }
    double dx() const { return grid_.dx(); }
    double dp() const { return std::numbers::pi * params_.hbar / grid_.span(); }
    double p(std::size_t k) const { return (static_cast<double>(k) - static_cast<double>(size() / 2)) * dp(); }
    double p_min() const { return p(0); }
    double p_span() const { return dp() * static_cast<double>(size()); }
    std::vector<double> p_values() const {
        std::vector<double> out(size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = p(k);
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    /// ∫∫W dx dp.
    double normalization() const { return compensated_sum(values_) * dx() * dp(); }

    bool operator==(const WignerField&) const = default;

private:
    PositionGrid grid_;
    PhysicalParams params_;
    std::vector<double> values_;
};

inline void check_normalization(const WignerField& w, const char* where) {
    const double norm = w.normalization();
    if (!(std::abs(norm - 1.0) <= kFieldNormTolerance))
        throw NormalizationError(std::string(where) + ": integral of W is " + std::to_string(norm));
}

/// W(x,p) = (1/2πħ)∫ρ(x − r/2, x + r/2) e^{ipr/ħ} dr, one FFT per x sample.
inline WignerField wigner_transform(const DensityMatrix& rho, const PhysicalParams& params) {
    params.validate();
    const std::size_t n = rho.size();
    const long nl = static_cast<long>(n);
    const double prefactor = rho.grid().dx() / (std::numbers::pi * params.hbar);
    std::vector<double> values(n * n);
    std::vector<double> residue(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<fft::cplx> slice(n);
        const long il = static_cast<long>(i);
        for (long s = -nl / 2; s < nl / 2; ++s) {
            const long a = il - s;
            const long b = il + s;
            if (a < 0 || b < 0 || a >= nl || b >= nl) continue;
            const double sign = (s & 1) ? -1.0 : 1.0;
            slice[static_cast<std::size_t>((s + nl) % nl)] = sign * rho(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
        fft::transform(slice, fft::Direction::backward);
        for (std::size_t k = 0; k < n; ++k) {
            values[i * n + k] = prefactor * slice[k].real();
            residue[i] = std::max(residue[i], prefactor * std::abs(slice[k].imag()));
        }
    });
    WignerField w(rho.grid(), params, std::move(values));
    const double worst = *std::max_element(residue.begin(), residue.end());
    if (worst > 1e-8 * w.max_abs())
        throw RealityError("imaginary residue " + std::to_string(worst) + " exceeds 1e-8 of max|W|");
    check_normalization(w, "wigner_transform");
    return w;
}

inline WignerField wigner_transform(const WaveFunction& psi, const PhysicalParams& params) {
    return wigner_transform(density_from_pure(psi), params);
}

struct Marginals {
    std::vector<double> position_density;
    std::vector<double> momentum_density;
};

/// ∫W dp on the x grid and ∫W dx on the p grid.
inline Marginals marginals(const WignerField& w) {
    const std::size_t n = w.size();
    Marginals m{std::vector<double>(n), std::vector<double>(n)};
    const auto values = w.values();
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i)
        m.position_density[i] = compensated_sum(values.subspan(i * n, n)) * w.dp();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = values[i * n + k];
        m.momentum_density[k] = compensated_sum(column) * w.dx();
    }
    return m;
}

/// 2πħ ∫∫W² dx dp, which equals tr ρ².
inline double purity(const WignerField& w) {
    std::vector<double> sq(w.values().size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = w.values()[i] * w.values()[i];
    return 2.0 * std::numbers::pi * w.params().hbar * compensated_sum(sq) * w.dx() * w.dp();
}

struct PositivityReport {
    double min_value = 0.0;
    double x = 0.0;
    double p = 0.0;
    std::size_t x_index = 0;
    std::size_t p_index = 0;
    double relative_floor = 0.0;  ///< min_value / max|W|

    bool non_negative(double tolerance = kNegativityTolerance) const { return relative_floor >= -tolerance; }
};

/// Exhaustive argmin; ties resolve to the lowest x index, then p index.
inline PositivityReport min_value(const WignerField& w) {
    const std::size_t n = w.size();
    PositivityReport r;
    r.min_value = w(0, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (w(i, k) < r.min_value) {
                r.min_value = w(i, k);
                r.x_index = i;
                r.p_index = k;
            }
    r.x = w.x(r.x_index);
    r.p = w.p(r.p_index);
    const double peak = w.max_abs();
    r.relative_floor = peak > 0.0 ? r.min_value / peak : 0.0;
    return r;
}

namespace detail {

// Trigonometric interpolation weight of a sample offset by `delta` on a
// periodic grid of n points and period `period` (even-n periodic sinc).
inline double periodic_sinc(double delta, std::size_t n, double period) {
    const double u = delta / period;
    const double s = std::sin(std::numbers::pi * u);
    if (std::abs(s) < 1e-14) return 1.0;
    return std::sin(static_cast<double>(n) * std::numbers::pi * u) /
           (static_cast<double>(n) * std::tan(std::numbers::pi * u));
}

// Row t of the result holds the weights reconstructing f(targets[t]) from the
// n samples origin + j·step. Targets outside the periodic cell read as zero.
inline Eigen::MatrixXd interpolation_matrix(std::span<const double> targets, double origin, double step,
                                            std::size_t n) {
    const double period = step * static_cast<double>(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets.size()), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double y = targets[t];
        if (y < origin || y >= origin + period) continue;
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) =
                periodic_sinc(y - (origin + static_cast<double>(j) * step), n, period);
    }
    return m;
}

inline Eigen::MatrixXd as_matrix(const WignerField& w) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = w(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
    return m;
}

inline std::vector<double> from_matrix(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.size()));
    const auto n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) out[static_cast<std::size_t>(i * m.cols() + k)] = m(i, k);
    return out;
}

} // namespace detail

/// Linear canonical map (x, p) → (λx, p/λ): returns W'(x, p) = W(x/λ, λp),
/// evaluated by trigonometric interpolation along each axis.
inline WignerField apply_squeeze(const WignerField& w, double lambda) {
    if (!std::isfinite(lambda) || lambda <= 0.0) throw ParameterError("squeeze factor must be positive");
    if (lambda == 1.0) return w;
    const std::size_t n = w.size();
    const double x_lo = w.x_grid().x_min();
    const double x_hi = x_lo + w.x_grid().span();
    const double p_lo = w.p_min();
    const double p_hi = p_lo + w.p_span();
    const double floor = 1e-8 * w.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(w(i, k)) <= floor) continue;
            const double xs = lambda * w.x(i);
            const double ps = w.p(k) / lambda;
            if (xs < x_lo || xs >= x_hi || ps < p_lo || ps >= p_hi)
                throw SupportError("squeezed field leaves the phase-space window");
        }

    std::vector<double> x_targets(n), p_targets(n);
    for (std::size_t i = 0; i < n; ++i) x_targets[i] = w.x(i) / lambda;
    for (std::size_t k = 0; k < n; ++k) p_targets[k] = lambda * w.p(k);
    const auto tx = detail::interpolation_matrix(x_targets, x_lo, w.dx(), n);
    const auto tp = detail::interpolation_matrix(p_targets, p_lo, w.dp(), n);
    const Eigen::MatrixXd squeezed = tx * detail::as_matrix(w) * tp.transpose();
    WignerField out(w.x_grid(), w.params(), detail::from_matrix(squeezed));
    check_normalization(out, "apply_squeeze");
    return out;
}

} // namespace wigner_deco
