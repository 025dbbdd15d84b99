#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "parallel.hpp"
#include "wigner.hpp"

namespace wigner_deco {

/// Symmetric 2×2 phase-space covariance [[c_xx, c_xp], [c_xp, c_pp]].
struct CovarianceMatrix2 {
    double c_xx = 0.0;
    double c_xp = 0.0;
    double c_pp = 0.0;

    static CovarianceMatrix2 isotropic(double c) { return {c, 0.0, c}; }

    double det() const { return c_xx * c_pp - c_xp * c_xp; }
    double trace() const { return c_xx + c_pp; }
    bool is_zero() const { return c_xx == 0.0 && c_xp == 0.0 && c_pp == 0.0; }

    /// PSD up to a relative rounding allowance on the determinant.
    void validate() const {
        if (!std::isfinite(c_xx) || !std::isfinite(c_xp) || !std::isfinite(c_pp))
            throw PSDError("covariance entries must be finite");
        if (c_xx < 0.0 || c_pp < 0.0) throw PSDError("covariance diagonal must be non-negative");
        if (det() < -1e-12 * c_xx * c_pp)
            throw PSDError("covariance determinant " + std::to_string(det()) + " is negative");
    }

    CovarianceMatrix2 operator+(const CovarianceMatrix2& o) const { return {c_xx + o.c_xx, c_xp + o.c_xp, c_pp + o.c_pp}; }
    CovarianceMatrix2 operator-(const CovarianceMatrix2& o) const { return {c_xx - o.c_xx, c_xp - o.c_xp, c_pp - o.c_pp}; }
    bool operator==(const CovarianceMatrix2&) const = default;
};

/// g(x,p;C) = (1/2π)|C|^{-1/2} exp(−½ zᵀC⁻¹z). Only its Fourier transform
/// exp(−½ kᵀCk) is ever evaluated, so det C = 0 needs no special casing.
class GaussianKernel {
public:
    explicit GaussianKernel(CovarianceMatrix2 covariance) : covariance_(covariance) { covariance_.validate(); }

    const CovarianceMatrix2& covariance() const { return covariance_; }

    double fourier(double kx, double kp) const {
        const auto& c = covariance_;
        return std::exp(-0.5 * (c.c_xx * kx * kx + 2.0 * c.c_xp * kx * kp + c.c_pp * kp * kp));
    }

    /// Density at (x, p); requires det C > 0.
    double operator()(double x, double p) const {
        const auto& c = covariance_;
        const double d = c.det();
        const double q = (c.c_pp * x * x - 2.0 * c.c_xp * x * p + c.c_xx * p * p) / d;
        return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(d));
    }

private:
    CovarianceMatrix2 covariance_;
};

namespace detail {

inline void check_kernel_width(const WignerField& w, const CovarianceMatrix2& c) {
    if (3.0 * std::sqrt(c.c_xx) > 0.5 * w.x_grid().span() || 3.0 * std::sqrt(c.c_pp) > 0.5 * w.p_span())
        throw KernelTooWideError("three-sigma kernel extent exceeds half the grid span");
}

// Multiplies the 2-D spectrum of w by `multiplier(kx, kp)` and returns the
// real part of the inverse transform.
template <class Multiplier>
std::vector<double> filter_spectrum(const WignerField& w, Multiplier&& multiplier) {
    const std::size_t n = w.size();
    std::vector<fft::cplx> data(w.values().begin(), w.values().end());
    fft::transform_2d(data, n, n, fft::Direction::forward);
    const double kx_step = 2.0 * std::numbers::pi / w.x_grid().span();
    const double kp_step = 2.0 * std::numbers::pi / w.p_span();
    const double scale = 1.0 / static_cast<double>(n * n);
    parallel_for(n, [&](std::size_t i) {
        const double kx = kx_step * static_cast<double>(fft::signed_index(i, n));
        for (std::size_t k = 0; k < n; ++k) {
            const double kp = kp_step * static_cast<double>(fft::signed_index(k, n));
            data[i * n + k] *= scale * multiplier(kx, kp);
        }
    });
    fft::transform_2d(data, n, n, fft::Direction::backward);
    std::vector<double> out(n * n);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = data[j].real();
    return out;
}

} // namespace detail

/// g(C) ⋆ W, evaluated as a product with the analytic kernel transform.
inline WignerField coarse_grain(const WignerField& w, const CovarianceMatrix2& c) {
    const GaussianKernel kernel(c);
    if (c.is_zero()) return w;
    detail::check_kernel_width(w, c);
    WignerField out(w.x_grid(), w.params(),
                    detail::filter_spectrum(w, [&](double kx, double kp) { return kernel.fourier(kx, kp); }));
    return out;
}

/// Minimum-uncertainty covariance diag(ħs/2, ħ/2s); s = 1 gives the
/// standard Husimi map diag(ħ/2, ħ/2) in the library's default units.
inline CovarianceMatrix2 husimi_covariance(double hbar, double squeeze = 1.0) {
    return {0.5 * hbar * squeeze, 0.0, 0.5 * hbar / squeeze};
}

inline WignerField husimi(const WignerField& w, double squeeze = 1.0) {
    return coarse_grain(w, husimi_covariance(w.params().hbar, squeeze));
}

/// Coarse-grains with C and reports the minimum. Non-negativity is
/// guaranteed whenever det C ≥ ħ²/4.
inline PositivityReport check_lemma(const WignerField& w, const CovarianceMatrix2& c) {
    return min_value(coarse_grain(w, c));
}

/// True when det C reaches the ħ²/4 positivity bound.
inline bool satisfies_lemma_bound(const CovarianceMatrix2& c, double hbar) { return c.det() >= 0.25 * hbar * hbar; }

/// Smallest isotropic c with coarse_grain(w, c·I) non-negative, by bisection
/// on [0, 1] to 1e-4. Returns 0 for a field that is already non-negative.
inline double positivity_threshold(const WignerField& w, double tolerance = 1e-4) {
    auto positive_at = [&](double c) {
        return check_lemma(w, CovarianceMatrix2::isotropic(c)).non_negative();
    };
    if (positive_at(0.0)) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    if (!positive_at(hi)) throw BracketError("field still negative after isotropic smoothing c = 1");
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (positive_at(mid) ? hi : lo) = mid;
    }
    if (!positive_at(hi) || positive_at(lo)) throw BracketError("bisection bracket failed re-verification");
    return hi;
}

} // namespace wigner_deco
