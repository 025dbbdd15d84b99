#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace wigner_deco {

/// ħ, mass and decoherence strength D (momentum²/time). Every derived scale
/// of the model is fixed by these three numbers.
struct PhysicalParams {
    double hbar = 1.0;
    double mass = 1.0;
    double diffusion_D = 1.0;

    PhysicalParams() = default;
    PhysicalParams(double hbar_, double mass_, double diffusion_D_)
        : hbar(hbar_), mass(mass_), diffusion_D(diffusion_D_) {
        validate();
    }

    void validate() const {
        auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!ok(hbar)) throw ParameterError("hbar must be positive and finite");
        if (!ok(mass)) throw ParameterError("mass must be positive and finite");
        if (!ok(diffusion_D)) throw ParameterError("diffusion_D must be positive and finite");
    }

    bool operator==(const PhysicalParams&) const = default;
};

/// Uniform periodic sampling x_i = x_min + i·dx, i = 0..n-1.
class PositionGrid {
public:
    PositionGrid(double x_min, std::size_t n_points, double dx) : x_min_(x_min), n_(n_points), dx_(dx) {
        if (!std::isfinite(x_min) || !std::isfinite(dx) || dx <= 0.0)
            throw GridResolutionError("grid spacing must be positive and finite");
        if (n_points < 64 || (n_points & (n_points - 1)) != 0)
            throw GridResolutionError("n_points must be a power of two >= 64, got " + std::to_string(n_points));
    }

    /// Grid covering the half-open window [x_min, x_max).
    static PositionGrid spanning(double x_min, double x_max, std::size_t n_points) {
        if (!(x_max > x_min)) throw GridResolutionError("x_max must exceed x_min");
        return PositionGrid(x_min, n_points, (x_max - x_min) / static_cast<double>(n_points));
    }

    /// 256 points over [-16, 16).
    static PositionGrid standard() { return spanning(-16.0, 16.0, 256); }

    double x_min() const { return x_min_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    double span() const { return dx_ * static_cast<double>(n_); }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
    double center() const { return x_min_ + 0.5 * span(); }

    /// Momentum conjugate to this grid, p_k = ħ·2π·(k − n/2)/(n·dx), centered on zero.
    double momentum(std::size_t k, double hbar) const {
        return hbar * 2.0 * std::numbers::pi * (static_cast<double>(k) - static_cast<double>(n_ / 2)) / span();
    }

    bool operator==(const PositionGrid&) const = default;

private:
    double x_min_;
    std::size_t n_;
    double dx_;
};

} // namespace wigner_deco
