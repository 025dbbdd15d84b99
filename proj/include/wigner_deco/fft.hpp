#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "parallel.hpp"

namespace wigner_deco::fft {

using cplx = std::complex<double>;

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

// Plans are created once per (length, direction) and executed through the
// new-array interface, which FFTW documents as thread-safe. FFTW_UNALIGNED
// pins the codelet choice so results do not depend on buffer alignment.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, Direction dir) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, static_cast<int>(dir));
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, static_cast<int>(dir),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw_plan_dft_1d failed");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

} // namespace detail

/// Unnormalized in-place DFT: forward uses e^{-2πi jk/n}, backward e^{+2πi jk/n}.
inline void transform(std::span<cplx> data, Direction dir) {
    fftw_plan plan = detail::PlanCache::instance().get(data.size(), dir);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

/// Transforms every contiguous row of a row-major rows×cols array.
inline void transform_rows(std::vector<cplx>& data, std::size_t rows, std::size_t cols, Direction dir) {
    parallel_for(rows, [&](std::size_t r) { transform(std::span(data).subspan(r * cols, cols), dir); });
}

/// Transforms every column of a row-major rows×cols array.
inline void transform_cols(std::vector<cplx>& data, std::size_t rows, std::size_t cols, Direction dir) {
    parallel_for(cols, [&](std::size_t c) {
        std::vector<cplx> column(rows);
        for (std::size_t r = 0; r < rows; ++r) column[r] = data[r * cols + c];
        transform(column, dir);
        for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = column[r];
    });
}

inline void transform_2d(std::vector<cplx>& data, std::size_t rows, std::size_t cols, Direction dir) {
    transform_rows(data, rows, cols, dir);
    transform_cols(data, rows, cols, dir);
}

/// Signed frequency index for DFT bin j of an n-point transform, in [-n/2, n/2).
inline long signed_index(std::size_t j, std::size_t n) {
    const long jl = static_cast<long>(j);
    const long nl = static_cast<long>(n);
    return jl < nl / 2 ? jl : jl - nl;
}

} // namespace wigner_deco::fft
