// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Lines starting with "note:" are informational and never affect the result.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "test_support.hpp"

using namespace wd_test;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail, double seconds) {
    std::printf("[%s] %-3s %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

void note(const std::string& text) {
    std::printf("note: %s\n", text.c_str());
    std::fflush(stdout);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

template <class F>
double timed(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string serialize(const WignerField& w) {
    std::ostringstream out;
    io::write_wigner_csv(w, out);
    return out.str();
}

void theorem() {
    const double td = scales(kUnit).tD;
    double worst = 0.0;
    std::string worst_name;
    const double secs = timed([&] {
        for (const auto& s : theorem_zoo()) {
            const double floor = min_value(evolve_exact(wigner_transform(s.rho, kUnit), td, kUnit)).relative_floor;
            if (floor < worst) worst = floor, worst_name = s.name;
        }
    });
    report("1a", worst >= -1e-9, "zoo at tD: worst relative_floor " + sci(worst) + " (" + worst_name + ") >= -1e-9",
           secs);

    const auto g = standard_grid();
    double cat8 = 0.0, witness = 0.0;
    const double secs_b = timed([&] {
        cat8 = min_value(evolve_exact(wigner_transform(cat_state(g, 8, kInvSqrt2, 0.0, kUnit), kUnit), 0.9 * td, kUnit))
                   .relative_floor;
        for (const auto& s : theorem_zoo())
            witness = std::min(
                witness, min_value(evolve_exact(wigner_transform(s.rho, kUnit), 0.9 * td, kUnit)).relative_floor);
    });
    report("1b", cat8 < -1e-4, "cat(8) at 0.9 tD: relative_floor " + sci(cat8) + " < -1e-4", secs_b);
    note("most negative zoo floor at 0.9 tD is " + sci(witness));
}

void determinant() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0, at_td = 0.0;
    const double secs = timed([&] {
        for (int j = 0; j < 100; ++j) {
            const double t = 0.01 + 10.0 * u(rng);
            const PhysicalParams p(0.1 + 3.0 * u(rng), 0.1 + 3.0 * u(rng), 0.1 + 3.0 * u(rng));
            const double expected = p.diffusion_D * p.diffusion_D * std::pow(t, 4) / (12.0 * p.mass * p.mass);
            worst = std::max(worst, std::abs(propagator_covariance(t, p).matrix.det() / expected - 1.0));
            const double td_det = propagator_covariance(scales(p).tD, p).matrix.det();
            at_td = std::max(at_td, std::abs(td_det / (0.25 * p.hbar * p.hbar) - 1.0));
        }
    });
    report("2", worst <= 1e-12 && at_td <= 1e-10,
           "det C_W rel error " + sci(worst) + " <= 1e-12, det at tD vs hbar^2/4 rel error " + sci(at_td) + " <= 1e-10",
           secs);
}

void cross_engine() {
    const auto g = standard_grid();
    const double t0 = scales(kUnit).t0;
    const auto rho = density_from_pure(cat_state(g, 4, kInvSqrt2, 0.0, kUnit));
    const auto w0 = wigner_transform(rho, kUnit);
    double trotter_err = 0.0, fd_err = 0.0;
    const double secs = timed([&] {
        const auto exact = evolve_exact(w0, t0, kUnit);
        const double scale = exact.max_abs();
        trotter_err = linf(wigner_transform(evolve_density_trotter(rho, t0, t0 / 1000.0, kUnit), kUnit), exact) / scale;
        const FdOptions opts{8};
        fd_err = linf(evolve_fd(w0, t0, fd_stable_dt(w0, kUnit, opts), kUnit, opts), exact) / scale;
    });
    report("3", trotter_err <= 1e-3 && fd_err <= 1e-2,
           "cat(4) at t0: exact vs splitting " + sci(trotter_err) + " <= 1e-3, exact vs FD " + sci(fd_err) +
               " <= 1e-2 (relative to max|W|)",
           secs);
}

void sufficiency() {
    StateZoo zoo(4);
    double worst = 0.0;
    const double secs = timed([&] {
        for (int s = 0; s < 50; ++s) {
            const auto w = wigner_transform(zoo.any().rho, kUnit);
            for (int c = 0; c < 10; ++c) {
                const auto cov = c == 0 ? CovarianceMatrix2::isotropic(0.5) : zoo.covariance_with_det_at_least(0.5, 1.5);
                worst = std::min(worst, min_value(coarse_grain(w, cov)).relative_floor);
            }
        }
    });
    report("4", worst >= -1e-8, "50 states x 10 covariances with det >= 1/4: worst floor " + sci(worst) + " >= -1e-8",
           secs);
}

void necessity() {
    const auto g = standard_grid();
    const auto c = CovarianceMatrix2::isotropic(0.4);
    double floor = 0.0, wide = 0.0;
    const double secs = timed([&] {
        floor = check_lemma(wigner_transform(cat_state(g, 6, kInvSqrt2, 0.0, kUnit), kUnit), c).relative_floor;
        wide = check_lemma(wigner_transform(cat_state(g, 6, 1.2, 0.0, kUnit), kUnit), c).relative_floor;
    });
    report("5", floor < -1e-6, "cat(6) smoothed with det 0.16: relative_floor " + sci(floor) + " < -1e-6", secs);
    note("cat(6) with sigma 1.2 under the same kernel reaches " + sci(wide));
}

void marginals_and_normalization() {
    const auto g = standard_grid();
    double norm_err = 0.0, marg_err = 0.0, purity_err = 0.0;
    auto check_field = [&](const WignerField& w) { norm_err = std::max(norm_err, std::abs(w.normalization() - 1.0)); };
    auto check_density = [&](const DensityMatrix& rho, bool pure) {
        const auto w = wigner_transform(rho, kUnit);
        check_field(w);
        const auto m = marginals(w);
        for (std::size_t i = 0; i < g.size(); ++i)
            marg_err = std::max(marg_err, std::abs(m.position_density[i] - rho(i, i).real()));
        for (std::size_t k = 0; k < g.size(); k += 4)
            marg_err = std::max(marg_err, std::abs(m.momentum_density[k] - momentum_density_direct(rho, w.p(k), 1.0)));
        if (pure) purity_err = std::max(purity_err, std::abs(purity(w) - 1.0));
    };
    const double secs = timed([&] {
        StateZoo zoo(6);
        for (int s = 0; s < 12; ++s) {
            const auto st = zoo.any();
            check_density(st.rho, st.pure);
        }
        for (const auto& s : theorem_zoo()) check_density(s.rho, s.pure);
        const auto cat = cat_state(g, 4, kInvSqrt2, 0.0, kUnit);
        check_density(evolve_density_trotter(density_from_pure(cat), 0.5, 0.005, kUnit), false);
        check_density(evolve_montecarlo(cat, 0.2, 0.005, 100, 11, kUnit), false);

        // The momentum diagonal of the master equation diffuses with variance D·t.
        const auto w0 = wigner_transform(cat, kUnit);
        const auto p0 = marginals(w0).momentum_density;
        for (double t : {0.5, 1.0, scales(kUnit).tD}) {
            const auto wt = evolve_exact(w0, t, kUnit);
            check_field(wt);
            const auto pt = marginals(wt).momentum_density;
            const double var = kUnit.diffusion_D * t, dp = wt.dp();
            for (std::size_t k = 0; k < g.size(); ++k) {
                double expected = 0.0;
                for (std::size_t j = 0; j < g.size(); ++j) {
                    const double d = wt.p(k) - wt.p(j);
                    expected += p0[j] * std::exp(-d * d / (2.0 * var)) * dp / std::sqrt(2.0 * std::numbers::pi * var);
                }
                marg_err = std::max(marg_err, std::abs(pt[k] - expected));
            }
            for (const auto& c : {CovarianceMatrix2::isotropic(0.5), CovarianceMatrix2{0.3, 0.1, 1.2}})
                check_field(coarse_grain(wt, c));
        }
    });
    report("6", norm_err <= 1e-6 && marg_err <= 1e-6 && purity_err <= 1e-5,
           "normalization error " + sci(norm_err) + " <= 1e-6, marginal error " + sci(marg_err) +
               " <= 1e-6, pure-state purity error " + sci(purity_err) + " <= 1e-5",
           secs);
}

void covariance() {
    const auto g = standard_grid();
    double worst = 0.0;
    const double secs = timed([&] {
        const auto w = wigner_transform(gaussian_packet(g, 0, 0, 1, kUnit), kUnit);
        for (double lambda : {0.5, 2.0})
            worst = std::max(
                worst, linf(apply_squeeze(w, lambda), wigner_transform(gaussian_packet(g, 0, 0, lambda, kUnit), kUnit)));
    });
    report("7", worst <= 1e-5, "squeeze 0.5 and 2 on a gaussian: L-inf error " + sci(worst) + " <= 1e-5", secs);
}

void determinism() {
    const auto g = standard_grid();
    const auto cat = cat_state(g, 4, kInvSqrt2, 0.0, kUnit);
    auto pipeline = [&] {
        std::string out;
        const auto w0 = wigner_transform(cat, kUnit);
        out += serialize(w0);
        out += serialize(husimi(w0));
        out += serialize(coarse_grain(w0, {0.3, 0.1, 0.6}));
        out += serialize(apply_squeeze(w0, 0.5));
        out += serialize(evolve_exact(w0, 1.0, kUnit));
        out += serialize(evolve_fd(w0, 0.2, fd_stable_dt(w0, kUnit), kUnit));
        out += serialize(wigner_transform(evolve_density_trotter(density_from_pure(cat), 0.1, 0.005, kUnit), kUnit));
        out += serialize(wigner_transform(evolve_montecarlo(cat, 0.2, 0.005, 200, 42, kUnit), kUnit));
        std::ostringstream scan;
        io::write_scan_csv(decoherence_scan(w0, kUnit, 1.4, 15), scan);
        out += scan.str();
        return out;
    };
    std::vector<std::string> runs;
    const double secs = timed([&] {
        for (int threads : {1, 3, 1, 2}) {
            set_thread_count(threads);
            runs.push_back(pipeline());
        }
        set_thread_count(0);
    });
    bool same = true;
    for (const auto& r : runs) same = same && r == runs.front();
    report("8", same, "Monte Carlo and deterministic pipelines byte-identical over runs with 1, 3, 1, 2 threads", secs);
}

} // namespace

int main() {
    const std::vector<std::function<void()>> criteria = {
        theorem, determinant, cross_engine, sufficiency, necessity, marginals_and_normalization, covariance, determinism};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion aborted: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
