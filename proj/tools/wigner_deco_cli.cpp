// Command-line front end: builds states from a JSON config, runs the
// transforms and evolution engines, writes CSV tables and PGM heatmaps.
//
//   wigner_deco [--config FILE] [--input FIELD.csv] [--out PREFIX] [--threads N] <command> [options]
//
// --input replaces the configured state by a previously written field for
// the phase-space commands (wigner, husimi, smooth, scan, evolve --engine exact|fd).
//
// Exit codes: 0 success, 1 invalid input, 2 numerical contract violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wigner_deco/wigner_deco.hpp"

using namespace wigner_deco;

namespace {

void report_field(const WignerField& w, const std::string& prefix) {
    io::write_file(prefix + ".csv", [&](std::ostream& out) { io::write_wigner_csv(w, out); });
    io::export_heatmap(w, prefix + ".pgm");
    const auto r = min_value(w);
    std::printf("normalization=%.12f min_W=%.6e relative_floor=%.6e purity=%.8f\n", w.normalization(), r.min_value,
                r.relative_floor, purity(w));
}

std::optional<WignerField> input_field;

WignerField initial_field(const ExperimentConfig& c) {
    if (input_field) return *input_field;
    return wigner_transform(build_density(c.state, c.grid(), c.params), c.params);
}

void require_state(const std::string& what) {
    if (input_field) throw ParameterError(what + " needs a state, not an input field");
}

WignerField run_evolve(const ExperimentConfig& c) {
    const auto grid = c.grid();
    const auto sc = scales(c.params);
    if (c.engine == "exact") return evolve_exact(initial_field(c), c.t, c.params);
    if (c.engine == "fd") {
        const auto w0 = initial_field(c);
        const FdOptions opts{c.fd_refine};
        return evolve_fd(w0, c.t, c.dt.value_or(fd_stable_dt(w0, c.params, opts)), c.params, opts);
    }
    require_state("engine " + c.engine);
    const double dt = c.dt.value_or(sc.t0 / 1000.0);
    if (c.engine == "trotter") {
        const auto rho = evolve_density_trotter(build_density(c.state, grid, c.params), c.t, dt, c.params);
        return wigner_transform(rho, c.params);
    }
    const auto psi = build_wavefunction(c.state, grid, c.params);
    return wigner_transform(evolve_montecarlo(psi, c.t, dt, c.n_samples, c.seed, c.params), c.params);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wigner functions under position decoherence"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_prefix;
    int threads = 0;
    app.add_option("-c,--config", config_path, "JSON experiment config");
    std::string input_path;
    app.add_option("-i,--input", input_path, "Wigner field CSV to use instead of the configured state");
    app.add_option("-o,--out", out_prefix, "Output path prefix");
    app.add_option("--threads", threads, "Worker threads (0 = WIGNER_DECO_THREADS or hardware)");

    auto* cmd_state = app.add_subcommand("state", "Write the configured state as CSV");
    auto* cmd_wigner = app.add_subcommand("wigner", "Wigner function of the configured state");
    auto* cmd_husimi = app.add_subcommand("husimi", "Husimi function of the configured state");
    auto* cmd_smooth = app.add_subcommand("smooth", "Gaussian coarse-graining with covariance C");
    std::optional<double> cxx, cxp, cpp;
    cmd_smooth->add_option("--cxx", cxx);
    cmd_smooth->add_option("--cxp", cxp);
    cmd_smooth->add_option("--cpp", cpp);
    auto* cmd_evolve = app.add_subcommand("evolve", "Evolve under the decoherence master equation");
    std::optional<double> t_opt, dt_opt;
    std::optional<std::string> engine_opt;
    std::optional<std::size_t> samples_opt, refine_opt;
    std::optional<std::uint64_t> seed_opt;
    cmd_evolve->add_option("--t", t_opt, "Target time");
    cmd_evolve->add_option("--engine", engine_opt, "exact | fd | trotter | mc")
        ->check(CLI::IsMember({"exact", "fd", "trotter", "mc"}));
    cmd_evolve->add_option("--dt", dt_opt, "Step size for stepped engines");
    cmd_evolve->add_option("--samples", samples_opt, "Monte Carlo trajectories");
    cmd_evolve->add_option("--seed", seed_opt, "Monte Carlo seed");
    cmd_evolve->add_option("--refine", refine_opt, "FD x-refinement factor");
    auto* cmd_scan = app.add_subcommand("scan", "Scan the relative floor of W(t) up to t_max");
    std::optional<double> tmax_opt;
    std::optional<std::size_t> steps_opt;
    cmd_scan->add_option("--tmax", tmax_opt);
    cmd_scan->add_option("--steps", steps_opt);
    auto* cmd_scales = app.add_subcommand("scales", "Print sigma0, t0 and tD");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        set_thread_count(threads);
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        const std::string prefix = out_prefix.value_or(c.output);
        if (!input_path.empty()) {
            std::ifstream in(input_path);
            if (!in) throw IOError("cannot open " + input_path);
            input_field = io::read_wigner_csv(in);
            c.params = input_field->params();
        }
        if (t_opt) c.t = *t_opt;
        if (dt_opt) c.dt = *dt_opt;
        if (engine_opt) c.engine = *engine_opt;
        if (samples_opt) c.n_samples = *samples_opt;
        if (seed_opt) c.seed = *seed_opt;
        if (refine_opt) c.fd_refine = *refine_opt;
        if (tmax_opt) c.t_max = *tmax_opt;
        if (steps_opt) c.n_steps = *steps_opt;
        if (cxx) c.smoothing.c_xx = *cxx;
        if (cxp) c.smoothing.c_xp = *cxp;
        if (cpp) c.smoothing.c_pp = *cpp;

        if (cmd_scales->parsed()) {
            const auto sc = scales(c.params);
            std::printf("sigma0=%.6f t0=%.6f tD=%.6f\n", sc.sigma0, sc.t0, sc.tD);
        } else if (cmd_state->parsed()) {
            require_state("state");
            if (c.state.type == "mixture") {
                const auto rho = build_density(c.state, c.grid(), c.params);
                io::write_file(prefix + ".csv", [&](std::ostream& out) { io::write_density_csv(rho, out); });
            } else {
                const auto psi = build_wavefunction(c.state, c.grid(), c.params);
                io::write_file(prefix + ".csv", [&](std::ostream& out) { io::write_wavefunction_csv(psi, out); });
            }
        } else if (cmd_wigner->parsed()) {
            report_field(initial_field(c), prefix);
        } else if (cmd_husimi->parsed()) {
            report_field(husimi(initial_field(c)), prefix);
        } else if (cmd_smooth->parsed()) {
            report_field(coarse_grain(initial_field(c), c.smoothing), prefix);
        } else if (cmd_evolve->parsed()) {
            report_field(run_evolve(c), prefix);
        } else if (cmd_scan->parsed()) {
            const auto scan = decoherence_scan(initial_field(c), c.params, c.t_max, c.n_steps);
            io::write_file(prefix + ".csv", [&](std::ostream& out) { io::write_scan_csv(scan, out); });
            std::printf("first_nonneg_time=%.6f tD=%.6f%s\n", scan.first_nonneg_time, scales(c.params).tD,
                        scan.multiple_crossings ? " multiple_crossings" : "");
        }
    } catch (const NumericalContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
