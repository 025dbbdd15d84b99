#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "grid.hpp"
#include "smoothing.hpp"
#include "states.hpp"

namespace wigner_deco {

/// Declarative description of a state; `components` is used by mixtures only.
struct StateSpec {
    std::string type = "cat";
    double x0 = 4.0;
    double p0 = 0.0;
    double sigma = 0.70710678118654752;
    double phase = 0.0;
    int n = 0;
    std::vector<std::pair<double, StateSpec>> components;
};

/// Everything a CLI run can be told through a config document. Defaults are
/// the cat(4, 1/√2) state on the standard grid with ħ = m = D = 1.
struct ExperimentConfig {
    StateSpec state;
    PhysicalParams params;
    double x_min = -16.0;
    double x_max = 16.0;
    std::size_t n_points = 256;
    double t = 1.0;
    std::optional<double> dt;
    double t_max = 2.0;
    std::size_t n_steps = 101;
    std::string engine = "exact";
    std::size_t n_samples = 1000;
    std::uint64_t seed = 1;
    std::size_t fd_refine = 1;
    CovarianceMatrix2 smoothing = {0.5, 0.0, 0.5};
    std::string output = "wigner_deco";

    PositionGrid grid() const { return PositionGrid::spanning(x_min, x_max, n_points); }
};

namespace detail {

using json = nlohmann::json;

inline void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
}

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + key + "' in " + where + " must be finite");
    return d;
}

inline std::size_t get_count(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("'" + key + "' in " + where + " must be a non-negative integer");
    return v.get<std::size_t>();
}

inline StateSpec parse_state(const json& j, const std::string& where) {
    require_object(j, where);
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError(where + " needs a string 'type'");
    StateSpec s;
    s.type = j.at("type").get<std::string>();
    auto number_or = [&](const char* key, double fallback) {
        return j.contains(key) ? get_number(j, key, where) : fallback;
    };
    auto need = [&](const char* key) {
        if (!j.contains(key)) throw ConfigError(where + " of type " + s.type + " needs '" + key + "'");
    };
    if (s.type == "gaussian") {
        reject_unknown(j, {"type", "x0", "p0", "sigma"}, where);
        need("sigma");
        s.x0 = number_or("x0", 0.0);
        s.p0 = number_or("p0", 0.0);
        s.sigma = get_number(j, "sigma", where);
    } else if (s.type == "cat") {
        reject_unknown(j, {"type", "x0", "sigma", "phase"}, where);
        need("x0");
        need("sigma");
        s.x0 = get_number(j, "x0", where);
        s.sigma = get_number(j, "sigma", where);
        s.phase = number_or("phase", 0.0);
    } else if (s.type == "eigenstate") {
        reject_unknown(j, {"type", "n", "sigma"}, where);
        need("n");
        need("sigma");
        s.n = static_cast<int>(get_count(j, "n", where));
        s.sigma = get_number(j, "sigma", where);
    } else if (s.type == "mixture") {
        reject_unknown(j, {"type", "components"}, where);
        need("components");
        if (!j.at("components").is_array()) throw ConfigError(where + ".components must be an array");
        std::size_t idx = 0;
        for (const auto& c : j.at("components")) {
            const std::string cw = where + ".components[" + std::to_string(idx++) + "]";
            require_object(c, cw);
            reject_unknown(c, {"weight", "state"}, cw);
            if (!c.contains("weight") || !c.contains("state")) throw ConfigError(cw + " needs 'weight' and 'state'");
            s.components.emplace_back(get_number(c, "weight", cw), parse_state(c.at("state"), cw + ".state"));
        }
    } else {
        throw ConfigError("unknown state type '" + s.type + "'");
    }
    return s;
}

} // namespace detail

/// Strict parse: any key outside the schema is rejected by name.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::get_count;
    using detail::get_number;
    detail::require_object(j, "config");
    detail::reject_unknown(j, {"state", "params", "grid", "t", "dt", "t_max", "n_steps", "engine", "n_samples", "seed",
                               "fd_refine", "smoothing", "output"},
                           "config");
    ExperimentConfig c;
    if (j.contains("state")) c.state = detail::parse_state(j.at("state"), "state");
    if (j.contains("params")) {
        const auto& p = j.at("params");
        detail::require_object(p, "params");
        detail::reject_unknown(p, {"hbar", "m", "D"}, "params");
        if (p.contains("hbar")) c.params.hbar = get_number(p, "hbar", "params");
        if (p.contains("m")) c.params.mass = get_number(p, "m", "params");
        if (p.contains("D")) c.params.diffusion_D = get_number(p, "D", "params");
        c.params.validate();
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::require_object(g, "grid");
        detail::reject_unknown(g, {"x_min", "x_max", "n_points"}, "grid");
        if (g.contains("x_min")) c.x_min = get_number(g, "x_min", "grid");
        if (g.contains("x_max")) c.x_max = get_number(g, "x_max", "grid");
        if (g.contains("n_points")) c.n_points = get_count(g, "n_points", "grid");
        (void)c.grid();
    }
    if (j.contains("t")) c.t = get_number(j, "t", "config");
    if (j.contains("dt")) c.dt = get_number(j, "dt", "config");
    if (j.contains("t_max")) c.t_max = get_number(j, "t_max", "config");
    if (j.contains("n_steps")) c.n_steps = get_count(j, "n_steps", "config");
    if (j.contains("engine")) {
        if (!j.at("engine").is_string()) throw ConfigError("'engine' must be a string");
        c.engine = j.at("engine").get<std::string>();
        if (c.engine != "exact" && c.engine != "fd" && c.engine != "trotter" && c.engine != "mc")
            throw ConfigError("unknown engine '" + c.engine + "'");
    }
    if (j.contains("n_samples")) c.n_samples = get_count(j, "n_samples", "config");
    if (j.contains("seed")) c.seed = get_count(j, "seed", "config");
    if (j.contains("fd_refine")) c.fd_refine = get_count(j, "fd_refine", "config");
    if (j.contains("smoothing")) {
        const auto& s = j.at("smoothing");
        detail::require_object(s, "smoothing");
        detail::reject_unknown(s, {"cxx", "cxp", "cpp"}, "smoothing");
        c.smoothing = {s.contains("cxx") ? get_number(s, "cxx", "smoothing") : 0.0,
                       s.contains("cxp") ? get_number(s, "cxp", "smoothing") : 0.0,
                       s.contains("cpp") ? get_number(s, "cpp", "smoothing") : 0.0};
        c.smoothing.validate();
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("'output' must be a string");
        c.output = j.at("output").get<std::string>();
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline WaveFunction build_wavefunction(const StateSpec& s, const PositionGrid& grid, const PhysicalParams& params) {
    if (s.type == "gaussian") return gaussian_packet(grid, s.x0, s.p0, s.sigma, params);
    if (s.type == "cat") return cat_state(grid, s.x0, s.sigma, s.phase, params);
    if (s.type == "eigenstate") return oscillator_eigenstate(grid, s.n, s.sigma);
    throw ConfigError("state type '" + s.type + "' is not a pure state");
}

inline DensityMatrix build_density(const StateSpec& s, const PositionGrid& grid, const PhysicalParams& params) {
    if (s.type != "mixture") return density_from_pure(build_wavefunction(s, grid, params));
    std::vector<std::pair<double, DensityMatrix>> parts;
    for (const auto& [w, sub] : s.components) parts.emplace_back(w, build_density(sub, grid, params));
    return mix(parts);
}

} // namespace wigner_deco
