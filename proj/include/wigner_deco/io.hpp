#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "evolution.hpp"
#include "states.hpp"
#include "wigner.hpp"

namespace wigner_deco {

class IOError : public std::runtime_error {
public:
    explicit IOError(const std::string& what) : std::runtime_error("IOError: " + what) {}
};

namespace io {

/// Shortest-safe decimal form: 17 significant digits round-trip any double.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IOError("cannot open " + path + " for writing");
    return out;
}

inline std::map<std::string, std::string> parse_header_fields(const std::string& line) {
    std::map<std::string, std::string> fields;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        auto eq = token.find('=');
        if (eq != std::string::npos) fields[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return fields;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw IOError("malformed number '" + s + "'");
    return v;
}

} // namespace detail

inline void write_wavefunction_csv(const WaveFunction& psi, std::ostream& out) {
    out << "x,Re,Im\n";
    for (std::size_t i = 0; i < psi.grid().size(); ++i)
        out << fmt(psi.grid().x(i)) << ',' << fmt(psi[i].real()) << ',' << fmt(psi[i].imag()) << '\n';
}

/// One line per row i: Re ρ(i,0), Im ρ(i,0), Re ρ(i,1), ...
inline void write_density_csv(const DensityMatrix& rho, std::ostream& out) {
    const std::size_t n = rho.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ',';
            out << fmt(rho(i, j).real()) << ',' << fmt(rho(i, j).imag());
        }
        out << '\n';
    }
}

/// Long format x,p,W preceded by one comment line carrying the grid and
/// physical parameters needed to rebuild the field.
inline void write_wigner_csv(const WignerField& w, std::ostream& out) {
    const auto& g = w.x_grid();
    const auto& pp = w.params();
    out << "# wigner_field n=" << g.size() << " x_min=" << fmt(g.x_min()) << " dx=" << fmt(g.dx())
        << " hbar=" << fmt(pp.hbar) << " mass=" << fmt(pp.mass) << " D=" << fmt(pp.diffusion_D) << '\n';
    out << "x,p,W\n";
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t k = 0; k < w.size(); ++k)
            out << fmt(w.x(i)) << ',' << fmt(w.p(k)) << ',' << fmt(w(i, k)) << '\n';
}

inline WignerField read_wigner_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# wigner_field", 0) != 0) throw IOError("missing wigner_field header");
    auto f = detail::parse_header_fields(line);
    for (const char* key : {"n", "x_min", "dx", "hbar", "mass", "D"})
        if (!f.count(key)) throw IOError(std::string("header lacks ") + key);
    const auto n = static_cast<std::size_t>(std::stoull(f["n"]));
    PositionGrid grid(detail::parse_double(f["x_min"]), n, detail::parse_double(f["dx"]));
    PhysicalParams params(detail::parse_double(f["hbar"]), detail::parse_double(f["mass"]), detail::parse_double(f["D"]));
    if (!std::getline(in, line) || line != "x,p,W") throw IOError("missing x,p,W column header");
    std::vector<double> values;
    values.reserve(n * n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto last = line.rfind(',');
        if (last == std::string::npos) throw IOError("malformed row '" + line + "'");
        values.push_back(detail::parse_double(line.substr(last + 1)));
    }
    if (values.size() != n * n) throw IOError("expected " + std::to_string(n * n) + " rows");
    return WignerField(grid, params, std::move(values));
}

inline void write_scan_csv(const ScanResult& scan, std::ostream& out) {
    out << "t,min_W,relative_floor,det_CW\n";
    for (const auto& pt : scan.trace)
        out << fmt(pt.t) << ',' << fmt(pt.min_W) << ',' << fmt(pt.relative_floor) << ',' << fmt(pt.det_CW) << '\n';
}

/// Gray level of W on the diverging scale centered at zero: round-half-up of
/// 255·(W + W_hi)/(2·W_hi). An all-zero field maps to 127.
inline unsigned char heatmap_level(double value, double w_hi) {
    if (w_hi == 0.0) return 127;
    const double level = std::floor(255.0 * (value + w_hi) / (2.0 * w_hi) + 0.5);
    return static_cast<unsigned char>(std::clamp(level, 0.0, 255.0));
}

/// 8-bit binary PGM; image row r shows momentum index n−1−r, column i shows x index i.
inline void export_heatmap(const WignerField& w, std::ostream& out) {
    const std::size_t n = w.size();
    const double w_hi = w.max_abs();
    out << "P5\n";
    out << "# x_min=" << fmt(w.x(0)) << " x_max=" << fmt(w.x(n - 1)) << " p_min=" << fmt(w.p(0))
        << " p_max=" << fmt(w.p(n - 1)) << " W_hi=" << fmt(w_hi) << '\n';
    out << n << ' ' << n << "\n255\n";
    std::vector<char> row(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t k = n - 1 - r;
        for (std::size_t i = 0; i < n; ++i) row[i] = static_cast<char>(heatmap_level(w(i, k), w_hi));
        out.write(row.data(), static_cast<std::streamsize>(n));
    }
}

inline void export_heatmap(const WignerField& w, const std::string& path) {
    auto out = detail::open_out(path, true);
    export_heatmap(w, out);
    if (!out) throw IOError("write failed for " + path);
}

/// Pixel payload of a P5 file (header skipped).
inline std::vector<unsigned char> read_pgm_pixels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path);
    std::string magic, line;
    std::getline(in, magic);
    if (magic != "P5") throw IOError(path + " is not a binary PGM");
    std::size_t width = 0, height = 0, maxval = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream dims(line);
        dims >> width >> height;
        break;
    }
    in >> maxval;
    in.get();
    std::vector<unsigned char> pixels(width * height);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(pixels.size())) throw IOError(path + " is truncated");
    return pixels;
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    auto out = detail::open_out(path);
    writer(out);
    if (!out) throw IOError("write failed for " + path);
}

} // namespace io
} // namespace wigner_deco
