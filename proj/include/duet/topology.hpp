#pragma once

// Base-station layouts and user drops.
//
// Three generators: a perturbed square grid (the paper-style 7x7 deployment
// where each BS sits uniformly inside a centered p x p sub-square of its
// cell), a homogeneous PPP, and explicit coordinates from file.  The
// analysis window is the inner region used for statistics; for the grid it
// shrinks the deployment by one cell size per side (1400 m -> 1000 m in the
// reference setup), which implements the guard ring.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "point.hpp"
#include "rng.hpp"

namespace duet {

struct Topology {
    std::vector<Point> bs;   // pairwise distinct positions, index = BS id
    Rect window;             // deployment region
    Rect analysis_window;    // statistics region, subset of window
    std::string generator;   // "perturbed_grid" | "ppp" | "explicit"
};

struct UserSet {
    std::vector<Point> pos;
};

struct GridSpec {
    int rows = 7;
    int cols = 7;
    double cell_size = 200.0;
    double p = 100.0;        // side of the centered perturbation square, 0 <= p <= cell_size
};

inline Topology generate_perturbed_grid(const GridSpec& spec, std::uint64_t seed) {
    if (spec.rows < 1 || spec.cols < 1 || spec.cell_size <= 0.0)
        throw std::invalid_argument("grid: rows/cols/cell_size must be positive");
    if (spec.p < 0.0 || spec.p > spec.cell_size)
        throw std::invalid_argument("grid: perturbation p must lie in [0, cell_size]");

    rng::Stream rs(seed, "grid_bs");
    Topology t;
    t.generator = "perturbed_grid";
    t.window = {0.0, 0.0, spec.cols * spec.cell_size, spec.rows * spec.cell_size};
    t.analysis_window = t.window.shrunk(spec.cell_size);
    t.bs.reserve(static_cast<std::size_t>(spec.rows) * spec.cols);
    const double half = spec.p / 2.0;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            const double cx = (c + 0.5) * spec.cell_size;
            const double cy = (r + 0.5) * spec.cell_size;
            // p = 0 degenerates to the exact lattice on purpose
            const double dx = spec.p > 0.0 ? rs.uniform(-half, half) : 0.0;
            const double dy = spec.p > 0.0 ? rs.uniform(-half, half) : 0.0;
            t.bs.push_back({cx + dx, cy + dy});
        }
    }
    return t;
}

inline Topology generate_ppp(double density, Rect window, std::uint64_t seed) {
    if (density < 0.0) throw std::invalid_argument("ppp: density must be nonnegative");
    if (window.width() <= 0.0 || window.height() <= 0.0)
        throw std::invalid_argument("ppp: window must have positive area");

    rng::Stream rs(seed, "ppp_bs");
    Topology t;
    t.generator = "ppp";
    t.window = window;
    t.analysis_window = window;
    const std::uint64_t n = rs.poisson(density * window.area());
    t.bs.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = rs.uniform(window.x0, window.x1);
        const double y = rs.uniform(window.y0, window.y1);
        t.bs.push_back({x, y});
    }
    return t;
}

// One "x y" pair per line; '#' starts a comment; blank lines skipped.
inline Topology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file: " + path);
    Topology t;
    t.generator = "explicit";
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x)) continue; // blank or comment-only
        if (!(ls >> y))
            throw std::runtime_error("topology file " + path + ": line " +
                                     std::to_string(lineno) + " has no y coordinate");
        double extra;
        if (ls >> extra)
            throw std::runtime_error("topology file " + path + ": line " +
                                     std::to_string(lineno) + " has trailing fields");
        t.bs.push_back({x, y});
    }
    for (std::size_t i = 0; i < t.bs.size(); ++i)
        for (std::size_t j = i + 1; j < t.bs.size(); ++j)
            if (t.bs[i].x == t.bs[j].x && t.bs[i].y == t.bs[j].y)
                throw std::runtime_error("topology file " + path + ": duplicate BS position at rows " +
                                         std::to_string(i) + " and " + std::to_string(j));
    if (!t.bs.empty()) {
        Rect r{t.bs[0].x, t.bs[0].y, t.bs[0].x, t.bs[0].y};
        for (const auto& p : t.bs) {
            r.x0 = std::min(r.x0, p.x);
            r.y0 = std::min(r.y0, p.y);
            r.x1 = std::max(r.x1, p.x);
            r.y1 = std::max(r.y1, p.y);
        }
        t.window = r;
        t.analysis_window = r;
    }
    return t;
}

inline void save_topology(const Topology& t, std::ostream& out) {
    out << std::setprecision(17);
    for (const auto& p : t.bs) out << p.x << ' ' << p.y << '\n';
}

inline UserSet drop_users(const Topology& t, std::size_t count, std::uint64_t seed) {
    if (t.window.width() <= 0.0 || t.window.height() <= 0.0)
        throw std::invalid_argument("drop_users: topology window has no area");
    rng::Stream rs(seed, "users");
    UserSet u;
    u.pos.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rs.uniform(t.window.x0, t.window.x1);
        const double y = rs.uniform(t.window.y0, t.window.y1);
        u.pos.push_back({x, y});
    }
    return u;
}

} // namespace duet
