#pragma once

// Second-order Voronoi machinery.
//
// V2(i,j) is the set of points whose two nearest BSs are {i,j}; it is
// nonempty exactly when (i,j) is a Delaunay edge.  Regions are never built
// as polygons: membership is a nearest-two query and areas come from a
// seeded dummy-point estimate over the analysis window, which is also what
// the edge-cutting pass consumes.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "point.hpp"
#include "rng.hpp"
#include "topology.hpp"

namespace duet {

// normalized unordered BS pair, a < b
struct RegionKey {
    int a = -1;
    int b = -1;

    RegionKey() = default;
    RegionKey(int i, int j) : a(i < j ? i : j), b(i < j ? j : i) {
        if (i == j) throw std::invalid_argument("RegionKey: indices must differ");
    }
    bool operator==(const RegionKey& o) const { return a == o.a && b == o.b; }
    bool operator<(const RegionKey& o) const { return a != o.a ? a < o.a : b < o.b; }
    bool contains(int v) const { return v == a || v == b; }
    int other(int v) const { return v == a ? b : a; }
};

struct NearestTwo {
    int nearest = -1;
    int second = -1;
    double d_nearest = 0.0; // squared distances
    double d_second = 0.0;

    RegionKey key() const { return {nearest, second}; }
};

// distance ties resolve to the smaller BS index
inline NearestTwo nearest_two(Point q, const std::vector<Point>& bs) {
    if (bs.size() < 2) throw std::invalid_argument("nearest_two: need at least 2 BSs");
    int b0 = -1, b1 = -1;
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < static_cast<int>(bs.size()); ++i) {
        const double d = dist2(q, bs[i]);
        if (b0 < 0 || d < d0) {
            b1 = b0; d1 = d0;
            b0 = i; d0 = d;
        } else if (b1 < 0 || d < d1) {
            b1 = i; d1 = d;
        }
    }
    return {b0, b1, d0, d1};
}

inline NearestTwo nearest_two(Point q, const Topology& t) { return nearest_two(q, t.bs); }

inline bool in_second_order_region(Point q, RegionKey key, const std::vector<Point>& bs) {
    return nearest_two(q, bs).key() == key;
}

struct AreaEstimate {
    std::map<RegionKey, std::size_t> counts;
    std::size_t total = 0;
    double window_area = 0.0;

    std::size_t count(RegionKey k) const {
        const auto it = counts.find(k);
        return it == counts.end() ? 0 : it->second;
    }
    double area(RegionKey k) const {
        return total == 0 ? 0.0 : window_area * static_cast<double>(count(k)) / static_cast<double>(total);
    }
};

inline AreaEstimate estimate_region_areas(const Topology& t, std::size_t n_dummies, std::uint64_t seed) {
    if (t.bs.size() < 2) throw std::invalid_argument("estimate_region_areas: need at least 2 BSs");
    const Rect w = t.analysis_window;
    if (w.width() <= 0.0 || w.height() <= 0.0)
        throw std::invalid_argument("estimate_region_areas: empty analysis window");
    rng::Stream rs(seed, "dummies");
    AreaEstimate est;
    est.total = n_dummies;
    est.window_area = w.area();
    for (std::size_t i = 0; i < n_dummies; ++i) {
        const Point q{rs.uniform(w.x0, w.x1), rs.uniform(w.y0, w.y1)};
        ++est.counts[nearest_two(q, t.bs).key()];
    }
    return est;
}

} // namespace duet
