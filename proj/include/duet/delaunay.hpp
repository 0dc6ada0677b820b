#pragma once

// Delaunay triangulation via Bowyer-Watson with ghost triangles.
//
// The triangulation plus one ghost vertex forms a combinatorial sphere:
// every directed edge belongs to exactly one triangle, finite triangles are
// strictly ccw, and each hull edge (u,v) is paired with a ghost (v,u,GHOST).
// The in-disk test of a ghost is the open half plane strictly beyond the
// hull edge plus the open edge segment itself.  Cavities are found by brute
// force, which is entirely adequate at the network sizes in scope and keeps
// the code free of point-location state.  Under symbolic perturbation the
// result is unique, so insertion order cannot leak into the output.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "point.hpp"
#include "predicates.hpp"
#include "topology.hpp"

namespace duet {

struct DelaunayGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;        // i < j, lexicographically sorted
    std::vector<std::vector<int>> adjacency;       // sorted neighbor ids
    std::vector<std::array<int, 3>> triangles;     // finite triangles, ccw

    bool has_edge(int i, int j) const {
        if (i > j) std::swap(i, j);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
    }
    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
    int max_degree() const {
        int d = 0;
        for (const auto& a : adjacency) d = std::max(d, static_cast<int>(a.size()));
        return d;
    }
};

namespace detail {

constexpr int kGhost = -1;

struct Tri {
    std::array<int, 3> v;
    bool alive = true;
    bool ghost() const { return v[2] == kGhost; }
};

// rotate so a ghost vertex ends up last; first two then form the reversed hull edge
inline std::array<int, 3> normalize_tri(std::array<int, 3> t) {
    while (t[2] != kGhost && (t[0] == kGhost || t[1] == kGhost))
        t = {t[1], t[2], t[0]};
    return t;
}

} // namespace detail

inline DelaunayGraph delaunay(const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw std::invalid_argument("delaunay: need at least 3 points");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (pts[i].x == pts[j].x && pts[i].y == pts[j].y)
                throw std::invalid_argument("delaunay: duplicate points " + std::to_string(i) +
                                            " and " + std::to_string(j));

    // initial non-degenerate triangle: points 0, 1 and the first non-collinear companion
    int i2 = -1, orient = 0;
    for (int k = 2; k < n; ++k) {
        orient = geo::orient2d_sign(pts[0], pts[1], pts[k]);
        if (orient != 0) { i2 = k; break; }
    }
    if (i2 < 0) throw std::invalid_argument("delaunay: all points are collinear");

    std::vector<detail::Tri> tris;
    auto add_tri = [&tris](int a, int b, int c) {
        tris.push_back({detail::normalize_tri({a, b, c}), true});
    };
    {
        const int a = 0, b = orient > 0 ? 1 : i2, c = orient > 0 ? i2 : 1;
        add_tri(a, b, c);
        add_tri(b, a, detail::kGhost);
        add_tri(c, b, detail::kGhost);
        add_tri(a, c, detail::kGhost);
    }

    auto in_disk = [&pts](const detail::Tri& t, int ip) {
        const Point p = pts[ip];
        if (!t.ghost())
            return geo::incircle_sos(pts[t.v[0]], t.v[0], pts[t.v[1]], t.v[1],
                                     pts[t.v[2]], t.v[2], p, ip) > 0;
        // ghost (b,a,GHOST) covers the open half plane strictly left of b->a
        // plus the open hull segment (a,b)
        const Point b = pts[t.v[0]], a = pts[t.v[1]];
        const int o = geo::orient2d_sign(b, a, p);
        if (o != 0) return o > 0;
        return geo::strictly_between(a, b, p);
    };

    std::vector<std::size_t> cavity;
    std::vector<std::pair<int, int>> boundary;
    for (int ip = 2; ip < n; ++ip) {
        if (ip == i2) continue;
        cavity.clear();
        for (std::size_t t = 0; t < tris.size(); ++t)
            if (tris[t].alive && in_disk(tris[t], ip)) cavity.push_back(t);
        if (cavity.empty())
            throw std::logic_error("delaunay: empty cavity (inconsistent predicates)");

        // boundary = directed edges of cavity triangles whose reverse lies outside the cavity
        std::map<std::pair<int, int>, int> dir;
        for (const auto t : cavity) {
            const auto& v = tris[t].v;
            for (int e = 0; e < 3; ++e) dir[{v[e], v[(e + 1) % 3]}] = 1;
        }
        boundary.clear();
        for (const auto& [edge, _] : dir)
            if (!dir.count({edge.second, edge.first})) boundary.push_back(edge);

        for (const auto t : cavity) tris[t].alive = false;
        for (const auto& [u, v] : boundary) {
            if (u != detail::kGhost && v != detail::kGhost &&
                geo::orient2d_sign(pts[u], pts[v], pts[ip]) <= 0)
                throw std::logic_error("delaunay: non-ccw fan triangle (inconsistent predicates)");
            add_tri(u, v, ip);
        }
    }

    DelaunayGraph g;
    g.n = n;
    g.adjacency.assign(n, {});
    std::map<std::pair<int, int>, bool> seen;
    for (const auto& t : tris) {
        if (!t.alive || t.ghost()) continue;
        auto tri = t.v; // canonical rotation: smallest vertex first, ccw preserved
        std::rotate(tri.begin(), std::min_element(tri.begin(), tri.end()), tri.end());
        g.triangles.push_back(tri);
        for (int e = 0; e < 3; ++e) {
            int a = t.v[e], b = t.v[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            if (!seen.emplace(std::make_pair(a, b), true).second) continue;
            g.edges.emplace_back(a, b);
            g.adjacency[a].push_back(b);
            g.adjacency[b].push_back(a);
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    std::sort(g.triangles.begin(), g.triangles.end());
    return g;
}

inline DelaunayGraph delaunay(const Topology& topo) { return delaunay(topo.bs); }

} // namespace duet
