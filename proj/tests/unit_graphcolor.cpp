#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <duet/delaunay.hpp>
#include <duet/graphcolor.hpp>
#include <duet/regions.hpp>
#include <duet/rng.hpp>
#include <duet/topology.hpp>

using namespace duet;

namespace {

DelaunayGraph make_graph(int n, std::vector<std::pair<int, int>> edges) {
    DelaunayGraph g;
    g.n = n;
    for (auto& [a, b] : edges)
        if (a > b) std::swap(a, b);
    std::sort(edges.begin(), edges.end());
    g.edges = edges;
    g.adjacency.assign(n, {});
    for (const auto& [a, b] : edges) {
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
}

AreaEstimate make_areas(const std::vector<std::pair<RegionKey, std::size_t>>& counts,
                        double window_area) {
    AreaEstimate est;
    est.window_area = window_area;
    for (const auto& [k, c] : counts) {
        est.counts[k] = c;
        est.total += c;
    }
    return est;
}

bool proper(const std::map<RegionKey, int>& coloring, int n) {
    std::vector<std::set<int>> seen(n);
    for (const auto& [e, c] : coloring) {
        if (c < 1) return false;
        if (!seen[e.a].insert(c).second) return false;
        if (!seen[e.b].insert(c).second) return false;
    }
    return true;
}

std::vector<RegionKey> to_keys(const std::vector<std::pair<int, int>>& edges) {
    std::vector<RegionKey> out;
    for (const auto& [a, b] : edges) out.push_back({a, b});
    return out;
}

int graph_max_degree(int n, const std::vector<RegionKey>& edges) {
    std::vector<int> deg(n, 0);
    for (const auto& e : edges) {
        ++deg[e.a];
        ++deg[e.b];
    }
    int d = 0;
    for (int x : deg) d = std::max(d, x);
    return d;
}

} // namespace

TEST_CASE("edge cut: star removes the two smallest areas in order") {
    const auto g = make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    const auto areas = make_areas(
        {{{0, 1}, 5}, {{0, 2}, 4}, {{0, 3}, 3}, {{0, 4}, 2}, {{0, 5}, 1}}, 15.0);
    const auto cg = edge_cut(g, areas, 3);

    REQUIRE(cg.cut_log.size() == 2);
    CHECK(cg.cut_log[0].edge == RegionKey{0, 5});
    CHECK(cg.cut_log[1].edge == RegionKey{0, 4});
    CHECK(cg.restored.empty());
    REQUIRE(cg.cut == std::vector<RegionKey>{{0, 4}, {0, 5}});
    REQUIRE(cg.kept == std::vector<RegionKey>{{0, 1}, {0, 2}, {0, 3}});
    CHECK(cg.degrees[0] == 3);
    CHECK(cg.max_degree() == 3);
}

TEST_CASE("edge cut: zero-area ties break to lexicographic order") {
    const auto g = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    const auto areas = make_areas({{{0, 3}, 1}}, 4.0); // others count 0
    const auto cg = edge_cut(g, areas, 2);

    REQUIRE(cg.cut_log.size() == 2);
    CHECK(cg.cut_log[0].edge == RegionKey{0, 1});
    CHECK(cg.cut_log[1].edge == RegionKey{0, 2});
}

TEST_CASE("edge cut: restore pass re-adds when slack appears") {
    // cutting at vertex 1 later frees capacity at vertex 0, so {0,2} comes back
    const auto g = make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}});
    const auto areas = make_areas(
        {{{0, 2}, 1}, {{0, 3}, 2}, {{0, 1}, 3}, {{1, 4}, 9}, {{1, 5}, 9}}, 24.0);
    const auto cg = edge_cut(g, areas, 2);

    REQUIRE(cg.cut_log.size() == 2);
    CHECK(cg.cut_log[0].edge == RegionKey{0, 2});
    CHECK(cg.cut_log[1].edge == RegionKey{0, 1});
    REQUIRE(cg.restored == std::vector<RegionKey>{{0, 2}});
    REQUIRE(cg.cut == std::vector<RegionKey>{{0, 1}});
    CHECK(cg.degrees[0] == 2);
}

TEST_CASE("edge cut: restores prefer larger areas and respect the cap") {
    const auto g = make_graph(7, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 5}, {1, 6}});
    const auto areas = make_areas(
        {{{0, 1}, 5}, {{0, 2}, 1}, {{0, 3}, 2}, {{0, 4}, 3}, {{1, 5}, 9}, {{1, 6}, 9}},
        29.0);
    const auto cg = edge_cut(g, areas, 2);

    // pass 1: vertex 0 drops {0,2} then {0,3}; vertex 1 drops {0,1}
    REQUIRE(cg.cut_log.size() == 3);
    CHECK(cg.cut_log[0].edge == RegionKey{0, 2});
    CHECK(cg.cut_log[1].edge == RegionKey{0, 3});
    CHECK(cg.cut_log[2].edge == RegionKey{0, 1});
    // pass 2 at vertex 0: {0,1} blocked (vertex 1 full), {0,3} restored, then full
    REQUIRE(cg.restored == std::vector<RegionKey>{{0, 3}});
    REQUIRE(cg.cut == std::vector<RegionKey>{{0, 1}, {0, 2}});
    CHECK(cg.degrees[0] == 2);
}

TEST_CASE("edge cut: cap below one rejected, no-op when graph already fits") {
    const auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto areas = make_areas({{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}}, 3.0);
    CHECK_THROWS_AS(edge_cut(g, areas, 0), std::invalid_argument);
    const auto cg = edge_cut(g, areas, 2);
    CHECK(cg.cut.empty());
    CHECK(cg.cut_log.empty());
    CHECK(cg.kept.size() == 3);
}

TEST_CASE("edge cut: final max degree is min of graph degree and cap") {
    rng::Stream rs(404, "cutfuzz");
    for (int it = 0; it < 40; ++it) {
        const int n = 8 + static_cast<int>(rs.below(20));
        std::vector<std::pair<int, int>> edges;
        std::vector<std::pair<RegionKey, std::size_t>> counts;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rs.uniform() < 0.25) {
                    edges.push_back({a, b});
                    counts.push_back({{a, b}, rs.below(50)});
                }
        if (edges.empty()) continue;
        const auto g = make_graph(n, edges);
        const auto areas = make_areas(counts, 100.0);
        for (const int cap : {1, 2, 3, 5}) {
            const auto cg = edge_cut(g, areas, cap);
            CHECK(cg.max_degree() == std::min(g.max_degree(), cap));
            // kept and cut partition the original edge set
            std::set<RegionKey> all(cg.kept.begin(), cg.kept.end());
            for (const auto& e : cg.cut) REQUIRE(all.insert(e).second);
            REQUIRE(all.size() == edges.size());
            for (const auto& [a, b] : g.edges) REQUIRE(all.count({a, b}) == 1);
            // restored events came from the log and are not in the final cut
            std::set<RegionKey> logged;
            for (const auto& ev : cg.cut_log) logged.insert(ev.edge);
            for (const auto& e : cg.restored) {
                CHECK(logged.count(e) == 1);
                for (const auto& c : cg.cut) CHECK(!(c == e));
            }
        }
    }
}

TEST_CASE("coloring: K4 reaches three colors") {
    const auto col =
        edge_color(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(col.target == 3);
    CHECK(col.colors_used == 3);
    CHECK(col.reached_target);
    CHECK(proper(col.color_of, 4));
}

TEST_CASE("coloring: odd cycle needs the extra color") {
    const auto col = edge_color(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(col.target == 2);
    CHECK(col.colors_used == 3);
    CHECK(!col.reached_target);
    CHECK(proper(col.color_of, 3));

    const auto c5 = edge_color(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
    CHECK(c5.colors_used == 3);
    CHECK(proper(c5.color_of, 5));
}

TEST_CASE("coloring: even cycle and bipartite graphs reach max degree") {
    const auto c4 = edge_color(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    CHECK(c4.colors_used == 2);
    CHECK(proper(c4.color_of, 4));

    rng::Stream rs(77, "bipartite");
    for (int it = 0; it < 20; ++it) {
        std::vector<RegionKey> edges;
        for (int a = 0; a < 15; ++a)
            for (int b = 15; b < 30; ++b)
                if (rs.uniform() < 0.3) edges.push_back({a, b});
        if (edges.empty()) continue;
        const auto col = edge_color(30, edges);
        const int delta = graph_max_degree(30, edges);
        CHECK(col.colors_used == delta);
        CHECK(col.reached_target);
        CHECK(proper(col.color_of, 30));
    }
}

TEST_CASE("coloring: toroidal triangular lattice is six-colorable") {
    // 6x6 wraparound lattice with one diagonal per cell: 6-regular
    const int m = 6;
    auto id = [&](int r, int c) { return ((r + m) % m) * m + (c + m) % m; };
    std::vector<RegionKey> edges;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            edges.push_back({id(r, c), id(r, c + 1)});
            edges.push_back({id(r, c), id(r + 1, c)});
            edges.push_back({id(r, c), id(r + 1, c + 1)});
        }
    REQUIRE(edges.size() == 108);
    REQUIRE(graph_max_degree(m * m, edges) == 6);

    const auto col = edge_color(m * m, edges);
    CHECK(proper(col.color_of, m * m));
    CHECK(col.colors_used == 6);
    CHECK(col.reached_target);
}

TEST_CASE("coloring: never more than max degree plus one, zero budget allowed") {
    rng::Stream rs(505, "colorfuzz");
    for (int it = 0; it < 30; ++it) {
        const int n = 6 + static_cast<int>(rs.below(40));
        std::vector<RegionKey> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rs.uniform() < 0.15) edges.push_back({a, b});
        if (edges.empty()) continue;
        const int delta = graph_max_degree(n, edges);

        const auto pure = edge_color(n, edges, 0);
        CHECK(proper(pure.color_of, n));
        CHECK(pure.colors_used <= delta + 1);
        CHECK(pure.colors_used >= delta);
        CHECK(pure.attempts_used == 0);

        const auto col = edge_color(n, edges);
        CHECK(proper(col.color_of, n));
        CHECK(col.colors_used <= delta + 1);
        CHECK(col.attempts_used <= 10 * static_cast<long>(edges.size()));
        CHECK(static_cast<std::size_t>(col.color_of.size()) == edges.size());
    }
}

TEST_CASE("cluster plan: exact lattice yields the four-pattern grid structure") {
    GridSpec spec;
    spec.rows = 7;
    spec.cols = 7;
    spec.cell_size = 200.0;
    spec.p = 0.0;
    const auto topo = generate_perturbed_grid(spec, 2024);
    const auto g = delaunay(topo);
    const auto areas = estimate_region_areas(topo, 150000, 2024);
    const auto plan = build_cluster_plan(g, areas, 4);

    CHECK(plan.n_bs == 49);
    CHECK(plan.delta_ec == 4);
    CHECK(plan.max_degree == 4);

    // all cell diagonals fall except the two whose endpoints never exceed the cap
    std::set<RegionKey> cut(plan.cut_regions.begin(), plan.cut_regions.end());
    CHECK(cut.size() == 34);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            const RegionKey diag{r * 7 + c, (r + 1) * 7 + c + 1};
            const bool survivor =
                diag == RegionKey{5, 13} || diag == RegionKey{35, 43};
            CHECK(cut.count(diag) == (survivor ? 0u : 1u));
        }

    // every axis edge is kept
    std::size_t kept_count = 0;
    for (int ell = 0; ell < plan.L; ++ell) kept_count += plan.patterns[ell].size();
    CHECK(kept_count == 86); // 84 axis edges + 2 surviving diagonals
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) {
            const int v = r * 7 + c;
            if (c + 1 < 7) CHECK(plan.is_kept({v, v + 1}));
            if (r + 1 < 7) CHECK(plan.is_kept({v, v + 7}));
        }

    CHECK(plan.L == 4);
    CHECK(plan.reached_target);

    // patterns are pairwise BS-disjoint
    for (int ell = 0; ell < plan.L; ++ell) {
        std::set<int> bs;
        for (const auto& e : plan.patterns[ell]) {
            CHECK(bs.insert(e.a).second);
            CHECK(bs.insert(e.b).second);
        }
        REQUIRE(plan.pattern_bs[ell] == std::vector<int>(bs.begin(), bs.end()));
    }
}

TEST_CASE("cluster plan: perturbed grids stay proper and capped") {
    for (const double p : {100.0, 200.0}) {
        GridSpec spec;
        spec.p = p;
        const auto topo = generate_perturbed_grid(spec, 91);
        const auto g = delaunay(topo);
        const auto areas = estimate_region_areas(topo, 60000, 91);
        const auto plan = build_cluster_plan(g, areas, 4);

        CHECK(plan.max_degree == std::min(g.max_degree(), 4));
        CHECK(plan.L <= 5);
        CHECK(plan.L >= plan.max_degree);
        std::set<RegionKey> seen;
        for (int ell = 0; ell < plan.L; ++ell) {
            std::set<int> bs;
            for (const auto& e : plan.patterns[ell]) {
                CHECK(bs.insert(e.a).second);
                CHECK(bs.insert(e.b).second);
                CHECK(seen.insert(e).second);
                CHECK(plan.pattern_of.at(e) == ell);
            }
        }
        for (const auto& e : plan.cut_regions) CHECK(seen.insert(e).second);
        CHECK(seen.size() == g.edges.size());
    }
}

TEST_CASE("cluster plan: text round trip") {
    GridSpec spec;
    spec.p = 200.0;
    const auto topo = generate_perturbed_grid(spec, 7);
    const auto g = delaunay(topo);
    const auto areas = estimate_region_areas(topo, 40000, 7);
    const auto plan = build_cluster_plan(g, areas, 4);

    std::stringstream ss;
    save_plan(plan, ss, "written by unit test\nsecond line");
    const auto back = load_plan(ss);

    CHECK(back.n_bs == plan.n_bs);
    CHECK(back.delta_ec == plan.delta_ec);
    CHECK(back.L == plan.L);
    CHECK(back.patterns == plan.patterns);
    CHECK(back.cut_regions == plan.cut_regions);
    CHECK(back.pattern_bs == plan.pattern_bs);
    CHECK(back.max_degree == plan.max_degree);
    for (const auto& [e, ell] : plan.pattern_of) CHECK(back.pattern_of.at(e) == ell);
}

TEST_CASE("cluster plan: loader rejects malformed input") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return load_plan(in);
    };
    CHECK_THROWS_AS(parse("n_bs 4\ndelta_ec 2\npatterns 1\npattern 1\n0 1\ncut\n"),
                    std::runtime_error); // missing end
    CHECK_THROWS_AS(parse("n_bs 4\ndelta_ec 2\npatterns 1\npattern 1\n0 1\n0 2\ncut\nend\n"),
                    std::runtime_error); // BS reused inside a pattern
    CHECK_THROWS_AS(
        parse("n_bs 4\ndelta_ec 2\npatterns 2\npattern 1\n0 1\npattern 2\n0 1\ncut\nend\n"),
        std::runtime_error); // duplicate edge
    CHECK_THROWS_AS(parse("n_bs 4\ndelta_ec 2\npatterns 1\npattern 1\n0 9\ncut\nend\n"),
                    std::runtime_error); // vertex out of range
    CHECK_THROWS_AS(parse("n_bs 4\ndelta_ec 2\npatterns 1\npattern 1\n1 1\ncut\nend\n"),
                    std::runtime_error); // self loop
    CHECK_THROWS_AS(parse("n_bs 4\ndelta_ec 2\npatterns 1\npattern 2\n0 1\ncut\nend\n"),
                    std::runtime_error); // pattern index out of range
    CHECK_THROWS_AS(parse("n_bs 4\ndelta_ec 2\npatterns 1\npattern 1\n0 1\ncut\n0 1\nend\n"),
                    std::runtime_error); // edge both kept and cut

    // comments and blank lines are fine
    const auto ok = parse("# hello\nn_bs 4\ndelta_ec 2\npatterns 1\n\npattern 1\n0 1 # pair\ncut\n2 3\nend\n");
    CHECK(ok.L == 1);
    CHECK(ok.patterns[0] == std::vector<RegionKey>{{0, 1}});
    CHECK(ok.cut_regions == std::vector<RegionKey>{{2, 3}});
}

TEST_CASE("cluster plan: determinism across repeated builds") {
    GridSpec spec;
    spec.p = 100.0;
    const auto topo = generate_perturbed_grid(spec, 33);
    const auto g = delaunay(topo);
    const auto areas = estimate_region_areas(topo, 30000, 33);
    const auto a = build_cluster_plan(g, areas, 4);
    const auto b = build_cluster_plan(g, areas, 4);
    CHECK(a.patterns == b.patterns);
    CHECK(a.cut_regions == b.cut_regions);
    CHECK(a.L == b.L);
}
