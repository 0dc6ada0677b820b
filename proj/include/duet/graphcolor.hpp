#pragma once

// Degree capping and pattern construction.
//
// edge_cut implements the two-pass area-aware capping: pass 1 walks vertices
// in index order and, while a vertex exceeds delta_ec, removes its incident
// kept edge with the smallest estimated region area (ties: lexicographic
// edge order).  Pass 2 walks vertices in index order again and re-adds
// logged cut edges at under-degree vertices in descending area order when
// both endpoints stay within the cap.
//
// edge_color is Misra-Gries (constructive, never more than max_degree + 1
// colors) followed by a budgeted elimination pass that tries to remove the
// extra color: fan insertion restricted to max_degree colors, Kempe chains
// from both endpoints, seeded random flips to escape dead ends, and greedy
// restarts on reshuffled edge orders.  When the heuristic falls short the
// extra color simply remains and the plan reports it, so class-2 graphs
// like odd cycles come out with max_degree + 1 patterns.  Pattern count L
// is the number of colors actually used.  Everything is seeded internally,
// so results are reproducible bit for bit.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "delaunay.hpp"
#include "regions.hpp"
#include "rng.hpp"

namespace duet {

struct CutGraph {
    int n = 0;
    int delta_ec = 0;
    std::vector<RegionKey> kept;     // lex sorted
    std::vector<RegionKey> cut;      // lex sorted, final state
    struct CutEvent {
        RegionKey edge;
        double area;
    };
    std::vector<CutEvent> cut_log;   // pass-1 removals in removal order
    std::vector<RegionKey> restored; // pass-2 re-additions in order
    std::vector<int> degrees;

    int max_degree() const {
        int d = 0;
        for (int x : degrees) d = std::max(d, x);
        return d;
    }
};

inline CutGraph edge_cut(const DelaunayGraph& g, const AreaEstimate& areas, int delta_ec) {
    if (delta_ec < 1) throw std::invalid_argument("edge_cut: delta_ec must be >= 1");

    std::set<RegionKey> kept;
    std::vector<int> deg(g.n, 0);
    for (const auto& [a, b] : g.edges) {
        kept.insert({a, b});
        ++deg[a];
        ++deg[b];
    }

    CutGraph out;
    out.n = g.n;
    out.delta_ec = delta_ec;

    // pass 1: cap every vertex, smallest-area incident edge goes first
    for (int v = 0; v < g.n; ++v) {
        while (deg[v] > delta_ec) {
            RegionKey victim;
            double victim_area = 0.0;
            bool have = false;
            for (const int w : g.adjacency[v]) {
                const RegionKey e{v, w};
                if (!kept.count(e)) continue;
                const double a = areas.area(e);
                if (!have || a < victim_area || (a == victim_area && e < victim)) {
                    victim = e;
                    victim_area = a;
                    have = true;
                }
            }
            if (!have) throw std::logic_error("edge_cut: degree bookkeeping out of sync");
            kept.erase(victim);
            --deg[victim.a];
            --deg[victim.b];
            out.cut_log.push_back({victim, victim_area});
        }
    }

    // pass 2: refill under-degree vertices, largest area first
    std::set<RegionKey> still_cut;
    for (const auto& ev : out.cut_log) still_cut.insert(ev.edge);
    for (int v = 0; v < g.n; ++v) {
        if (deg[v] >= delta_ec) continue;
        std::vector<CutGraph::CutEvent> candidates;
        for (const auto& ev : out.cut_log)
            if (still_cut.count(ev.edge) && ev.edge.contains(v)) candidates.push_back(ev);
        std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
            if (x.area != y.area) return x.area > y.area;
            return x.edge < y.edge;
        });
        for (const auto& ev : candidates) {
            if (deg[v] >= delta_ec) break;
            if (deg[ev.edge.a] >= delta_ec || deg[ev.edge.b] >= delta_ec) continue;
            still_cut.erase(ev.edge);
            kept.insert(ev.edge);
            ++deg[ev.edge.a];
            ++deg[ev.edge.b];
            out.restored.push_back(ev.edge);
        }
    }

    out.kept.assign(kept.begin(), kept.end());
    out.cut.assign(still_cut.begin(), still_cut.end());
    out.degrees = deg;
    return out;
}

struct EdgeColoring {
    int target = 0;       // max degree of the colored graph
    int colors_used = 0;  // L
    bool reached_target = false;
    long attempts_used = 0;
    std::map<RegionKey, int> color_of; // 1..colors_used
};

namespace detail {

class EdgeColorer {
public:
    EdgeColorer(int n, const std::vector<RegionKey>& edges) : n_(n), edges_(edges) {
        std::vector<int> deg(n_, 0);
        for (const auto& e : edges_) {
            if (e.a < 0 || e.b >= n_) throw std::invalid_argument("edge_color: vertex out of range");
            ++deg[e.a];
            ++deg[e.b];
        }
        delta_ = 0;
        for (int d : deg) delta_ = std::max(delta_, d);
        palette_ = delta_ + 1;
        at_.assign(n_, std::vector<int>(palette_ + 1, -1));
    }

    EdgeColoring run(long budget) {
        std::vector<RegionKey> order = edges_;
        std::sort(order.begin(), order.end());
        std::set<RegionKey> unique(order.begin(), order.end());
        if (unique.size() != order.size())
            throw std::invalid_argument("edge_color: duplicate edge");

        EdgeColoring result;
        result.target = delta_;
        if (budget < 0) budget = 10 * static_cast<long>(edges_.size());

        // one attempt is one uncolor-and-reinsert cycle on one edge; the
        // budget is split over greedy restarts with reshuffled edge orders
        rng::Stream rs(rng::fnv1a64("edge_color"), "elimination");
        long attempts = 0;
        std::map<RegionKey, int> best;
        std::size_t best_extra = edges_.size() + 1;
        const long kRestarts = 12;

        for (long restart = 0;; ++restart) {
            std::vector<RegionKey> mg_order = order;
            if (restart > 0)
                for (std::size_t i = mg_order.size(); i > 1; --i)
                    std::swap(mg_order[i - 1], mg_order[rs.below(i)]);
            clear_colors();
            for (const auto& e : mg_order)
                if (!insert_fan(e.a, e.b, palette_))
                    throw std::logic_error("edge_color: fan insertion failed at full palette");

            const long slice = std::max<long>(budget / kRestarts, 1);
            local_search(attempts, std::min(budget, attempts + slice), rs);

            const std::size_t extra = extra_edges().size();
            if (extra < best_extra) {
                best_extra = extra;
                best = ecol_;
            }
            if (best_extra == 0 || attempts >= budget) break;
        }
        if (extra_edges().size() > best_extra) restore(best);
        result.attempts_used = attempts;

        // compress used colors to 1..L preserving numeric order
        std::set<int> used;
        for (const auto& [e, c] : ecol_) used.insert(c);
        std::map<int, int> remap;
        int next = 1;
        for (int c : used) remap[c] = next++;
        for (const auto& [e, c] : ecol_) result.color_of[e] = remap[c];
        result.colors_used = next - 1;
        result.reached_target = edges_.empty() || result.colors_used <= delta_;
        return result;
    }

private:
    int color_of(RegionKey e) const {
        const auto it = ecol_.find(e);
        return it == ecol_.end() ? 0 : it->second;
    }

    void set(int u, int v, int c) {
        if (at_[u][c] != -1 || at_[v][c] != -1)
            throw std::logic_error("edge_color: improper assignment attempted");
        at_[u][c] = v;
        at_[v][c] = u;
        ecol_[{u, v}] = c;
    }

    void unset(int u, int v) {
        const int c = color_of({u, v});
        if (c == 0) throw std::logic_error("edge_color: unset on uncolored edge");
        at_[u][c] = -1;
        at_[v][c] = -1;
        ecol_.erase(RegionKey{u, v});
    }

    void clear_colors() {
        ecol_.clear();
        for (auto& row : at_) std::fill(row.begin(), row.end(), -1);
    }

    void restore(const std::map<RegionKey, int>& saved) {
        clear_colors();
        for (const auto& [e, c] : saved) set(e.a, e.b, c);
    }

    bool is_free(int v, int c) const { return at_[v][c] == -1; }

    int smallest_free(int v, int limit) const {
        for (int c = 1; c <= limit; ++c)
            if (is_free(v, c)) return c;
        return 0;
    }

    std::vector<RegionKey> extra_edges() const {
        std::vector<RegionKey> out;
        for (const auto& [e, c] : ecol_)
            if (c > delta_) out.push_back(e);
        return out;
    }

    // maximal path from x alternating colors (first, second)
    std::vector<RegionKey> alternating_path(int x, int first, int second) const {
        std::vector<RegionKey> path;
        int cur = x, want = first;
        while (at_[cur][want] != -1) {
            const int nxt = at_[cur][want];
            path.push_back({cur, nxt});
            cur = nxt;
            want = (want == first) ? second : first;
            if (cur == x) break; // cannot happen in a proper coloring; guards cycles
        }
        return path;
    }

    void flip_path(const std::vector<RegionKey>& path, int c1, int c2) {
        std::vector<int> old(path.size());
        for (std::size_t i = 0; i < path.size(); ++i) old[i] = color_of(path[i]);
        for (const auto& e : path) unset(e.a, e.b);
        for (std::size_t i = 0; i < path.size(); ++i)
            set(path[i].a, path[i].b, old[i] == c1 ? c2 : c1);
    }

    // Misra-Gries fan insertion of the uncolored edge (u,v).  With palette
    // delta_+1 this always succeeds; restricted to delta_ it may fail, in
    // which case the coloring is left exactly as found.
    bool insert_fan(int u, int v, int palette) {
        std::vector<int> fan{v};
        std::set<int> in_fan{v};
        for (;;) {
            const int last = fan.back();
            int pick = -1;
            for (int c = 1; c <= palette; ++c) {
                const int w = at_[u][c];
                if (w == -1 || in_fan.count(w)) continue;
                if (is_free(last, c) && (pick == -1 || w < pick)) pick = w;
            }
            if (pick == -1) break;
            fan.push_back(pick);
            in_fan.insert(pick);
        }

        const int c = smallest_free(u, palette);
        const int d = smallest_free(fan.back(), palette);
        if (c == 0 || d == 0) return false; // saturated tip under a restricted palette

        // invert the maximal (d,c)-path from u so that d becomes free on u
        std::vector<RegionKey> inverted;
        if (c != d) {
            inverted = alternating_path(u, d, c);
            flip_path(inverted, d, c);
        }

        // first fan prefix that is still a fan and ends at a vertex missing d
        int w = -1;
        for (std::size_t i = 0; i < fan.size(); ++i) {
            if (i > 0) {
                const int col = color_of({u, fan[i]});
                if (col == 0 || !is_free(fan[i - 1], col)) break;
            }
            if (is_free(fan[i], d)) {
                w = static_cast<int>(i);
                break;
            }
        }
        if (w < 0) {
            if (!inverted.empty()) flip_path(inverted, d, c);
            return false;
        }

        for (int j = 0; j < w; ++j) {
            const int cnext = color_of({u, fan[j + 1]});
            unset(u, fan[j + 1]);
            set(u, fan[j], cnext);
        }
        set(u, fan[w], d);
        return true;
    }

    // attempt to color the currently uncolored (u,v) within 1..delta_
    bool try_restricted(int u, int v) {
        for (int a = 1; a <= delta_; ++a)
            if (is_free(u, a) && is_free(v, a)) {
                set(u, v, a);
                return true;
            }
        if (insert_fan(u, v, delta_)) return true;
        for (int a = 1; a <= delta_; ++a) {
            if (!is_free(u, a)) continue;
            for (int b = 1; b <= delta_; ++b) {
                if (b == a || !is_free(v, b)) continue;
                // chain from v: frees a at v unless the chain ends at u
                const auto pv = alternating_path(v, a, b);
                flip_path(pv, a, b);
                if (is_free(u, a) && is_free(v, a)) {
                    set(u, v, a);
                    return true;
                }
                flip_path(pv, a, b);
                // chain from u: frees b at u unless the chain ends at v
                const auto pu = alternating_path(u, b, a);
                flip_path(pu, a, b);
                if (is_free(u, b) && is_free(v, b)) {
                    set(u, v, b);
                    return true;
                }
                flip_path(pu, a, b);
            }
        }
        return false;
    }

    void local_search(long& attempts, long limit, rng::Stream& rs) {
        auto extra = extra_edges();
        while (!extra.empty() && attempts < limit) {
            ++attempts;
            const RegionKey e = extra[rs.below(extra.size())];
            const int old = color_of(e);
            unset(e.a, e.b);
            if (try_restricted(e.a, e.b)) {
                extra = extra_edges();
                continue;
            }
            // every move dead-ends: make one random flip anyway so later
            // attempts see a different coloring, and park the edge again
            perturb(e.a, e.b, rs);
            set(e.a, e.b, old);
        }
    }

    void perturb(int u, int v, rng::Stream& rs) {
        std::vector<int> fu, fv;
        for (int c = 1; c <= delta_; ++c) {
            if (is_free(u, c)) fu.push_back(c);
            if (is_free(v, c)) fv.push_back(c);
        }
        if (fu.empty() || fv.empty()) return;
        const int a = fu[rs.below(fu.size())];
        const int b = fv[rs.below(fv.size())];
        if (a == b) return; // would have been colored directly
        if (rs.below(2) == 0)
            flip_path(alternating_path(v, a, b), a, b);
        else
            flip_path(alternating_path(u, b, a), a, b);
    }

    int n_;
    std::vector<RegionKey> edges_;
    int delta_ = 0;
    int palette_ = 1;
    std::vector<std::vector<int>> at_; // at_[v][c] = partner across the c-colored edge
    std::map<RegionKey, int> ecol_;
};

} // namespace detail

inline EdgeColoring edge_color(int n, const std::vector<RegionKey>& edges, long budget = -1) {
    return detail::EdgeColorer(n, edges).run(budget);
}

struct ClusterPlan {
    int n_bs = 0;
    int delta_ec = 0;
    int L = 0;
    std::vector<std::vector<RegionKey>> patterns; // pattern index 0..L-1, pairs lex sorted
    std::vector<RegionKey> cut_regions;           // lex sorted
    std::vector<std::vector<int>> pattern_bs;     // per pattern, sorted BS ids
    std::map<RegionKey, int> pattern_of;          // kept edge -> 0-based pattern
    bool reached_target = false;
    long coloring_attempts = 0;
    int max_degree = 0;

    const std::vector<int>& bs_of_pattern(int ell) const { return pattern_bs.at(ell); }
    bool is_kept(RegionKey k) const { return pattern_of.count(k) > 0; }
};

inline ClusterPlan build_cluster_plan(const DelaunayGraph& g, const AreaEstimate& areas,
                                      int delta_ec, long budget = -1) {
    const CutGraph cg = edge_cut(g, areas, delta_ec);
    const EdgeColoring col = edge_color(cg.n, cg.kept, budget);

    ClusterPlan plan;
    plan.n_bs = cg.n;
    plan.delta_ec = delta_ec;
    plan.L = col.colors_used;
    plan.cut_regions = cg.cut;
    plan.reached_target = col.reached_target;
    plan.coloring_attempts = col.attempts_used;
    plan.max_degree = cg.max_degree();
    plan.patterns.assign(plan.L, {});
    for (const auto& [edge, c] : col.color_of) plan.patterns[c - 1].push_back(edge);
    for (auto& p : plan.patterns) std::sort(p.begin(), p.end());
    plan.pattern_bs.assign(plan.L, {});
    for (int ell = 0; ell < plan.L; ++ell) {
        std::set<int> bs;
        for (const auto& e : plan.patterns[ell]) {
            bs.insert(e.a);
            bs.insert(e.b);
            plan.pattern_of[e] = ell;
        }
        plan.pattern_bs[ell].assign(bs.begin(), bs.end());
    }
    return plan;
}

// --- plan file format ----------------------------------------------------
//
//   # free-form comments
//   n_bs 49
//   delta_ec 4
//   patterns 4
//   pattern 1
//   0 1
//   ...
//   cut
//   3 9
//   end

inline void save_plan(const ClusterPlan& plan, std::ostream& out,
                      const std::string& header_comment = "") {
    if (!header_comment.empty()) {
        std::istringstream lines(header_comment);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << '\n';
    }
    out << "n_bs " << plan.n_bs << '\n';
    out << "delta_ec " << plan.delta_ec << '\n';
    out << "patterns " << plan.L << '\n';
    for (int ell = 0; ell < plan.L; ++ell) {
        out << "pattern " << ell + 1 << '\n';
        for (const auto& e : plan.patterns[ell]) out << e.a << ' ' << e.b << '\n';
    }
    out << "cut\n";
    for (const auto& e : plan.cut_regions) out << e.a << ' ' << e.b << '\n';
    out << "end\n";
}

inline ClusterPlan load_plan(std::istream& in) {
    ClusterPlan plan;
    std::string line;
    int section = -1; // -1 header, 0..L-1 pattern, -2 cut, -3 done
    bool saw_n = false, saw_delta = false, saw_l = false;
    auto fail = [](const std::string& msg) {
        throw std::runtime_error("plan parse error: " + msg);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "n_bs") {
            if (!(ls >> plan.n_bs) || plan.n_bs < 0) fail("bad n_bs");
            saw_n = true;
        } else if (tok == "delta_ec") {
            if (!(ls >> plan.delta_ec) || plan.delta_ec < 1) fail("bad delta_ec");
            saw_delta = true;
        } else if (tok == "patterns") {
            if (!(ls >> plan.L) || plan.L < 0) fail("bad pattern count");
            plan.patterns.assign(plan.L, {});
            saw_l = true;
        } else if (tok == "pattern") {
            int idx;
            if (!saw_l || !(ls >> idx) || idx < 1 || idx > plan.L) fail("bad pattern index");
            section = idx - 1;
        } else if (tok == "cut") {
            section = -2;
        } else if (tok == "end") {
            section = -3;
            break;
        } else {
            int a, b;
            std::istringstream es(line);
            if (!(es >> a >> b) || section == -1 || section == -3) fail("unexpected line: " + line);
            if (a == b) fail("self-loop edge");
            const RegionKey e{a, b};
            if (section >= 0)
                plan.patterns[section].push_back(e);
            else
                plan.cut_regions.push_back(e);
        }
    }
    if (!saw_n || !saw_delta || !saw_l || section != -3) fail("missing sections");

    std::set<RegionKey> seen;
    plan.pattern_bs.assign(plan.L, {});
    for (int ell = 0; ell < plan.L; ++ell) {
        std::set<int> bs;
        for (const auto& e : plan.patterns[ell]) {
            if (e.a < 0 || e.b >= plan.n_bs) fail("edge out of range");
            if (!seen.insert(e).second) fail("duplicate edge across patterns");
            if (bs.count(e.a) || bs.count(e.b)) fail("pattern reuses a BS");
            bs.insert(e.a);
            bs.insert(e.b);
            plan.pattern_of[e] = ell;
        }
        plan.pattern_bs[ell].assign(bs.begin(), bs.end());
        std::sort(plan.patterns[ell].begin(), plan.patterns[ell].end());
    }
    for (const auto& e : plan.cut_regions) {
        if (e.a < 0 || e.b >= plan.n_bs) fail("cut edge out of range");
        if (seen.count(e)) fail("edge both kept and cut");
    }
    std::sort(plan.cut_regions.begin(), plan.cut_regions.end());

    std::vector<int> deg(plan.n_bs, 0);
    for (const auto& [e, ell] : plan.pattern_of) {
        ++deg[e.a];
        ++deg[e.b];
    }
    for (int d : deg) plan.max_degree = std::max(plan.max_degree, d);
    plan.reached_target = plan.L <= plan.max_degree || plan.pattern_of.empty();
    return plan;
}

} // namespace duet
