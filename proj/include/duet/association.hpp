#pragma once

// User selection for the coordination plan and the two baselines.
//
// Proposed: each kept second-order region draws K users per side; a region
// with a short side idles for that round, and users of cut regions are
// never coordinated.  Because the patterns are a proper edge coloring, one
// BS serves at most one region per pattern.
//
// Dynamic baseline: a per-slot scheduler in which users, in random order,
// claim their nearest-two BS pair; each claim is completed with a partner
// user drawn from the other BS's cell, and unpaired BSs fall back to
// uncoordinated service.
//
// Static baseline: BS pairs are fixed by the topology alone (random
// matching on the neighbor graph), then each BS picks K users from its own
// first-order cell regardless of where they sit relative to the pair.
//
// Every routine is a pure function of (inputs, seed).  Served lists are
// sorted by user index.

#include <duet/delaunay.hpp>
#include <duet/graphcolor.hpp>
#include <duet/regions.hpp>
#include <duet/rng.hpp>
#include <duet/topology.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace duet {

enum class ServiceMethod { proposed, dynamic_clustering, static_clustering, single_cell };

struct ServedUser {
    int user = -1;
    int serving_bs = -1;
    int partner_bs = -1; // -1 when the BS operates without coordination
    int pattern = -1;    // -1 for the per-slot baselines

    bool operator==(const ServedUser&) const = default;
};

struct ServiceAssignment {
    ServiceMethod method = ServiceMethod::proposed;
    std::vector<ServedUser> served; // sorted by user index
    std::vector<int> unserved;      // ascending
};

// nearest-two classification for every user; index-aligned with users.pos
inline std::vector<NearestTwo> classify_users(const UserSet& users, const Topology& t) {
    std::vector<NearestTwo> out;
    out.reserve(users.pos.size());
    for (const auto& q : users.pos) out.push_back(nearest_two(q, t.bs));
    return out;
}

// users of one second-order region split by their first-order owner
struct RegionSides {
    std::vector<int> lo; // nearest BS is key.a
    std::vector<int> hi; // nearest BS is key.b
};

inline std::map<RegionKey, RegionSides> group_by_region(const std::vector<NearestTwo>& cls) {
    std::map<RegionKey, RegionSides> m;
    for (int u = 0; u < static_cast<int>(cls.size()); ++u) {
        const RegionKey k = cls[u].key();
        auto& sides = m[k];
        (cls[u].nearest == k.a ? sides.lo : sides.hi).push_back(u);
    }
    return m;
}

namespace detail {

// k uniform picks without replacement; caps at the pool size
inline std::vector<int> sample_k(std::vector<int> pool, int k, rng::Stream& rs) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < k && !pool.empty()) {
        const auto j = static_cast<std::size_t>(rs.below(pool.size()));
        out.push_back(pool[j]);
        pool[j] = pool.back();
        pool.pop_back();
    }
    return out;
}

inline void shuffle(std::vector<int>& v, rng::Stream& rs) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rs.below(i)]);
}

inline void finalize(ServiceAssignment& sa, std::size_t n_users) {
    std::sort(sa.served.begin(), sa.served.end(),
              [](const ServedUser& a, const ServedUser& b) { return a.user < b.user; });
    std::vector<char> taken(n_users, 0);
    for (const auto& s : sa.served) taken[static_cast<std::size_t>(s.user)] = 1;
    for (std::size_t u = 0; u < n_users; ++u)
        if (!taken[u]) sa.unserved.push_back(static_cast<int>(u));
}

} // namespace detail

// K users per side of every kept region, chosen uniformly; a region whose
// side holds fewer than K users serves nobody this round (its resource is
// wasted), which is the effect the edge-user experiments measure.  Served
// users are guaranteed to be coordinated by exactly their two closest BSs.
// The cls overloads accept a precomputed classification so per-round
// schedulers do not redo the nearest-two scan.
inline ServiceAssignment associate_proposed(const std::vector<NearestTwo>& cls,
                                            const ClusterPlan& plan, const Topology& t,
                                            int k_users, std::uint64_t seed) {
    if (k_users < 1) throw std::invalid_argument("associate_proposed: K must be at least 1");
    if (plan.n_bs != static_cast<int>(t.bs.size()))
        throw std::invalid_argument("associate_proposed: plan was built for a different topology");

    const auto groups = group_by_region(cls);
    rng::Stream rs(seed, "proposed_users");

    ServiceAssignment sa;
    sa.method = ServiceMethod::proposed;
    for (const auto& [key, ell] : plan.pattern_of) { // lex region order
        const auto it = groups.find(key);
        if (it == groups.end()) continue;
        const RegionSides& sides = it->second;
        if (static_cast<int>(sides.lo.size()) < k_users ||
            static_cast<int>(sides.hi.size()) < k_users)
            continue; // inactive region
        for (int u : detail::sample_k(sides.lo, k_users, rs))
            sa.served.push_back({u, key.a, key.b, ell});
        for (int u : detail::sample_k(sides.hi, k_users, rs))
            sa.served.push_back({u, key.b, key.a, ell});
    }
    detail::finalize(sa, cls.size());
    return sa;
}

inline ServiceAssignment associate_proposed(const UserSet& users, const ClusterPlan& plan,
                                            const Topology& t, int k_users,
                                            std::uint64_t seed) {
    return associate_proposed(classify_users(users, t), plan, t, k_users, seed);
}

// One scheduling slot of the dynamic baseline.  Users claim their
// nearest-two pair in random order; a claim completes only when the other
// BS of the pair can also serve someone, keeping every cluster fully
// populated.  The partner is the unserved user of that BS's own cell that
// is closest to it, preferring users who sit in the pair's shared
// second-order region; serving from the own cell keeps the first-order
// association invariant.  BSs left unpaired serve their nearest own-cell
// user without coordination.
inline ServiceAssignment schedule_dynamic(const std::vector<NearestTwo>& cls, const Topology& t,
                                          int k_users, std::uint64_t seed) {
    if (k_users != 1)
        throw std::invalid_argument("schedule_dynamic: comparison scheduler supports only K = 1");

    const int n_bs = static_cast<int>(t.bs.size());
    const int n_u = static_cast<int>(cls.size());

    std::vector<int> order(n_u);
    std::iota(order.begin(), order.end(), 0);
    rng::Stream rs(seed, "dynamic_order");
    detail::shuffle(order, rs);

    std::vector<char> bs_busy(n_bs, 0);
    std::vector<char> done(n_u, 0);
    ServiceAssignment sa;
    sa.method = ServiceMethod::dynamic_clustering;

    const auto nearest_cell_user = [&](int b, int skip, bool region_only, int other) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int v = 0; v < n_u; ++v) {
            if (done[v] || v == skip) continue;
            if (cls[v].nearest != b) continue;
            if (region_only && cls[v].second != other) continue;
            if (cls[v].d_nearest < best_d) {
                best = v;
                best_d = cls[v].d_nearest;
            }
        }
        return best;
    };

    for (int u : order) {
        if (done[u]) continue;
        const int b1 = cls[u].nearest;
        const int b2 = cls[u].second;
        if (bs_busy[b1] || bs_busy[b2]) continue;
        int w = nearest_cell_user(b2, u, true, b1);
        if (w < 0) w = nearest_cell_user(b2, u, false, b1);
        if (w < 0) continue; // nobody for the other BS, no cluster forms
        bs_busy[b1] = 1;
        bs_busy[b2] = 1;
        sa.served.push_back({u, b1, b2, -1});
        sa.served.push_back({w, b2, b1, -1});
        done[u] = 1;
        done[w] = 1;
    }
    for (int b = 0; b < n_bs; ++b) {
        if (bs_busy[b]) continue;
        const int w = nearest_cell_user(b, -1, false, -1);
        if (w < 0) continue;
        bs_busy[b] = 1;
        sa.served.push_back({w, b, -1, -1});
        done[w] = 1;
    }
    detail::finalize(sa, cls.size());
    return sa;
}

inline ServiceAssignment schedule_dynamic(const UserSet& users, const Topology& t,
                                          int k_users, std::uint64_t seed) {
    return schedule_dynamic(classify_users(users, t), t, k_users, seed);
}

// One slot of the static baseline on a precomputed neighbor graph: a random
// matching pairs each BS with one unpaired neighbor, then every BS draws K
// users from its own first-order cell (fewer if the cell is short).  The
// pairing ignores user positions entirely, so a served user's partner BS is
// often not its second-closest.
inline ServiceAssignment assign_static(const DelaunayGraph& g, const Topology& t,
                                       const std::vector<NearestTwo>& cls, int k_users,
                                       std::uint64_t seed) {
    if (k_users < 1) throw std::invalid_argument("assign_static: K must be at least 1");
    if (g.n != static_cast<int>(t.bs.size()))
        throw std::invalid_argument("assign_static: graph was built for a different topology");

    rng::Stream rs(seed, "static_pairs");
    const int n_bs = g.n;
    std::vector<int> order(n_bs);
    std::iota(order.begin(), order.end(), 0);
    detail::shuffle(order, rs);

    std::vector<int> partner(n_bs, -1);
    for (int b : order) {
        if (partner[b] >= 0) continue;
        std::vector<int> open;
        for (int v : g.adjacency[b])
            if (partner[v] < 0) open.push_back(v);
        if (open.empty()) continue;
        const int v = open[rs.below(open.size())];
        partner[b] = v;
        partner[v] = b;
    }

    std::vector<std::vector<int>> cell(n_bs);
    for (int u = 0; u < static_cast<int>(cls.size()); ++u)
        cell[cls[u].nearest].push_back(u);

    ServiceAssignment sa;
    sa.method = ServiceMethod::static_clustering;
    for (int b = 0; b < n_bs; ++b)
        for (int u : detail::sample_k(cell[b], k_users, rs))
            sa.served.push_back({u, b, partner[b], -1});
    detail::finalize(sa, cls.size());
    return sa;
}

inline ServiceAssignment assign_static(const DelaunayGraph& g, const Topology& t,
                                       const UserSet& users, int k_users,
                                       std::uint64_t seed) {
    return assign_static(g, t, classify_users(users, t), k_users, seed);
}

inline ServiceAssignment assign_static(const Topology& t, const UserSet& users, int k_users,
                                       std::uint64_t seed) {
    return assign_static(delaunay(t), t, users, k_users, seed);
}

} // namespace duet
