#pragma once

// Monte-Carlo experiment drivers.  These wire topology generation, cluster
// planning, user association and the effective-gain fading model into the
// figure-style experiments, and reduce per-replicate results into
// deterministic tables.
//
// Determinism contract: every random quantity inside replicate r is drawn
// from streams derived only from (master_seed, r), replicates are mapped to
// worker threads by index, and replicate means are reduced in replicate
// order, so a (config, master_seed) pair yields a bit-identical ResultTable
// for any --threads value.  Standard errors always come from independent
// replicate (or batch) means, never from pooled per-sample variance.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "duet/analysis.hpp"
#include "duet/association.hpp"
#include "duet/channel.hpp"
#include "duet/delaunay.hpp"
#include "duet/graphcolor.hpp"
#include "duet/regions.hpp"
#include "duet/rng.hpp"
#include "duet/topology.hpp"

namespace duet {

struct ScenarioParams {
    int n = 3;                 // BS antennas
    int k = 1;                 // users per coordinated BS
    double beta = 4.0;         // path loss exponent
    double snr_db = 100.0;     // transmit SNR in dB; +inf = interference limited
    int l = 4;                 // resource pre-log for closed-form expressions;
                               // simulation always uses the plan's own L
    int delta_ec = 4;          // degree target for edge cutting
    int k_per_bs = 40;         // dropped users per BS (coverage runs)
    double mmse = 0.5;         // channel estimation error target
    long l_b = 200;            // frame length in symbols
    bool overhead_enabled = false;

    double snr_linear() const {
        return std::isinf(snr_db) ? snr_db : std::pow(10.0, snr_db / 10.0);
    }
};

// One experiment description.  The grids select the sweep of the particular
// runner (threshold grid for coverage, density grid for edge-user
// throughput, SNR grid for the bound validation); empty grids fall back to
// the figure defaults.  replicates counts independent topology draws, drops
// counts user drops per topology, rounds counts scheduling slots (each with
// fresh fading) per drop.
struct ExperimentConfig {
    ScenarioParams scenario;
    GridSpec grid;
    std::size_t n_dummies = 5000;
    bool with_proposed = true;
    bool with_dynamic = true;
    bool with_static = true;
    int replicates = 20;
    int drops = 1;
    int rounds = 25;
    long mc_trials = 100000;
    std::vector<double> gamma_grid;
    std::vector<int> k_per_bs_grid;
    std::vector<double> snr_grid_db;
    double edge_user_threshold = 2.0 / 3.0;
    std::uint64_t master_seed = 1;
    int threads = 1;
    long color_budget = -1;

    void validate() const {
        if (scenario.k < 1 || scenario.n < 2 * scenario.k)
            throw std::invalid_argument("config: need K >= 1 and N >= 2K");
        if (scenario.beta <= 2.0) throw std::invalid_argument("config: beta must exceed 2");
        if (!(scenario.snr_db > -1e6)) throw std::invalid_argument("config: bad SNR");
        if (scenario.l < 1) throw std::invalid_argument("config: resource pre-log L must be >= 1");
        if (scenario.delta_ec < 1) throw std::invalid_argument("config: delta_ec must be >= 1");
        if (scenario.k_per_bs < 1) throw std::invalid_argument("config: k_per_bs must be >= 1");
        if (scenario.mmse <= 0.0 || scenario.mmse > 1.0)
            throw std::invalid_argument("config: mmse must lie in (0,1]");
        if (scenario.l_b < 1) throw std::invalid_argument("config: frame length must be >= 1");
        if (n_dummies < 100) throw std::invalid_argument("config: too few area dummies");
        if (replicates < 1 || drops < 1 || rounds < 1 || mc_trials < 1)
            throw std::invalid_argument("config: replicate counts must be positive");
        if (!(edge_user_threshold > 0.0 && edge_user_threshold < 1.0))
            throw std::invalid_argument("config: edge user threshold must lie in (0,1)");
        if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
        if (with_dynamic && scenario.k != 1)
            throw std::invalid_argument("config: the dynamic baseline supports only K = 1");
        for (double g : gamma_grid)
            if (!(g >= 0.0)) throw std::invalid_argument("config: gamma grid must be nonnegative");
        for (int v : k_per_bs_grid)
            if (v < 1) throw std::invalid_argument("config: k_per_bs grid must be positive");
    }

    // stable key=value serialization; hashed into result headers
    std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << "n=" << scenario.n << "\nk=" << scenario.k << "\nbeta=" << scenario.beta
           << "\nsnr_db=" << scenario.snr_db << "\nl=" << scenario.l
           << "\ndelta_ec=" << scenario.delta_ec
           << "\nk_per_bs=" << scenario.k_per_bs << "\nmmse=" << scenario.mmse
           << "\nl_b=" << scenario.l_b << "\noverhead=" << scenario.overhead_enabled
           << "\nrows=" << grid.rows << "\ncols=" << grid.cols
           << "\ncell=" << grid.cell_size << "\np=" << grid.p
           << "\ndummies=" << n_dummies << "\nproposed=" << with_proposed
           << "\ndynamic=" << with_dynamic << "\nstatic=" << with_static
           << "\nreplicates=" << replicates << "\ndrops=" << drops
           << "\nrounds=" << rounds << "\nmc_trials=" << mc_trials
           << "\nedge_threshold=" << edge_user_threshold
           << "\ncolor_budget=" << color_budget << "\n";
        os << "gamma_grid=";
        for (double g : gamma_grid) os << g << ";";
        os << "\nk_per_bs_grid=";
        for (int v : k_per_bs_grid) os << v << ";";
        os << "\nsnr_grid_db=";
        for (double v : snr_grid_db) os << v << ";";
        os << "\n";
        return os.str();
    }

    std::uint64_t hash() const { return rng::fnv1a64(canonical()); }
};

struct ResultRow {
    double x = 0.0;
    std::string method;
    double mean = 0.0;
    double se = 0.0;   // standard error of the mean; 0 for closed-form rows
    long n = 0;        // contributing replicates/batches; 0 for closed-form rows
};

struct ResultTable {
    std::string experiment;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::vector<ResultRow> rows;

    // header comments carry provenance so outputs are reproducible from the
    // file alone
    void write_csv(std::ostream& os) const {
        char buf[64];
        os << "# experiment=" << experiment << "\n";
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
        os << "# config_hash=" << buf << "\n";
        os << "# master_seed=" << master_seed << "\n";
        os << "x,method,mean,stderr,n\n";
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g", r.x);
            os << buf << "," << r.method << ",";
            std::snprintf(buf, sizeof buf, "%.17g", r.mean);
            os << buf << ",";
            std::snprintf(buf, sizeof buf, "%.17g", r.se);
            os << buf << "," << r.n << "\n";
        }
    }

    std::string csv() const {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }
};

namespace detail {

// fixed-order reduction of replicate means
struct MeanAccumulator {
    double sum = 0.0;
    double sumsq = 0.0;
    long n = 0;

    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
    double std_error() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - static_cast<double>(n) * m * m) /
                                             static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

// worker threads pull replicate indices from a shared counter; each index
// writes only its own preallocated slot, so results do not depend on the
// thread count
template <class Body>
inline void parallel_replicates(int count, int threads, Body&& body) {
    threads = std::min(std::max(threads, 1), count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

struct Scene {
    Topology topo;
    DelaunayGraph graph;
    ClusterPlan plan;
};

inline Scene build_scene(const ExperimentConfig& cfg, std::uint64_t topo_seed,
                         std::uint64_t area_seed) {
    Scene sc;
    sc.topo = generate_perturbed_grid(cfg.grid, topo_seed);
    sc.graph = delaunay(sc.topo);
    sc.plan = build_cluster_plan(sc.graph, estimate_region_areas(sc.topo, cfg.n_dummies, area_seed),
                                 cfg.scenario.delta_ec, cfg.color_budget);
    return sc;
}

// co-channel interferer universe per pattern: the proposed plan confines
// interference to the pattern's own BS set, while a baseline slot sees the
// whole layout; the serving pair is excluded later, per link
inline std::vector<std::vector<int>> pattern_interferers(const ClusterPlan& plan) {
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(plan.L));
    for (int ell = 0; ell < plan.L; ++ell) out.push_back(plan.pattern_bs[static_cast<std::size_t>(ell)]);
    return out;
}

inline std::vector<std::vector<int>> all_bs_interferers(int n_bs) {
    std::vector<int> all(static_cast<std::size_t>(n_bs));
    for (int b = 0; b < n_bs; ++b) all[static_cast<std::size_t>(b)] = b;
    return {all};
}

// instantaneous SINR of one served user against the co-channel transmitter
// set; gains are drawn through the beamforming pipeline so the simulated
// law is exactly the modeled one
inline double served_sinr(Point u, int serving, int partner, const std::vector<int>& tx,
                          const std::vector<Point>& bs, const ScenarioParams& p,
                          rng::Stream& rs) {
    const double d0 = dist(u, bs[static_cast<std::size_t>(serving)]);
    const double g0 = partner >= 0 ? sample_pair_gain(rs, p.n, p.k)
                                   : sample_solo_gain(rs, p.n, p.k);
    std::vector<std::pair<double, double>> interf;
    interf.reserve(tx.size());
    for (int b : tx) {
        if (b == serving || b == partner) continue;
        interf.push_back({dist(u, bs[static_cast<std::size_t>(b)]) / d0,
                          sample_interference_gain(rs, p.n, p.k)});
    }
    return zf_sinr(g0, interf, p.beta, noise_term(d0, p.beta, p.k, p.snr_linear()));
}

// frame fraction left for data once pilots fit the estimation target; a
// user whose pilots would not fit the frame at all gets zero throughput
// instead of aborting the run
inline double overhead_factor(const ScenarioParams& p, double sinr_val) {
    if (!(sinr_val > 0.0)) return 0.0;
    const double raw = (1.0 / sinr_val) * (1.0 / p.mmse - 1.0);
    const double eta = std::max(1.0, std::floor(raw));
    const double alpha = 2.0 * eta * static_cast<double>(p.n) / static_cast<double>(p.l_b);
    return alpha >= 1.0 ? 0.0 : 1.0 - alpha;
}

} // namespace detail

inline std::vector<double> default_gamma_grid() {
    // 15 SINR thresholds, -10..30 dB, expressed as spectral efficiencies
    std::vector<double> g;
    for (int i = 0; i < 15; ++i) {
        const double s_db = -10.0 + 40.0 * static_cast<double>(i) / 14.0;
        g.push_back(std::log2(1.0 + std::pow(10.0, s_db / 10.0)));
    }
    return g;
}

inline std::vector<double> default_snr_grid_db() {
    std::vector<double> g;
    for (int i = -10; i <= 40; i += 5) g.push_back(static_cast<double>(i));
    return g;
}

// Edge-user sum throughput versus user density (users per BS).  A user is
// an edge user when its two strongest BSs are nearly equidistant
// (d0/d1 > threshold); only served edge users inside the analysis window
// count.  The proposed plan runs a full frame of L patterns and carries the
// 1/L pre-log; the baselines reschedule every slot on one shared resource.
inline ResultTable run_edge_user_throughput(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.k_per_bs_grid.empty()) c.k_per_bs_grid = {5, 10, 20, 40, 60};
    c.validate();
    const ScenarioParams& p = c.scenario;
    const std::size_t nx = c.k_per_bs_grid.size();
    const double thr2 = c.edge_user_threshold * c.edge_user_threshold;

    // slot [r][method][xi] holds the replicate mean of the per-round sum
    struct Slot {
        std::vector<double> prop, dyn, stat;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(c.replicates));

    detail::parallel_replicates(c.replicates, c.threads, [&](int r) {
        rng::Stream seeder(c.master_seed, "edge_replicate", static_cast<std::uint64_t>(r));
        const std::uint64_t topo_seed = seeder.next_u64();
        const std::uint64_t area_seed = seeder.next_u64();
        const auto scene = detail::build_scene(c, topo_seed, area_seed);
        const int n_bs = static_cast<int>(scene.topo.bs.size());
        const auto tx_prop = detail::pattern_interferers(scene.plan);
        const auto tx_all = detail::all_bs_interferers(n_bs);

        Slot& out = slots[static_cast<std::size_t>(r)];
        out.prop.assign(nx, 0.0);
        out.dyn.assign(nx, 0.0);
        out.stat.assign(nx, 0.0);

        for (std::size_t xi = 0; xi < nx; ++xi) {
            const std::size_t n_users =
                static_cast<std::size_t>(c.k_per_bs_grid[xi]) * static_cast<std::size_t>(n_bs);
            double acc_p = 0.0, acc_d = 0.0, acc_s = 0.0;
            for (int d = 0; d < c.drops; ++d) {
                const auto users = drop_users(scene.topo, n_users, seeder.next_u64());
                const auto cls = classify_users(users, scene.topo);
                std::vector<char> tally(users.pos.size(), 0);
                for (std::size_t i = 0; i < users.pos.size(); ++i)
                    tally[i] = cls[i].d_nearest > thr2 * cls[i].d_second &&
                               scene.topo.analysis_window.contains(users.pos[i]);

                const auto user_rate_sum = [&](const ServiceAssignment& sa,
                                               const std::vector<std::vector<int>>& tx,
                                               double prelog, rng::Stream& fad) {
                    double s = 0.0;
                    for (const auto& su : sa.served) {
                        if (!tally[static_cast<std::size_t>(su.user)]) continue;
                        const auto& on = tx[su.pattern >= 0 ? static_cast<std::size_t>(su.pattern) : 0];
                        const double sinr = detail::served_sinr(
                            users.pos[static_cast<std::size_t>(su.user)], su.serving_bs,
                            su.partner_bs, on, scene.topo.bs, p, fad);
                        double rate = prelog * std::log2(1.0 + sinr);
                        if (p.overhead_enabled) rate *= detail::overhead_factor(p, sinr);
                        s += rate;
                    }
                    return s;
                };

                for (int round = 0; round < c.rounds; ++round) {
                    if (c.with_proposed) {
                        const auto sa = associate_proposed(cls, scene.plan, scene.topo, p.k,
                                                           seeder.next_u64());
                        rng::Stream fad(seeder.next_u64(), "fading_prop");
                        acc_p += user_rate_sum(sa, tx_prop, 1.0 / scene.plan.L, fad);
                    }
                    if (c.with_dynamic) {
                        const auto sa = schedule_dynamic(cls, scene.topo, p.k, seeder.next_u64());
                        rng::Stream fad(seeder.next_u64(), "fading_dyn");
                        acc_d += user_rate_sum(sa, tx_all, 1.0, fad);
                    }
                    if (c.with_static) {
                        const auto sa = assign_static(scene.graph, scene.topo, cls, p.k,
                                                      seeder.next_u64());
                        rng::Stream fad(seeder.next_u64(), "fading_stat");
                        acc_s += user_rate_sum(sa, tx_all, 1.0, fad);
                    }
                }
            }
            const double per_round = 1.0 / (static_cast<double>(c.drops) * c.rounds);
            out.prop[xi] = acc_p * per_round;
            out.dyn[xi] = acc_d * per_round;
            out.stat[xi] = acc_s * per_round;
        }
    });

    ResultTable table;
    table.experiment = "edge_user_throughput";
    table.config_hash = c.hash();
    table.master_seed = c.master_seed;
    for (std::size_t xi = 0; xi < nx; ++xi) {
        const auto emit = [&](const char* name, auto pick) {
            detail::MeanAccumulator acc;
            for (const auto& s : slots) acc.add(pick(s)[xi]);
            table.rows.push_back({static_cast<double>(c.k_per_bs_grid[xi]), name, acc.mean(),
                                  acc.std_error(), acc.n});
        };
        if (c.with_proposed) emit("proposed", [](const Slot& s) -> const std::vector<double>& { return s.prop; });
        if (c.with_dynamic) emit("dynamic", [](const Slot& s) -> const std::vector<double>& { return s.dyn; });
        if (c.with_static) emit("static", [](const Slot& s) -> const std::vector<double>& { return s.stat; });
    }
    return table;
}

// Rate coverage of the served users: the empirical probability that a
// selected user's instantaneous spectral efficiency log2(1+SINR) exceeds
// each threshold of the grid.  Users are evaluated only inside the analysis
// window; every method is measured over the users it actually serves.
inline ResultTable run_rate_coverage(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.gamma_grid.empty()) c.gamma_grid = default_gamma_grid();
    c.validate();
    const ScenarioParams& p = c.scenario;
    const std::size_t nx = c.gamma_grid.size();

    struct Slot {
        // replicate coverage per threshold, nan when nothing was served
        std::vector<double> prop, dyn, stat;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(c.replicates));

    detail::parallel_replicates(c.replicates, c.threads, [&](int r) {
        rng::Stream seeder(c.master_seed, "coverage_replicate", static_cast<std::uint64_t>(r));
        const std::uint64_t topo_seed = seeder.next_u64();
        const std::uint64_t area_seed = seeder.next_u64();
        const auto scene = detail::build_scene(c, topo_seed, area_seed);
        const int n_bs = static_cast<int>(scene.topo.bs.size());
        const auto tx_prop = detail::pattern_interferers(scene.plan);
        const auto tx_all = detail::all_bs_interferers(n_bs);

        std::vector<long> hits_p(nx, 0), hits_d(nx, 0), hits_s(nx, 0);
        long eval_p = 0, eval_d = 0, eval_s = 0;

        for (int d = 0; d < c.drops; ++d) {
            const auto users = drop_users(
                scene.topo,
                static_cast<std::size_t>(p.k_per_bs) * static_cast<std::size_t>(n_bs),
                seeder.next_u64());
            const auto cls = classify_users(users, scene.topo);
            std::vector<char> inwin(users.pos.size(), 0);
            for (std::size_t i = 0; i < users.pos.size(); ++i)
                inwin[i] = scene.topo.analysis_window.contains(users.pos[i]);

            const auto tally = [&](const ServiceAssignment& sa,
                                   const std::vector<std::vector<int>>& tx,
                                   std::vector<long>& hits, long& evaluated, rng::Stream& fad) {
                for (const auto& su : sa.served) {
                    if (!inwin[static_cast<std::size_t>(su.user)]) continue;
                    const auto& on = tx[su.pattern >= 0 ? static_cast<std::size_t>(su.pattern) : 0];
                    const double sinr = detail::served_sinr(
                        users.pos[static_cast<std::size_t>(su.user)], su.serving_bs, su.partner_bs,
                        on, scene.topo.bs, p, fad);
                    const double se_bits = std::log2(1.0 + sinr);
                    ++evaluated;
                    for (std::size_t xi = 0; xi < nx; ++xi)
                        if (se_bits > c.gamma_grid[xi]) ++hits[xi];
                }
            };

            for (int round = 0; round < c.rounds; ++round) {
                if (c.with_proposed) {
                    const auto sa = associate_proposed(cls, scene.plan, scene.topo, p.k,
                                                       seeder.next_u64());
                    rng::Stream fad(seeder.next_u64(), "fading_prop");
                    tally(sa, tx_prop, hits_p, eval_p, fad);
                }
                if (c.with_dynamic) {
                    const auto sa = schedule_dynamic(cls, scene.topo, p.k, seeder.next_u64());
                    rng::Stream fad(seeder.next_u64(), "fading_dyn");
                    tally(sa, tx_all, hits_d, eval_d, fad);
                }
                if (c.with_static) {
                    const auto sa = assign_static(scene.graph, scene.topo, cls, p.k,
                                                  seeder.next_u64());
                    rng::Stream fad(seeder.next_u64(), "fading_stat");
                    tally(sa, tx_all, hits_s, eval_s, fad);
                }
            }
        }

        const auto ratio = [&](const std::vector<long>& hits, long evaluated) {
            std::vector<double> out(nx, std::numeric_limits<double>::quiet_NaN());
            if (evaluated > 0)
                for (std::size_t xi = 0; xi < nx; ++xi)
                    out[xi] = static_cast<double>(hits[xi]) / static_cast<double>(evaluated);
            return out;
        };
        Slot& out = slots[static_cast<std::size_t>(r)];
        out.prop = ratio(hits_p, eval_p);
        out.dyn = ratio(hits_d, eval_d);
        out.stat = ratio(hits_s, eval_s);
    });

    ResultTable table;
    table.experiment = "rate_coverage";
    table.config_hash = c.hash();
    table.master_seed = c.master_seed;
    for (std::size_t xi = 0; xi < nx; ++xi) {
        const auto emit = [&](const char* name, auto pick) {
            detail::MeanAccumulator acc;
            for (const auto& s : slots) {
                const double v = pick(s)[xi];
                if (!std::isnan(v)) acc.add(v); // replicates with no served users are skipped
            }
            table.rows.push_back({c.gamma_grid[xi], name, acc.mean(), acc.std_error(), acc.n});
        };
        if (c.with_proposed) emit("proposed", [](const Slot& s) -> const std::vector<double>& { return s.prop; });
        if (c.with_dynamic) emit("dynamic", [](const Slot& s) -> const std::vector<double>& { return s.dyn; });
        if (c.with_static) emit("static", [](const Slot& s) -> const std::vector<double>& { return s.stat; });
    }
    return table;
}

// the validation runs measure one tagged link inside a seeded plan: a user
// placed between the two BSs of a kept region, interfered by the other BSs
// of that region's pattern
struct TaggedLink {
    double d0 = 0.0;            // serving distance
    std::vector<double> ratios; // interferer distances over d0
    int pattern = -1;
    RegionKey region{0, 1};
};

namespace detail {

inline TaggedLink tagged_link(const Scene& scene) {
    const Point center{0.5 * (scene.topo.window.x0 + scene.topo.window.x1),
                       0.5 * (scene.topo.window.y0 + scene.topo.window.y1)};
    // kept regions by distance of their BS-pair midpoint to the window
    // center, so the tagged link sits in the bulk of the layout
    std::vector<std::pair<double, RegionKey>> order;
    for (const auto& kv : scene.plan.pattern_of) {
        const RegionKey key = kv.first;
        const Point a = scene.topo.bs[static_cast<std::size_t>(key.a)];
        const Point b = scene.topo.bs[static_cast<std::size_t>(key.b)];
        order.push_back({dist2(Point{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, center), key});
    }
    std::sort(order.begin(), order.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (const auto& cand : order) {
        const RegionKey key = cand.second;
        const Point a = scene.topo.bs[static_cast<std::size_t>(key.a)];
        const Point b = scene.topo.bs[static_cast<std::size_t>(key.b)];
        const Point q{a.x + 0.45 * (b.x - a.x), a.y + 0.45 * (b.y - a.y)};
        const auto nt = nearest_two(q, scene.topo.bs);
        if (nt.key() != key) continue; // q fell outside the pair's region
        TaggedLink link;
        link.region = key;
        link.pattern = scene.plan.pattern_of.at(key);
        link.d0 = dist(q, a);
        for (int bs_id : scene.plan.pattern_bs[static_cast<std::size_t>(link.pattern)]) {
            if (bs_id == key.a || bs_id == key.b) continue;
            link.ratios.push_back(dist(q, scene.topo.bs[static_cast<std::size_t>(bs_id)]) / link.d0);
        }
        return link;
    }
    throw std::runtime_error("tagged_link: no kept region contains its midpoint probe");
}

// empirical coverage of the tagged link over the threshold grid, batched
// for honest standard errors
inline void mc_link_coverage(const TaggedLink& link, const ScenarioParams& p, int n, int k,
                             long trials, std::uint64_t seed, const std::vector<double>& gammas,
                             std::vector<MeanAccumulator>& acc) {
    const int batches = 20;
    acc.assign(gammas.size(), {});
    const double noise = noise_term(link.d0, p.beta, k, p.snr_linear());
    std::vector<double> atts;
    for (const double r : link.ratios) atts.push_back(std::pow(r, -p.beta));
    for (int b = 0; b < batches; ++b) {
        rng::Stream rs(seed, "val_coverage", static_cast<std::uint64_t>(b));
        const long batch_trials = trials / batches + (b < trials % batches ? 1 : 0);
        std::vector<long> hits(gammas.size(), 0);
        std::vector<std::pair<double, double>> interf(link.ratios.size());
        for (long t = 0; t < batch_trials; ++t) {
            const double g0 = sample_pair_gain(rs, n, k);
            for (std::size_t j = 0; j < atts.size(); ++j)
                interf[j] = {atts[j], sample_interference_gain(rs, n, k)};
            const double se_bits = std::log2(1.0 + zf_sinr_attenuated(g0, interf, noise));
            for (std::size_t xi = 0; xi < gammas.size(); ++xi)
                if (se_bits > gammas[xi]) ++hits[xi];
        }
        for (std::size_t xi = 0; xi < gammas.size(); ++xi)
            acc[xi].add(static_cast<double>(hits[xi]) / static_cast<double>(batch_trials));
    }
}

} // namespace detail

// The tagged link the validation runs measure, exposed for analytical
// tooling. Built from the seeded grid unless an explicit topology is given;
// either way the seeding matches run_validation_* so the links coincide.
inline TaggedLink reference_link(const ExperimentConfig& cfg, const Topology* explicit_topo = nullptr) {
    rng::Stream seeder(cfg.master_seed, "validation", 0);
    const std::uint64_t topo_seed = seeder.next_u64();
    const std::uint64_t area_seed = seeder.next_u64();
    detail::Scene scene;
    if (explicit_topo != nullptr) {
        scene.topo = *explicit_topo;
        scene.graph = delaunay(scene.topo);
        const auto areas = estimate_region_areas(scene.topo, cfg.n_dummies, area_seed);
        scene.plan = build_cluster_plan(scene.graph, areas, cfg.scenario.delta_ec, cfg.color_budget);
    } else {
        scene = detail::build_scene(cfg, topo_seed, area_seed);
    }
    return detail::tagged_link(scene);
}

// Validation of the closed-form coverage: one seeded 49-BS plan, a tagged
// link in a central kept region, and for each antenna profile both the
// approximate closed form (interference limited) and a Monte-Carlo estimate
// through the full beamforming pipeline at the configured SNR.
inline ResultTable run_validation_coverage(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.gamma_grid.empty()) c.gamma_grid = default_gamma_grid();
    c.validate();

    rng::Stream seeder(c.master_seed, "validation", 0);
    const std::uint64_t topo_seed = seeder.next_u64();
    const std::uint64_t area_seed = seeder.next_u64();
    const auto scene = detail::build_scene(c, topo_seed, area_seed);
    const auto link = detail::tagged_link(scene);

    ResultTable table;
    table.experiment = "validation_coverage";
    table.config_hash = c.hash();
    table.master_seed = c.master_seed;

    const std::vector<std::pair<int, int>> profiles = {{3, 1}, {4, 2}, {10, 5}};
    for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        const auto [n, k] = profiles[pi];
        const std::string suffix = "_n" + std::to_string(n) + "k" + std::to_string(k);
        for (double g : c.gamma_grid)
            table.rows.push_back(
                {g, "approx" + suffix,
                 rate_coverage_approx(g, link.ratios, c.scenario.beta, n, k), 0.0, 0});
        std::vector<detail::MeanAccumulator> acc;
        detail::mc_link_coverage(link, c.scenario, n, k, c.mc_trials, seeder.next_u64(),
                                 c.gamma_grid, acc);
        for (std::size_t xi = 0; xi < c.gamma_grid.size(); ++xi)
            table.rows.push_back({c.gamma_grid[xi], "mc" + suffix, acc[xi].mean(),
                                  acc[xi].std_error(), acc[xi].n});
    }
    return table;
}

// Validation of the ergodic bound: the tagged link swept over SNR, with the
// simulated mean spectral efficiency, the closed-form lower bound and the
// exact integral expression side by side.  The SNR axis is referenced to
// the serving distance (d0 normalized to 1, interferer ratios kept), so the
// sweep covers the noise-limited to interference-limited transition
// regardless of the layout's physical scale.
inline ResultTable run_validation_ergodic(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.snr_grid_db.empty()) c.snr_grid_db = default_snr_grid_db();
    c.validate();
    const int n = c.scenario.n;
    const int k = c.scenario.k;

    rng::Stream seeder(c.master_seed, "validation", 0);
    const std::uint64_t topo_seed = seeder.next_u64();
    const std::uint64_t area_seed = seeder.next_u64();
    const auto scene = detail::build_scene(c, topo_seed, area_seed);
    auto link = detail::tagged_link(scene);
    link.d0 = 1.0;

    ResultTable table;
    table.experiment = "validation_ergodic";
    table.config_hash = c.hash();
    table.master_seed = c.master_seed;

    const int batches = 20;
    std::vector<double> atts;
    for (const double r : link.ratios) atts.push_back(std::pow(r, -c.scenario.beta));
    for (double snr_db : c.snr_grid_db) {
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double noise = noise_term(link.d0, c.scenario.beta, k, snr);
        detail::MeanAccumulator acc;
        std::vector<std::pair<double, double>> interf(link.ratios.size());
        for (int b = 0; b < batches; ++b) {
            rng::Stream rs(seeder.next_u64(), "val_ergodic");
            const long batch_trials = c.mc_trials / batches + (b < c.mc_trials % batches ? 1 : 0);
            double sum = 0.0;
            for (long t = 0; t < batch_trials; ++t) {
                const double g0 = sample_pair_gain(rs, n, k);
                for (std::size_t j = 0; j < atts.size(); ++j)
                    interf[j] = {atts[j], sample_interference_gain(rs, n, k)};
                sum += std::log2(1.0 + zf_sinr_attenuated(g0, interf, noise));
            }
            acc.add(sum / static_cast<double>(batch_trials));
        }
        table.rows.push_back({snr_db, "mc", acc.mean(), acc.std_error(), acc.n});
        table.rows.push_back({snr_db, "lower",
                              ergodic_se_lower(link.d0, link.ratios, c.scenario.beta, n, k, snr),
                              0.0, 0});
        table.rows.push_back({snr_db, "exact",
                              ergodic_se_exact(link.d0, link.ratios, c.scenario.beta, n, k, snr),
                              0.0, 0});
    }
    return table;
}

inline ResultTable run_validation(const ExperimentConfig& cfg) {
    ResultTable table = run_validation_coverage(cfg);
    const ResultTable ergodic = run_validation_ergodic(cfg);
    table.experiment = "validation";
    table.rows.insert(table.rows.end(), ergodic.rows.begin(), ergodic.rows.end());
    return table;
}

// Mean spectral efficiency of the nearest-pair cluster at the typical user
// of a unit-density Poisson field: the two closest BSs coordinate, every BS
// beyond the second-closest interferes, interference limited.  Used to
// check the density-free ergodic lower bound.
struct PppWorstCase {
    double mean = 0.0;
    double se = 0.0;
    long n = 0;
};

inline PppWorstCase ppp_worst_case_se(double beta, int n, int k, int prelog_l, long trials,
                                      std::uint64_t seed, double mean_bs = 128.0) {
    if (beta <= 2.0 || k < 1 || n < 2 * k || prelog_l < 1 || trials < 1 || mean_bs < 8.0)
        throw std::invalid_argument("ppp_worst_case_se: bad parameters");
    const int batches = 20;
    const double radius = std::sqrt(mean_bs / 3.14159265358979323846);
    detail::MeanAccumulator acc;
    for (int b = 0; b < batches; ++b) {
        rng::Stream rs(seed, "ppp_worst", static_cast<std::uint64_t>(b));
        const long batch_trials = trials / batches + (b < trials % batches ? 1 : 0);
        double sum = 0.0;
        std::vector<double> radii;
        for (long t = 0; t < batch_trials; ++t) {
            std::size_t m = 0;
            while ((m = rs.poisson(mean_bs)) < 3) {
            } // needs a pair plus one interferer; redraw is astronomically rare
            radii.resize(m);
            for (auto& rad : radii) rad = radius * std::sqrt(rs.uniform_pos());
            std::sort(radii.begin(), radii.end());
            const double g0 = sample_pair_gain(rs, n, k);
            double denom = 0.0;
            for (std::size_t i = 2; i < m; ++i)
                denom += std::pow(radii[i] / radii[0], -beta) * sample_interference_gain(rs, n, k);
            sum += std::log2(1.0 + g0 / denom) / static_cast<double>(prelog_l);
        }
        acc.add(sum / static_cast<double>(batch_trials));
    }
    return {acc.mean(), acc.std_error(), acc.n};
}

} // namespace duet
