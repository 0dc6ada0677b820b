// duet: plan pair-wise BS coordination on a topology, evaluate the analytical
// expressions, and run the Monte-Carlo experiments.  Subcommands:
//   plan      build the cluster plan (Delaunay, edge cut, coloring) and dump it
//   analyze   closed-form rate coverage and ergodic bounds for the tagged link
//   simulate  one of the experiment figures (fig5, fig6, fig8, fig9)
// Exit codes: 0 ok, 1 runtime failure, 2 usage or config error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "duet/duet.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    bool force = false;
    std::string figure;
    double p_override = 0.0;
    bool p_given = false;
};

std::string hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string provenance(const duet::ExperimentConfig& cfg) {
    return "# config_hash=" + hex16(cfg.hash()) + "\n# master_seed=" + std::to_string(cfg.master_seed) + "\n";
}

duet::RunConfig load_run_config(const Options& o) {
    duet::RunConfig rc;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path, std::ios::binary);
        if (!in) throw std::invalid_argument("cannot read config file: " + o.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        rc = duet::config_from_ini(duet::parse_ini(ss.str()));
    }
    if (o.seed_given) rc.experiment.master_seed = o.seed;
    if (o.threads > 0) rc.experiment.threads = o.threads;
    if (o.p_given) rc.experiment.grid.p = o.p_override;
    return rc;
}

// collects artifacts under one directory, refuses silent overwrites, and
// finishes with a manifest naming every file and its content hash
class ArtifactSink {
public:
    ArtifactSink(const std::string& dir, bool force) : dir_(dir), force_(force) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + dir_.string());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        if (fs::exists(path) && !force_)
            throw std::invalid_argument("refusing to overwrite " + path.string() + " (pass --force)");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write on " + path.string());
        entries_.push_back(name + " " + hex16(duet::rng::fnv1a64(content)));
        std::printf("wrote %s\n", path.string().c_str());
    }

    void finish(const std::string& subcommand, const Options& o, const duet::ExperimentConfig& cfg) {
        std::ostringstream os;
        os << provenance(cfg);
        os << "subcommand=" << subcommand << "\n";
        os << "config=" << (o.config_path.empty() ? std::string("(defaults)") : o.config_path) << "\n";
        os << "out=" << dir_.string() << "\n";
        for (const auto& e : entries_) os << "artifact " << e << "\n";
        write("manifest.txt", os.str());
    }

private:
    fs::path dir_;
    bool force_;
    std::vector<std::string> entries_;
};

// SVG is XML, so provenance goes in a leading comment node
std::string svg_with_provenance(const duet::ExperimentConfig& cfg, const std::string& svg) {
    return "<!-- config_hash=" + hex16(cfg.hash()) +
           " master_seed=" + std::to_string(cfg.master_seed) + " -->\n" + svg;
}

struct PlanScene {
    duet::Topology topo;
    duet::DelaunayGraph graph;
    duet::AreaEstimate areas;
    duet::ClusterPlan plan;
};

PlanScene build_plan_scene(const duet::RunConfig& rc) {
    const duet::ExperimentConfig& e = rc.experiment;
    duet::rng::Stream seeder(e.master_seed, "plan", 0);
    const std::uint64_t topo_seed = seeder.next_u64();
    const std::uint64_t area_seed = seeder.next_u64();
    PlanScene sc;
    sc.topo = rc.explicit_topology ? rc.topology : duet::generate_perturbed_grid(e.grid, topo_seed);
    sc.graph = duet::delaunay(sc.topo);
    sc.areas = duet::estimate_region_areas(sc.topo, e.n_dummies, area_seed);
    sc.plan = duet::build_cluster_plan(sc.graph, sc.areas, e.scenario.delta_ec, e.color_budget);
    return sc;
}

int cmd_plan(const Options& o) {
    const duet::RunConfig rc = load_run_config(o);
    const duet::ExperimentConfig& e = rc.experiment;
    e.validate();
    const PlanScene sc = build_plan_scene(rc);
    const std::string head = provenance(e);

    ArtifactSink sink(o.out_dir, o.force);
    {
        std::ostringstream os;
        os << head << "# Delaunay edges over " << sc.graph.n << " BSs: i j\n";
        for (const auto& [i, j] : sc.graph.edges) os << i << " " << j << "\n";
        sink.write("delaunay_edges.txt", os.str());
    }
    {
        std::ostringstream os;
        os << head << "# regions removed by the edge cut: a b est_area\n";
        for (const auto& key : sc.plan.cut_regions)
            os << key.a << " " << key.b << " " << sc.areas.area(key) << "\n";
        sink.write("cut_log.txt", os.str());
    }
    {
        std::ostringstream os;
        os << head << "# coordination patterns: pattern a b\n";
        for (std::size_t ell = 0; ell < sc.plan.patterns.size(); ++ell)
            for (const auto& key : sc.plan.patterns[ell])
                os << ell << " " << key.a << " " << key.b << "\n";
        sink.write("plan.txt", os.str());
    }
    {
        std::ostringstream os;
        os << head;
        os << "n_bs " << sc.plan.n_bs << "\n";
        os << "delaunay_edges " << sc.graph.edges.size() << "\n";
        os << "delta " << sc.graph.max_degree() << "\n";
        os << "delta_ec " << sc.plan.delta_ec << "\n";
        os << "max_degree_after_cut " << sc.plan.max_degree << "\n";
        os << "L " << sc.plan.L << "\n";
        os << "reached_target " << (sc.plan.reached_target ? 1 : 0) << "\n";
        os << "kept_regions " << sc.plan.pattern_of.size() << "\n";
        os << "cut_regions " << sc.plan.cut_regions.size() << "\n";
        os << "coloring_attempts " << sc.plan.coloring_attempts << "\n";
        sink.write("summary.txt", os.str());
    }
    sink.finish("plan", o, e);
    return 0;
}

int cmd_analyze(const Options& o) {
    const duet::RunConfig rc = load_run_config(o);
    duet::ExperimentConfig e = rc.experiment;
    if (e.gamma_grid.empty()) e.gamma_grid = duet::default_gamma_grid();
    if (e.snr_grid_db.empty()) e.snr_grid_db = duet::default_snr_grid_db();
    e.validate();
    const duet::TaggedLink link =
        duet::reference_link(e, rc.explicit_topology ? &rc.topology : nullptr);
    const int n = e.scenario.n;
    const int k = e.scenario.k;
    const double beta = e.scenario.beta;

    ArtifactSink sink(o.out_dir, o.force);
    {
        // interference-limited closed forms on the tagged link
        duet::ResultTable t;
        t.experiment = "analyze_rate_coverage";
        t.config_hash = e.hash();
        t.master_seed = e.master_seed;
        for (double g : e.gamma_grid) {
            t.rows.push_back({g, "exact", duet::rate_coverage_exact(g, link.ratios, beta, n, k), 0.0, 0});
            t.rows.push_back({g, "approx", duet::rate_coverage_approx(g, link.ratios, beta, n, k), 0.0, 0});
        }
        sink.write("rate_coverage.csv", t.csv());
    }
    {
        // ergodic bounds with SNR referenced to the serving distance
        duet::ResultTable t;
        t.experiment = "analyze_ergodic";
        t.config_hash = e.hash();
        t.master_seed = e.master_seed;
        for (double snr_db : e.snr_grid_db) {
            const double snr = std::pow(10.0, snr_db / 10.0);
            t.rows.push_back({snr_db, "lower",
                              duet::ergodic_se_lower(1.0, link.ratios, beta, n, k, snr), 0.0, 0});
            t.rows.push_back({snr_db, "exact",
                              duet::ergodic_se_exact(1.0, link.ratios, beta, n, k, snr), 0.0, 0});
        }
        sink.write("ergodic.csv", t.csv());
    }
    {
        // distance-free worst-case bound under the coordination pre-log
        duet::ResultTable t;
        t.experiment = "analyze_ppp_bound";
        t.config_hash = e.hash();
        t.master_seed = e.master_seed;
        t.rows.push_back({static_cast<double>(e.scenario.l), "ppp_lower",
                          duet::ergodic_se_ppp_lower(beta, n, k, e.scenario.l), 0.0, 0});
        sink.write("ppp_bound.csv", t.csv());
    }
    sink.finish("analyze", o, e);
    return 0;
}

int cmd_simulate(const Options& o) {
    const duet::RunConfig rc = load_run_config(o);
    const std::string figure = !o.figure.empty() ? o.figure : rc.figure;
    if (figure.empty())
        throw std::invalid_argument("simulate: pick a figure with --figure {fig5,fig6,fig8,fig9}");
    duet::ExperimentConfig e = rc.experiment;
    e.validate();

    duet::ResultTable table;
    std::string x_label;
    std::string y_label;
    if (figure == "fig5") {
        table = duet::run_validation_coverage(e);
        x_label = "SE threshold (bits/s/Hz)";
        y_label = "rate coverage";
    } else if (figure == "fig6") {
        table = duet::run_validation_ergodic(e);
        x_label = "SNR at serving distance (dB)";
        y_label = "ergodic SE (bits/s/Hz)";
    } else if (figure == "fig8") {
        table = duet::run_edge_user_throughput(e);
        x_label = "users per BS";
        y_label = "edge-user throughput (bits/s/Hz)";
    } else if (figure == "fig9") {
        table = duet::run_rate_coverage(e);
        x_label = "SE threshold (bits/s/Hz)";
        y_label = "rate coverage";
    } else {
        throw std::invalid_argument("simulate: unknown figure '" + figure + "'");
    }

    ArtifactSink sink(o.out_dir, o.force);
    sink.write(figure + ".csv", table.csv());
    sink.write(figure + ".svg",
               svg_with_provenance(
                   e, duet::svg_line_chart(table.experiment, x_label, y_label,
                                           duet::chart_series(table))));
    sink.finish("simulate", o, e);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pair-wise BS coordination: planning, analysis, simulation"};
    app.require_subcommand(1);

    Options o;
    CLI::App* plan_cmd = app.add_subcommand("plan", "build and dump the coordination plan");
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "evaluate the closed-form expressions");
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "run one experiment figure");

    std::vector<CLI::Option*> seed_opts;
    for (CLI::App* sub : {plan_cmd, analyze_cmd, simulate_cmd}) {
        sub->add_option("--config", o.config_path, "INI-style experiment config");
        sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
        seed_opts.push_back(sub->add_option("--seed", o.seed, "master seed override"));
        sub->add_option("--threads", o.threads, "worker threads (simulation)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--force", o.force, "overwrite existing outputs");
    }
    simulate_cmd->add_option("--figure", o.figure, "fig5 | fig6 | fig8 | fig9")
        ->check(CLI::IsMember({"fig5", "fig6", "fig8", "fig9"}));
    CLI::Option* p_opt =
        simulate_cmd->add_option("--p", o.p_override, "perturbation square side override")
            ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2; // help/version print and exit clean
    }
    for (const CLI::Option* opt : seed_opts)
        if (opt->count() > 0) o.seed_given = true;
    o.p_given = p_opt->count() > 0;

    try {
        if (plan_cmd->parsed()) return cmd_plan(o);
        if (analyze_cmd->parsed()) return cmd_analyze(o);
        return cmd_simulate(o);
    } catch (const std::invalid_argument& err) {
        std::fprintf(stderr, "duet: %s\n", err.what());
        return 2;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "duet: %s\n", err.what());
        return 1;
    }
}
