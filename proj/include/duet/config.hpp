#pragma once

// Experiment configuration files: flat INI-style text with [section]
// headers and key = value lines.  Unknown sections or keys are errors so a
// typo cannot silently fall back to a default.
//
// Schema (every key optional, defaults in parentheses):
//   [scenario] n(3) k(1) beta(4) snr_db(100|inf) l(4) delta_ec(4)
//              k_per_bs(40) mmse(0.5) l_b(200) overhead(false)
//   [grid]     rows(7) cols(7) cell(200) p(100)
//   [run]      replicates(20) drops(1) rounds(25) mc_trials(100000)
//              dummies(5000) seed(1) threads(1) color_budget(-1)
//              edge_threshold(2/3) methods(proposed,dynamic,static)
//              gamma_grid() k_per_bs_grid() snr_grid_db() figure()
//   [topology] bs(x,y; x,y; ...) window(x0,y0,x1,y1)
//              analysis_window(x0,y0,x1,y1)
// A [topology] section with explicit BS coordinates replaces the perturbed
// grid; its analysis window defaults to the stated window.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "duet/simrunner.hpp"
#include "duet/topology.hpp"

namespace duet {

struct ConfigDoc {
    std::map<std::string, std::string> kv; // "section.key" -> trimmed value

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    const std::string& get(const std::string& key) const { return kv.at(key); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_f64(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    return x;
}

inline long long parse_i64(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            const std::string piece = trim(s.substr(start, i - start));
            if (!piece.empty()) out.push_back(piece);
            start = i + 1;
        }
    }
    return out;
}

inline std::vector<double> parse_f64_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& piece : split(v, ',')) out.push_back(parse_f64(key, piece));
    return out;
}

inline std::vector<Point> parse_points(const std::string& key, const std::string& v) {
    std::vector<Point> out;
    for (const auto& pair : split(v, ';')) {
        const auto nums = parse_f64_list(key, pair);
        if (nums.size() != 2)
            throw std::invalid_argument("config: " + key + " entries must be x,y pairs");
        out.push_back({nums[0], nums[1]});
    }
    return out;
}

inline Rect parse_rect(const std::string& key, const std::string& v) {
    const auto nums = parse_f64_list(key, v);
    if (nums.size() != 4)
        throw std::invalid_argument("config: " + key + " must be x0,y0,x1,y1");
    return {nums[0], nums[1], nums[2], nums[3]};
}

} // namespace detail

inline ConfigDoc parse_ini(const std::string& text) {
    ConfigDoc doc;
    std::string section;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        const std::string raw =
            text.substr(start, (nl == std::string::npos ? text.size() : nl) - start);
        start = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(line_no));
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(line_no));
        if (section.empty())
            throw std::invalid_argument("config: key outside any [section] at line " +
                                        std::to_string(line_no));
        const std::string key = section + "." + detail::trim(line.substr(0, eq));
        if (doc.kv.count(key))
            throw std::invalid_argument("config: duplicate key " + key);
        doc.kv[key] = detail::trim(line.substr(eq + 1));
    }
    return doc;
}

// A full run description: the experiment parameters plus an optional
// explicit topology and figure selection.
struct RunConfig {
    ExperimentConfig experiment;
    bool explicit_topology = false;
    Topology topology;
    std::string figure; // empty unless the file names one
};

inline RunConfig config_from_ini(const ConfigDoc& doc) {
    RunConfig rc;
    ExperimentConfig& e = rc.experiment;
    for (const auto& [key, value] : doc.kv) {
        if (key == "scenario.n") e.scenario.n = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "scenario.k") e.scenario.k = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "scenario.beta") e.scenario.beta = detail::parse_f64(key, value);
        else if (key == "scenario.snr_db") e.scenario.snr_db = detail::parse_f64(key, value);
        else if (key == "scenario.l") e.scenario.l = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "scenario.delta_ec")
            e.scenario.delta_ec = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "scenario.k_per_bs")
            e.scenario.k_per_bs = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "scenario.mmse") e.scenario.mmse = detail::parse_f64(key, value);
        else if (key == "scenario.l_b")
            e.scenario.l_b = static_cast<long>(detail::parse_i64(key, value));
        else if (key == "scenario.overhead")
            e.scenario.overhead_enabled = detail::parse_bool(key, value);
        else if (key == "grid.rows") e.grid.rows = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "grid.cols") e.grid.cols = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "grid.cell") e.grid.cell_size = detail::parse_f64(key, value);
        else if (key == "grid.p") e.grid.p = detail::parse_f64(key, value);
        else if (key == "run.replicates")
            e.replicates = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "run.drops") e.drops = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "run.rounds") e.rounds = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "run.mc_trials")
            e.mc_trials = static_cast<long>(detail::parse_i64(key, value));
        else if (key == "run.dummies")
            e.n_dummies = static_cast<std::size_t>(detail::parse_i64(key, value));
        else if (key == "run.seed")
            e.master_seed = static_cast<std::uint64_t>(detail::parse_i64(key, value));
        else if (key == "run.threads") e.threads = static_cast<int>(detail::parse_i64(key, value));
        else if (key == "run.color_budget")
            e.color_budget = static_cast<long>(detail::parse_i64(key, value));
        else if (key == "run.edge_threshold")
            e.edge_user_threshold = detail::parse_f64(key, value);
        else if (key == "run.methods") {
            e.with_proposed = e.with_dynamic = e.with_static = false;
            for (const auto& m : detail::split(value, ',')) {
                if (m == "proposed") e.with_proposed = true;
                else if (m == "dynamic") e.with_dynamic = true;
                else if (m == "static") e.with_static = true;
                else throw std::invalid_argument("config: unknown method '" + m + "'");
            }
        } else if (key == "run.gamma_grid")
            e.gamma_grid = detail::parse_f64_list(key, value);
        else if (key == "run.k_per_bs_grid") {
            e.k_per_bs_grid.clear();
            for (double v : detail::parse_f64_list(key, value))
                e.k_per_bs_grid.push_back(static_cast<int>(v));
        } else if (key == "run.snr_grid_db")
            e.snr_grid_db = detail::parse_f64_list(key, value);
        else if (key == "run.figure") {
            if (value != "fig5" && value != "fig6" && value != "fig8" && value != "fig9")
                throw std::invalid_argument("config: unknown figure '" + value + "'");
            rc.figure = value;
        } else if (key == "topology.bs") {
            rc.topology.bs = detail::parse_points(key, value);
            rc.explicit_topology = true;
        } else if (key == "topology.window")
            rc.topology.window = detail::parse_rect(key, value);
        else if (key == "topology.analysis_window")
            rc.topology.analysis_window = detail::parse_rect(key, value);
        else
            throw std::invalid_argument("config: unknown key " + key);
    }
    if (rc.explicit_topology) {
        if (rc.topology.bs.size() < 2)
            throw std::invalid_argument("config: explicit topology needs at least 2 BSs");
        if (rc.topology.window.width() <= 0.0 || rc.topology.window.height() <= 0.0)
            throw std::invalid_argument("config: explicit topology needs a window");
        if (rc.topology.analysis_window.width() <= 0.0 ||
            rc.topology.analysis_window.height() <= 0.0)
            rc.topology.analysis_window = rc.topology.window;
        rc.topology.generator = "explicit";
    } else if (doc.has("topology.window") || doc.has("topology.analysis_window")) {
        throw std::invalid_argument("config: [topology] windows require explicit bs coordinates");
    }
    return rc;
}

} // namespace duet
