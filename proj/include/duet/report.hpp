#pragma once

// Minimal SVG line charts for result tables.  The CSV stays the source of
// truth; these plots exist so a run can be eyeballed without a plotting
// stack.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "duet/simrunner.hpp"

namespace duet {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> pts;
};

// rows grouped by method in first-appearance order, points sorted by x
inline std::vector<ChartSeries> chart_series(const ResultTable& table) {
    std::vector<ChartSeries> out;
    std::map<std::string, std::size_t> index;
    for (const auto& r : table.rows) {
        const auto it = index.find(r.method);
        if (it == index.end()) {
            index[r.method] = out.size();
            out.push_back({r.method, {{r.x, r.mean}}});
        } else {
            out[it->second].pts.push_back({r.x, r.mean});
        }
    }
    for (auto& s : out) std::sort(s.pts.begin(), s.pts.end());
    return out;
}

namespace detail {

inline std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// largest round value (1/2/5 times a power of ten) not above x
inline double nice_step(double x) {
    const double mag = std::pow(10.0, std::floor(std::log10(x)));
    const double frac = x / mag;
    if (frac >= 5.0) return 5.0 * mag;
    if (frac >= 2.0) return 2.0 * mag;
    return mag;
}

} // namespace detail

inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series, int width = 760,
                                  int height = 460) {
    if (series.empty()) throw std::invalid_argument("svg_line_chart: no series");
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series)
        for (const auto& [x, y] : s.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    if (!(x_min <= x_max)) throw std::invalid_argument("svg_line_chart: no finite points");
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double x_pad = 0.04 * (x_max - x_min);
    const double y_pad = 0.06 * (y_max - y_min);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    const double ml = 64, mr = 16, mt = 34, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto px = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
    const auto py = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    const std::size_t n_colors = sizeof palette / sizeof palette[0];

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << detail::svg_escape(title)
       << "</text>\n";

    // gridlines and tick labels
    const double xs = detail::nice_step((x_max - x_min) / 5.0);
    const double ys = detail::nice_step((y_max - y_min) / 5.0);
    os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-12 * xs; x += xs) {
        os << "<line x1=\"" << detail::svg_num(px(x)) << "\" x2=\"" << detail::svg_num(px(x))
           << "\" y1=\"" << mt << "\" y2=\"" << mt + ph
           << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << detail::svg_num(px(x)) << "\" y=\"" << mt + ph + 16
           << "\" text-anchor=\"middle\">" << detail::svg_num(x) << "</text>\n";
    }
    for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-12 * ys; y += ys) {
        os << "<line y1=\"" << detail::svg_num(py(y)) << "\" y2=\"" << detail::svg_num(py(y))
           << "\" x1=\"" << ml << "\" x2=\"" << ml + pw
           << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << detail::svg_num(py(y) + 4)
           << "\" text-anchor=\"end\">" << detail::svg_num(y) << "</text>\n";
    }
    os << "</g>\n";

    // axes
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << detail::svg_num(pw)
       << "\" height=\"" << detail::svg_num(ph)
       << "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << detail::svg_escape(x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << detail::svg_escape(y_label)
       << "</text>\n";

    // series
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % n_colors];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : series[i].pts)
            if (std::isfinite(x) && std::isfinite(y))
                os << detail::svg_num(px(x)) << "," << detail::svg_num(py(y)) << " ";
        os << "\"/>\n";
        for (const auto& [x, y] : series[i].pts)
            if (std::isfinite(x) && std::isfinite(y))
                os << "<circle cx=\"" << detail::svg_num(px(x)) << "\" cy=\""
                   << detail::svg_num(py(y)) << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
    }

    // legend, top right of the plot area
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double ly = mt + 14 + 15 * static_cast<double>(i);
        const double lx = ml + pw - 150;
        os << "<line x1=\"" << lx << "\" x2=\"" << lx + 18 << "\" y1=\"" << ly << "\" y2=\"" << ly
           << "\" stroke=\"" << palette[i % n_colors] << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << lx + 23 << "\" y=\"" << ly + 4 << "\">"
           << detail::svg_escape(series[i].label) << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

} // namespace duet
