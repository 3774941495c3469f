#include "herit/svg_report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "herit/io.hpp"

namespace herit {

namespace {

constexpr double kWidth = 660.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 500.0;   // plot x range
constexpr double kTop = 48.0, kBottom = 370.0;   // plot y range

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Series {
    std::string estimator;
    std::vector<std::pair<int, double>> points;  // (n, value)
};

double metric_value(const AggregateRow& a, const std::string& metric) {
    if (metric == "se") return a.se;
    if (metric == "bias") return a.bias;
    throw std::invalid_argument("metric must be se or bias");
}

}  // namespace

std::string render_metric_svg(const std::vector<AggregateRow>& aggregates,
                              const std::string& scenario, const std::string& metric) {
    std::vector<Series> series;
    for (const auto& a : aggregates) {
        if (a.scenario != scenario) continue;
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& s) { return s.estimator == a.estimator; });
        if (it == series.end()) {
            series.push_back({a.estimator, {}});
            it = series.end() - 1;
        }
        it->points.emplace_back(a.n, metric_value(a, metric));
    }
    if (series.empty())
        throw std::invalid_argument("no aggregate rows for scenario '" + scenario + "'");
    for (auto& s : series)
        std::sort(s.points.begin(), s.points.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

    int n_lo = series[0].points[0].first, n_hi = n_lo;
    double v_lo = series[0].points[0].second, v_hi = v_lo;
    for (const auto& s : series)
        for (const auto& [n, v] : s.points) {
            n_lo = std::min(n_lo, n);
            n_hi = std::max(n_hi, n);
            v_lo = std::min(v_lo, v);
            v_hi = std::max(v_hi, v);
        }
    if (v_hi - v_lo < 1e-12) {
        const double pad = std::max(0.5 * std::abs(v_lo), 1e-3);
        v_lo -= pad;
        v_hi += pad;
    } else {
        const double pad = 0.06 * (v_hi - v_lo);
        v_lo -= pad;
        v_hi += pad;
    }
    const double n_span = n_hi > n_lo ? static_cast<double>(n_hi - n_lo) : 1.0;
    auto sx = [&](double n) { return kLeft + (n - n_lo) / n_span * (kRight - kLeft); };
    auto sy = [&](double v) { return kBottom - (v - v_lo) / (v_hi - v_lo) * (kBottom - kTop); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" +
           px(kHeight) + "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\">\n";

    out += "<!-- data\nestimator,n,value\n";
    for (const auto& s : series)
        for (const auto& [n, v] : s.points)
            out += s.estimator + "," + std::to_string(n) + "," + format_double(v) + "\n";
    out += "-->\n";

    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + px((kLeft + kRight) / 2) + "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"15\" text-anchor=\"middle\" fill=\"#111111\">" +
           escape_xml(scenario) + ": " + (metric == "se" ? "standard error" : "bias") +
           " vs n</text>\n";

    // Axes
    out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kBottom) + "\" x2=\"" + px(kRight) +
           "\" y2=\"" + px(kBottom) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop) + "\" x2=\"" + px(kLeft) +
           "\" y2=\"" + px(kBottom) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Y ticks
    for (int t = 0; t <= 4; ++t) {
        const double v = v_lo + (v_hi - v_lo) * t / 4.0;
        const double y = sy(v);
        out += "<line x1=\"" + px(kLeft - 4) + "\" y1=\"" + px(y) + "\" x2=\"" + px(kLeft) +
               "\" y2=\"" + px(y) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + px(kLeft - 8) + "\" y=\"" + px(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" "
               "fill=\"#333333\">" + tick_label(v) + "</text>\n";
    }

    // X ticks at each distinct n
    std::vector<int> ns;
    for (const auto& s : series)
        for (const auto& [n, v] : s.points) ns.push_back(n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (int n : ns) {
        const double x = sx(n);
        out += "<line x1=\"" + px(x) + "\" y1=\"" + px(kBottom) + "\" x2=\"" + px(x) +
               "\" y2=\"" + px(kBottom + 4) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + px(x) + "\" y=\"" + px(kBottom + 18) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" "
               "fill=\"#333333\">" + std::to_string(n) + "</text>\n";
    }
    out += "<text x=\"" + px((kLeft + kRight) / 2) + "\" y=\"" + px(kBottom + 38) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
           "fill=\"#333333\">n</text>\n";
    out += "<text x=\"18\" y=\"" + px((kTop + kBottom) / 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
           "fill=\"#333333\" transform=\"rotate(-90 18 " + px((kTop + kBottom) / 2) + ")\">" +
           escape_xml(metric) + "</text>\n";

    // Zero line for signed metrics
    if (v_lo < 0.0 && v_hi > 0.0)
        out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(sy(0.0)) + "\" x2=\"" + px(kRight) +
               "\" y2=\"" + px(sy(0.0)) +
               "\" stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";

    // Series polylines, point markers, legend
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % kPaletteSize];
        std::string pts;
        for (const auto& [n, v] : series[k].points) {
            if (!pts.empty()) pts += " ";
            pts += px(sx(n)) + "," + px(sy(v));
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.8\"/>\n";
        for (const auto& [n, v] : series[k].points)
            out += "<circle cx=\"" + px(sx(n)) + "\" cy=\"" + px(sy(v)) +
                   "\" r=\"2.6\" fill=\"" + color + "\"/>\n";
        const double ly = kTop + 10 + 18 * static_cast<double>(k);
        out += "<line x1=\"" + px(kRight + 14) + "\" y1=\"" + px(ly) + "\" x2=\"" +
               px(kRight + 34) + "\" y2=\"" + px(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"1.8\"/>\n";
        out += "<text x=\"" + px(kRight + 40) + "\" y=\"" + px(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" +
               escape_xml(series[k].estimator) + "</text>\n";
    }

    out += "</svg>\n";
    return out;
}

std::vector<std::string> write_report(const std::vector<AggregateRow>& aggregates,
                                      const std::string& out_dir) {
    if (aggregates.empty()) throw std::invalid_argument("no aggregate rows");
    std::filesystem::create_directories(out_dir);

    std::vector<std::string> scenarios;
    for (const auto& a : aggregates)
        if (std::find(scenarios.begin(), scenarios.end(), a.scenario) == scenarios.end())
            scenarios.push_back(a.scenario);

    auto safe_name = [](const std::string& s) {
        std::string out;
        for (char c : s)
            out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
        return out;
    };

    std::vector<std::string> written;
    for (const auto& scenario : scenarios)
        for (const std::string metric : {"se", "bias"}) {
            const auto path =
                (std::filesystem::path(out_dir) / (safe_name(scenario) + "_" + metric + ".svg"))
                    .string();
            std::ofstream out(path);
            if (!out) throw io_error(path, 0, "cannot open for writing");
            out << render_metric_svg(aggregates, scenario, metric);
            out.flush();
            if (!out) throw io_error(path, 0, "write failed");
            written.push_back(path);
        }
    return written;
}

}  // namespace herit
