#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "aoi/errors.hpp"
#include "aoi/experiments.hpp"

namespace aoi {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fixed(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string_view colour(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Simulate: return "#1f77b4";
        case EstimatorKind::Exact: return "#d62728";
        case EstimatorKind::Corollary1: return "#2ca02c";
        case EstimatorKind::GM11: return "#9467bd";
        case EstimatorKind::MG11: return "#ff7f0e";
        case EstimatorKind::Corollary2: return "#8c564b";
    }
    return "#000000";
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double x) {
        if (!std::isfinite(x)) return;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }

    // Pads a degenerate or empty range so a single point still lands inside the frame.
    void settle() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(0.5, 0.1 * std::abs(hi));
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string render_svg(const SweepResult& result, std::string_view title, std::string_view x_label) {
    std::vector<EstimatorKind> kinds;
    for (const auto& r : result.rows)
        if (std::find(kinds.begin(), kinds.end(), r.estimator) == kinds.end()) kinds.push_back(r.estimator);

    Range xr, yr;
    for (const auto& r : result.rows) {
        xr.include(r.param);
        if (!r.value) continue;
        const double ci = r.ci && std::isfinite(*r.ci) ? *r.ci : 0.0;
        yr.include(*r.value - ci);
        yr.include(*r.value + ci);
    }
    xr.settle();
    yr.settle();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
           fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(title) + "</text>\n";
    svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) +
           "\" height=\"" + fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        svg += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(kTop + plot_h + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + fixed(xv, 3) + "</text>\n";
        svg += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(py(yv) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + fixed(yv, 3) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 16) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + escape(x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fixed(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" " +
           "transform=\"rotate(-90 18 " + fixed(kTop + plot_h / 2) + ")\">average age</text>\n";

    for (std::size_t s = 0; s < kinds.size(); ++s) {
        const auto kind = kinds[s];
        const auto points = result.series(kind);
        const std::string name{to_string(kind)};
        const std::string col{colour(kind)};
        svg += "<g class=\"series\" data-estimator=\"" + name + "\">\n";

        const bool banded = std::any_of(points.begin(), points.end(), [](const auto& p) {
            return p.second.ci && std::isfinite(*p.second.ci) && *p.second.ci > 0.0;
        });
        if (banded && points.size() > 1) {
            std::string poly;
            for (const auto& [x, row] : points)
                poly += fixed(px(x)) + "," + fixed(py(*row.value + row.ci.value_or(0.0))) + " ";
            for (auto it = points.rbegin(); it != points.rend(); ++it)
                poly += fixed(px(it->first)) + "," + fixed(py(*it->second.value - it->second.ci.value_or(0.0))) + " ";
            svg += "<polygon class=\"ci-band\" points=\"" + poly + "\" fill=\"" + col +
                   "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        }

        std::string line;
        std::vector<double> values;
        for (const auto& [x, row] : points) {
            line += fixed(px(x)) + "," + fixed(py(*row.value)) + " ";
            values.push_back(*row.value);
        }
        if (points.size() > 1)
            svg += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
        for (const auto& [x, row] : points)
            svg += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(*row.value)) + "\" r=\"3\" fill=\"" +
                   col + "\"/>\n";
        if (auto idx = interior_minimum(values)) {
            const auto& [x, row] = points[*idx];
            svg += "<circle class=\"local-min\" cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(*row.value)) +
                   "\" r=\"7\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"><title>local minimum of " +
                   name + " at " + fixed(x, 4) + "</title></circle>\n";
        }
        svg += "</g>\n";

        const double ly = kTop + 14 + 20.0 * static_cast<double>(s);
        const double lx = kLeft + plot_w + 16;
        svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 24) + "\" y2=\"" +
               fixed(ly) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fixed(lx + 30) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"12\">" + name +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_chart(const SweepResult& result, const std::filesystem::path& path, std::string_view title,
                std::string_view x_label) {
    if (result.rows.empty()) throw InvalidArgument("nothing to chart");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << render_svg(result, title, x_label);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace aoi
