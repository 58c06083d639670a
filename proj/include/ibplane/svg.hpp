#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace ibplane::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    std::string color = "#000000";
    bool line = true;
    bool markers = false;
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 520;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

inline std::string escape(const std::string& s) {
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

// Step of 1, 2 or 5 times a power of ten giving about `target` intervals.
inline double nice_step(double span, int target = 5) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace detail

/// Line/marker chart on shared axes with a legend. Axis ranges start at 0
/// and cover every finite point.
inline std::string render(const PlotSpec& spec, const std::vector<Series>& series) {
    double xmax = 0.0, ymax = 0.0;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (std::isfinite(x)) xmax = std::max(xmax, x);
            if (std::isfinite(y)) ymax = std::max(ymax, y);
        }
    const double xstep = detail::nice_step(xmax > 0 ? xmax : 1.0);
    const double ystep = detail::nice_step(ymax > 0 ? ymax : 1.0);
    xmax = std::max(xstep, std::ceil(xmax / xstep - 1e-9) * xstep);
    ymax = std::max(ystep, std::ceil(ymax / ystep - 1e-9) * ystep);

    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + pw * x / xmax; };
    auto py = [&](double y) { return top + ph * (1.0 - y / ymax); };

    using detail::num;
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(spec.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           detail::escape(spec.title) + "</text>\n";

    // Grid, ticks and axes.
    out += "<g stroke=\"#dddddd\">\n";
    for (double x = 0; x <= xmax + 1e-12; x += xstep)
        out += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(x)) + "\" y2=\"" + num(top + ph) + "\"/>\n";
    for (double y = 0; y <= ymax + 1e-12; y += ystep)
        out += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" + num(py(y)) + "\"/>\n";
    out += "</g>\n";
    for (double x = 0; x <= xmax + 1e-12; x += xstep)
        out += "<text x=\"" + num(px(x)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" + detail::tick_label(x) + "</text>\n";
    for (double y = 0; y <= ymax + 1e-12; y += ystep)
        out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + detail::tick_label(y) + "</text>\n";
    out += "<polyline fill=\"none\" stroke=\"black\" points=\"" + num(left) + "," + num(top) + " " + num(left) + "," +
           num(top + ph) + " " + num(left + pw) + "," + num(top + ph) + "\"/>\n";
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(spec.height - 14.0) + "\" text-anchor=\"middle\">" +
           detail::escape(spec.x_label) + "</text>\n";
    out += "<text transform=\"translate(18," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           detail::escape(spec.y_label) + "</text>\n";

    for (const auto& s : series) {
        out += "<g class=\"series\" data-label=\"" + detail::escape(s.label) + "\">\n";
        if (s.line && s.points.size() > 1) {
            out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\"";
            if (s.dashed) out += " stroke-dasharray=\"6,4\"";
            out += " points=\"";
            for (auto [x, y] : s.points)
                if (std::isfinite(x) && std::isfinite(y)) out += num(px(x)) + "," + num(py(y)) + " ";
            out += "\"/>\n";
        }
        if (s.markers)
            for (auto [x, y] : s.points)
                if (std::isfinite(x) && std::isfinite(y))
                    out += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"4\" fill=\"" + s.color + "\"/>\n";
        out += "</g>\n";
    }

    // Legend, bottom right of the plot area.
    double ly = top + ph - 18.0 * series.size();
    for (const auto& s : series) {
        const double lx = left + pw - 170;
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) + "\" stroke=\"" +
               s.color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\">" + detail::escape(s.label) + "</text>\n";
        ly += 18.0;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace ibplane::svg
