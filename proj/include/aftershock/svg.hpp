#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace aftershock::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // points instead of a polyline
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace detail

/// Static line chart; non-positive values are dropped on log axes.
inline std::string render(const Chart& chart) {
    constexpr double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
    constexpr std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#8c564b"};
    auto tx = [&](double v) { return chart.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return chart.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!chart.log_x || x > 0) && (!chart.log_y || y > 0);
    };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           detail::escape(chart.title) + "</text>\n";
    out += "<rect x=\"70\" y=\"40\" width=\"" + detail::fmt("%.0f", pw) + "\" height=\"" +
           detail::fmt("%.0f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double gx = left + pw * i / 4.0, gy = top + ph - ph * i / 4.0;
        const std::string lx = chart.log_x ? "1e" + detail::fmt("%.2g", fx) : detail::fmt("%.4g", fx);
        const std::string ly = chart.log_y ? "1e" + detail::fmt("%.2g", fy) : detail::fmt("%.4g", fy);
        out += "<text x=\"" + detail::fmt("%.1f", gx) + "\" y=\"" + detail::fmt("%.1f", top + ph + 16) +
               "\" text-anchor=\"middle\">" + lx + "</text>\n";
        out += "<text x=\"" + detail::fmt("%.1f", left - 6) + "\" y=\"" + detail::fmt("%.1f", gy + 4) +
               "\" text-anchor=\"end\">" + ly + "</text>\n";
    }
    out += "<text x=\"" + detail::fmt("%.1f", left + pw / 2) + "\" y=\"410\" text-anchor=\"middle\">" +
           detail::escape(chart.x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + detail::fmt("%.1f", top + ph / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + detail::fmt("%.1f", top + ph / 2) +
           ")\">" + detail::escape(chart.y_label) + "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = colors[k % colors.size()];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            if (s.markers) {
                out += "<circle cx=\"" + detail::fmt("%.2f", px(s.x[i])) + "\" cy=\"" +
                       detail::fmt("%.2f", py(s.y[i])) + "\" r=\"2\" fill=\"" + color + "\"/>\n";
            } else {
                pts += detail::fmt("%.2f", px(s.x[i])) + "," + detail::fmt("%.2f", py(s.y[i])) + " ";
            }
        }
        if (!pts.empty()) {
            pts.pop_back();
            out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
        out += "<text x=\"" + detail::fmt("%.1f", left + pw - 6) + "\" y=\"" +
               detail::fmt("%.1f", top + 16 + 14.0 * static_cast<double>(k)) + "\" text-anchor=\"end\" fill=\"" +
               color + "\">" + detail::escape(s.name) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace aftershock::svg
