#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "roadmodal/error.hpp"

namespace roadmodal::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string colour = "#1f77b4";
    bool dashed = false;
};

struct Panel {
    std::string ylabel;
    bool log_y = false;
    std::vector<Series> series;
};

namespace detail {

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

/// Round tick positions (1, 2 or 5 times a power of ten) covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 5)
{
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step)
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return out;
}

} // namespace detail

/// Stacked panels sharing one x axis, written as a standalone SVG file.
inline void write_plot(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                       const std::vector<Panel>& panels)
{
    using detail::fmt;
    constexpr double width = 720.0, panel_h = 240.0, left = 80.0, right = 20.0, top = 40.0, gap = 50.0;
    const double plot_w = width - left - right;
    const double height = top + static_cast<double>(panels.size()) * (panel_h + gap) + 10.0;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    for (const auto& p : panels)
        for (const auto& s : p.series)
            for (double v : s.x) {
                xmin = std::min(xmin, v);
                xmax = std::max(xmax, v);
            }
    if (!(xmax > xmin))
        throw UsageError("write_plot: empty or degenerate x range");

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) + "\" height=\"" + fmt("%.0f", height) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt("%.1f", width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + detail::escape(title) +
           "</text>\n";

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const Panel& p = panels[k];
        const double y0 = top + static_cast<double>(k) * (panel_h + gap);
        auto ty = [&](double v) { return p.log_y ? std::log10(v) : v; };
        double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
        for (const auto& s : p.series)
            for (double v : s.y)
                if (std::isfinite(v) && (!p.log_y || v > 0.0)) {
                    ymin = std::min(ymin, ty(v));
                    ymax = std::max(ymax, ty(v));
                }
        if (!(ymax > ymin)) {
            ymin = std::isfinite(ymin) ? ymin - 1.0 : 0.0;
            ymax = ymin + 2.0;
        }
        if (p.log_y) {
            ymin = std::floor(ymin);
            ymax = std::ceil(ymax);
        }
        auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * plot_w; };
        auto py = [&](double v) { return y0 + panel_h - (ty(v) - ymin) / (ymax - ymin) * panel_h; };

        out += "<rect x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", y0) + "\" width=\"" + fmt("%.1f", plot_w) + "\" height=\"" +
               fmt("%.1f", panel_h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (double xv : detail::nice_ticks(xmin, xmax, 6)) {
            out += "<text x=\"" + fmt("%.1f", px(xv)) + "\" y=\"" + fmt("%.1f", y0 + panel_h + 14) + "\" text-anchor=\"middle\">" +
                   fmt("%.3g", xv) + "</text>\n";
        }
        std::vector<double> yt_list;
        if (p.log_y)
            for (double d = ymin; d <= ymax; d += 1.0)
                yt_list.push_back(d);
        else
            yt_list = detail::nice_ticks(ymin, ymax, 4);
        for (double yt : yt_list) {
            const double ypix = y0 + panel_h - (yt - ymin) / (ymax - ymin) * panel_h;
            const std::string label = p.log_y ? "1e" + fmt("%.0f", yt) : fmt("%.3g", yt);
            out += "<line x1=\"" + fmt("%.1f", left) + "\" x2=\"" + fmt("%.1f", left + plot_w) + "\" y1=\"" + fmt("%.1f", ypix) +
                   "\" y2=\"" + fmt("%.1f", ypix) + "\" stroke=\"#ddd\"/>\n";
            out += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.1f", ypix + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
        }
        out += "<text x=\"16\" y=\"" + fmt("%.1f", y0 + panel_h / 2) + "\" transform=\"rotate(-90 16 " + fmt("%.1f", y0 + panel_h / 2) +
               ")\" text-anchor=\"middle\">" + detail::escape(p.ylabel) + "</text>\n";

        for (std::size_t si = 0; si < p.series.size(); ++si) {
            const Series& s = p.series[si];
            std::string pts;
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.y[i]) || (p.log_y && s.y[i] <= 0.0))
                    continue;
                pts += fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i])) + " ";
            }
            out += "<polyline fill=\"none\" stroke=\"" + s.colour + "\" stroke-width=\"1.4\"" +
                   (s.dashed ? std::string(" stroke-dasharray=\"6 4\"") : std::string()) + " points=\"" + pts + "\"/>\n";
            const double ly = y0 + 14.0 + 14.0 * static_cast<double>(si);
            out += "<text x=\"" + fmt("%.1f", left + plot_w - 8) + "\" y=\"" + fmt("%.1f", ly) + "\" text-anchor=\"end\" fill=\"" +
                   s.colour + "\">" + detail::escape(s.name) + "</text>\n";
        }
    }
    out += "<text x=\"" + fmt("%.1f", left + plot_w / 2) + "\" y=\"" + fmt("%.1f", height - 6) + "\" text-anchor=\"middle\">" +
           detail::escape(xlabel) + "</text>\n";
    out += "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path.string() + " for writing");
    f << out;
    if (!f)
        throw Error("failed writing " + path.string());
}

} // namespace roadmodal::svg
