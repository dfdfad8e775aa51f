#ifndef NETPLAN_SVG_HPP
#define NETPLAN_SVG_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"
#include "netplan/io.hpp"

namespace netplan {

namespace detail {

struct SvgCanvas {
    std::ofstream out;
    double w, h;

    SvgCanvas(const std::filesystem::path& path, double width, double height)
        : out(open_output(path)), w(width), h(height) {
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
            << "' viewBox='0 0 " << w << ' ' << h << "'>\n";
        out << "<rect width='" << w << "' height='" << h << "' fill='white'/>\n";
    }
    void close() { out << "</svg>\n"; }
};

inline std::string gray(double t) { // t in [0,1], 0 = dark
    const int v = static_cast<int>(std::clamp(t, 0.0, 1.0) * 255.0);
    return "rgb(" + std::to_string(v) + ',' + std::to_string(v) + ',' + std::to_string(v) + ')';
}

} // namespace detail

// Topology map: domain frame, raster cell boundaries, generator dots.
inline void write_topology_svg(const std::filesystem::path& path, const Topology& topo,
                               double pixels_wide = 600.0) {
    const RectDomain& d = topo.grid.domain;
    const double scale = pixels_wide / d.width();
    const double H = d.height() * scale;
    detail::SvgCanvas svg(path, pixels_wide, H);
    const auto px = [&](double x) { return (x - d.x_min) * scale; };
    const auto py = [&](double y) { return H - (y - d.y_min) * scale; };

    // boundary segments between elements served by different cells
    svg.out << "<g stroke='#888' stroke-width='1'>\n";
    const RasterGrid& g = topo.grid;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const int s = topo.assignment[g.index(ix, iy)];
            if (ix + 1 < g.nx && topo.assignment[g.index(ix + 1, iy)] != s) {
                const double x = d.x_min + (ix + 1) * g.dx();
                svg.out << "<line x1='" << px(x) << "' y1='" << py(d.y_min + iy * g.dy())
                        << "' x2='" << px(x) << "' y2='" << py(d.y_min + (iy + 1) * g.dy())
                        << "'/>\n";
            }
            if (iy + 1 < g.ny && topo.assignment[g.index(ix, iy + 1)] != s) {
                const double y = d.y_min + (iy + 1) * g.dy();
                svg.out << "<line x1='" << px(d.x_min + ix * g.dx()) << "' y1='" << py(y)
                        << "' x2='" << px(d.x_min + (ix + 1) * g.dx()) << "' y2='" << py(y)
                        << "'/>\n";
            }
        }
    }
    svg.out << "</g>\n<g fill='#c0392b'>\n";
    for (const Point& s : topo.sites)
        svg.out << "<circle cx='" << px(s.x) << "' cy='" << py(s.y) << "' r='4'/>\n";
    svg.out << "</g>\n<rect x='0' y='0' width='" << svg.w << "' height='" << svg.h
            << "' fill='none' stroke='black'/>\n";
    svg.close();
}

// Simple bar chart, optionally with a horizontal reference line.
inline void write_bars_svg(const std::filesystem::path& path, const std::string& title,
                           std::span<const double> values, double reference = 0.0) {
    const double W = 640, H = 360, m = 40;
    detail::SvgCanvas svg(path, W, H);
    double vmax = reference;
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;
    const double bw = (W - 2 * m) / values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double bh = values[i] / vmax * (H - 2 * m);
        svg.out << "<rect x='" << m + i * bw + 1 << "' y='" << H - m - bh << "' width='" << bw - 2
                << "' height='" << bh << "' fill='#2980b9'/>\n";
    }
    if (reference > 0.0) {
        const double y = H - m - reference / vmax * (H - 2 * m);
        svg.out << "<line x1='" << m << "' y1='" << y << "' x2='" << W - m << "' y2='" << y
                << "' stroke='#c0392b' stroke-dasharray='4 3'/>\n";
    }
    svg.out << "<line x1='" << m << "' y1='" << H - m << "' x2='" << W - m << "' y2='" << H - m
            << "' stroke='black'/>\n";
    svg.out << "<text x='" << m << "' y='24' font-size='16'>" << title << " (max "
            << fmt_double(vmax) << ")</text>\n";
    svg.close();
}

// Spatial per-cell power map on a normalized dB scale from 0 down to -16 dB.
inline void write_power_map_svg(const std::filesystem::path& path, const Topology& topo,
                                std::span<const double> p, double db_floor = -16.0,
                                double pixels_wide = 600.0) {
    if (static_cast<int>(p.size()) != topo.num_sites())
        throw validation_error("power map: power vector size mismatch");
    const double pmax = *std::max_element(p.begin(), p.end());
    std::vector<double> shade(p.size());
    for (std::size_t l = 0; l < p.size(); ++l) {
        const double db = 10.0 * std::log10(p[l] / pmax);
        shade[l] = 1.0 - std::clamp(db / db_floor, 0.0, 1.0); // 1 = bright = 0 dB
    }
    const RectDomain& d = topo.grid.domain;
    const double scale = pixels_wide / d.width();
    const double H = d.height() * scale;
    const double legend = 46.0;
    detail::SvgCanvas svg(path, pixels_wide, H + legend);
    const RasterGrid& g = topo.grid;

    // run-length merged raster rows, downsampled to keep files small
    const int step = std::max(1, g.nx / 200);
    for (int iy = 0; iy < g.ny; iy += step) {
        int run_start = 0;
        int run_cell = topo.assignment[g.index(0, iy)];
        const auto flush = [&](int end_ix) {
            const double x0 = run_start * g.dx() * scale;
            const double x1 = end_ix * g.dx() * scale;
            const double y0 = H - (iy + step) * g.dy() * scale;
            svg.out << "<rect x='" << x0 << "' y='" << std::max(0.0, y0) << "' width='" << x1 - x0
                    << "' height='" << std::min(H, step * g.dy() * scale) + 0.5 << "' fill='"
                    << detail::gray(0.15 + 0.8 * shade[run_cell]) << "'/>\n";
        };
        for (int ix = 1; ix < g.nx; ++ix) {
            const int c = topo.assignment[g.index(ix, iy)];
            if (c != run_cell) {
                flush(ix);
                run_start = ix;
                run_cell = c;
            }
        }
        flush(g.nx);
    }
    svg.out << "<g fill='#c0392b'>\n";
    for (const Point& s : topo.sites)
        svg.out << "<circle cx='" << (s.x - d.x_min) * scale << "' cy='"
                << H - (s.y - d.y_min) * scale << "' r='3'/>\n";
    svg.out << "</g>\n";

    // legend: gradient bins from 0 dB to the floor
    const int bins = 8;
    const double bw = (pixels_wide - 80) / bins;
    for (int b = 0; b < bins; ++b) {
        const double t = 1.0 - static_cast<double>(b) / (bins - 1);
        svg.out << "<rect x='" << 40 + b * bw << "' y='" << H + 14 << "' width='" << bw
                << "' height='14' fill='" << detail::gray(0.15 + 0.8 * t) << "'/>\n";
    }
    svg.out << "<text x='40' y='" << H + 42 << "' font-size='12'>0 dB</text>\n";
    svg.out << "<text x='" << 40 + bins * bw - 40 << "' y='" << H + 42 << "' font-size='12'>"
            << db_floor << " dB</text>\n";
    svg.close();
}

} // namespace netplan

#endif
