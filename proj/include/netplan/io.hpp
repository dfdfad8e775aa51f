#ifndef NETPLAN_IO_HPP
#define NETPLAN_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "netplan/demand.hpp"
#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"
#include "netplan/planner.hpp"

namespace netplan {

// Shortest round-trippable decimal representation.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    return in;
}

// --- topology -----------------------------------------------------------

inline void write_topology_csv(const std::filesystem::path& path, const Topology& topo) {
    auto out = open_output(path);
    out << "site_index,x,y,weight\n";
    for (int l = 0; l < topo.num_sites(); ++l)
        out << l << ',' << fmt_double(topo.sites[l].x) << ',' << fmt_double(topo.sites[l].y) << ','
            << fmt_double(topo.weights[l]) << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

inline void write_sites_csv(const std::filesystem::path& path, std::span<const Point> sites) {
    auto out = open_output(path);
    out << "site_index,x,y,weight\n";
    for (std::size_t l = 0; l < sites.size(); ++l)
        out << l << ',' << fmt_double(sites[l].x) << ',' << fmt_double(sites[l].y) << ",0\n";
    if (!out) throw io_error("write failed: " + path.string());
}

struct SiteList {
    std::vector<Point> sites;
    std::vector<double> weights;
};

inline SiteList read_sites_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    SiteList out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("site_index", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 3) throw validation_error("sites CSV: bad row: " + line);
        try {
            out.sites.push_back({std::stod(fields[1]), std::stod(fields[2])});
            out.weights.push_back(fields.size() > 3 ? std::stod(fields[3]) : 0.0);
        } catch (const std::exception&) {
            throw validation_error("sites CSV: bad number in row: " + line);
        }
    }
    if (out.sites.empty()) throw validation_error("sites CSV: no sites in " + path.string());
    return out;
}

// Row-major integer serving map with a one-line `nx ny` header.
inline void write_assignment_grid(const std::filesystem::path& path, const Topology& topo) {
    auto out = open_output(path);
    out << topo.grid.nx << ' ' << topo.grid.ny << '\n';
    for (int iy = 0; iy < topo.grid.ny; ++iy) {
        for (int ix = 0; ix < topo.grid.nx; ++ix)
            out << topo.assignment[topo.grid.index(ix, iy)] << (ix + 1 < topo.grid.nx ? ' ' : '\n');
    }
    if (!out) throw io_error("write failed: " + path.string());
}

// --- density raster -----------------------------------------------------
// Header: nx ny x_min x_max y_min y_max, then row-major nonnegative values.

inline DensityField read_density_raster(const std::filesystem::path& path) {
    auto in = open_input(path);
    int nx = 0, ny = 0;
    double x0, x1, y0, y1;
    if (!(in >> nx >> ny >> x0 >> x1 >> y0 >> y1))
        throw validation_error("density raster: bad header in " + path.string());
    std::vector<double> vals(static_cast<std::size_t>(nx) * ny);
    for (double& v : vals)
        if (!(in >> v)) throw validation_error("density raster: truncated values in " + path.string());
    return DensityField::raster(RectDomain(x0, x1, y0, y1), nx, ny, std::move(vals));
}

inline void write_density_raster(const std::filesystem::path& path, const RasterGrid& grid,
                                 std::span<const double> values) {
    if (static_cast<int>(values.size()) != grid.size())
        throw validation_error("density raster: value count mismatch");
    auto out = open_output(path);
    out << grid.nx << ' ' << grid.ny << ' ' << fmt_double(grid.domain.x_min) << ' '
        << fmt_double(grid.domain.x_max) << ' ' << fmt_double(grid.domain.y_min) << ' '
        << fmt_double(grid.domain.y_max) << '\n';
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            out << fmt_double(values[grid.index(ix, iy)]) << (ix + 1 < grid.nx ? ' ' : '\n');
    if (!out) throw io_error("write failed: " + path.string());
}

// --- vectors ------------------------------------------------------------

inline void write_shares_csv(const std::filesystem::path& path, const DemandShare& share) {
    auto out = open_output(path);
    out << "cell_index,share,fraction\n";
    for (std::size_t l = 0; l < share.per_cell.size(); ++l)
        out << l << ',' << fmt_double(share.per_cell[l]) << ','
            << fmt_double(share.per_cell[l] / share.volume) << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

inline void write_vector_csv(const std::filesystem::path& path, const std::string& column,
                             std::span<const double> values) {
    auto out = open_output(path);
    out << "cell_index," << column << '\n';
    for (std::size_t l = 0; l < values.size(); ++l)
        out << l << ',' << fmt_double(values[l]) << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

inline void write_convergence_csv(const std::filesystem::path& path,
                                  std::span<const ConvergenceRow> log) {
    auto out = open_output(path);
    out << "iteration,max_share,min_share,cov,delta\n";
    for (const ConvergenceRow& row : log)
        out << row.iteration << ',' << fmt_double(row.max_share) << ',' << fmt_double(row.min_share)
            << ',' << fmt_double(row.cov) << ',' << fmt_double(row.delta) << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

} // namespace netplan

#endif
