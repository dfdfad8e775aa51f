#ifndef NETPLAN_GEOMETRY_HPP
#define NETPLAN_GEOMETRY_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "netplan/errors.hpp"

namespace netplan {

struct Point {
    double x{0.0};
    double y{0.0};
};

// Axis-aligned rectangle in planning units.
struct RectDomain {
    double x_min, x_max, y_min, y_max;

    RectDomain(double x0, double x1, double y0, double y1)
        : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
        if (!(x_max > x_min) || !(y_max > y_min))
            throw validation_error("RectDomain: requires x_max > x_min and y_max > y_min");
    }

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double diagonal() const { return std::hypot(width(), height()); }
    Point center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

    bool contains(Point p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
};

// Uniform raster of area elements over a rectangle. Element index a is
// row-major: a = iy*nx + ix, with the element center used for all integrals.
struct RasterGrid {
    RectDomain domain;
    int nx, ny;

    RasterGrid(RectDomain d, int nx_, int ny_) : domain(d), nx(nx_), ny(ny_) {
        if (nx < 2 || ny < 2)
            throw validation_error("RasterGrid: nx and ny must both be >= 2");
    }

    double dx() const { return domain.width() / nx; }
    double dy() const { return domain.height() / ny; }
    double cell_area() const { return dx() * dy(); }
    int size() const { return nx * ny; }

    int index(int ix, int iy) const { return iy * nx + ix; }

    Point center(int a) const {
        const int iy = a / nx;
        const int ix = a % nx;
        return {domain.x_min + (ix + 0.5) * dx(), domain.y_min + (iy + 0.5) * dy()};
    }
};

// L generator sites with additive power-diagram weights and the per-element
// serving assignment over a raster grid.
struct Topology {
    RasterGrid grid;
    std::vector<Point> sites;
    std::vector<double> weights;
    std::vector<int> assignment; // size grid.size(), values in [0, L)

    int num_sites() const { return static_cast<int>(sites.size()); }
};

// Power-Voronoi assignment with the additive plain-distance metric:
// each element joins the site minimizing ||a - a_l|| - w_l.
// Ties break toward the lowest site index.
inline Topology assign_power_voronoi(std::vector<Point> sites, std::vector<double> weights,
                                     const RasterGrid& grid) {
    if (sites.empty())
        throw validation_error("assign_power_voronoi: empty site list");
    if (sites.size() != weights.size())
        throw validation_error("assign_power_voronoi: |sites| != |weights|");
    for (std::size_t l = 0; l < sites.size(); ++l)
        if (!grid.domain.contains(sites[l]))
            throw validation_error("assign_power_voronoi: site " + std::to_string(l) +
                                   " lies outside the domain");

    const int L = static_cast<int>(sites.size());
    const int A = grid.size();
    std::vector<int> assignment(A, 0);
    for (int a = 0; a < A; ++a) {
        const Point c = grid.center(a);
        int best = 0;
        double best_score = std::hypot(c.x - sites[0].x, c.y - sites[0].y) - weights[0];
        for (int l = 1; l < L; ++l) {
            const double score = std::hypot(c.x - sites[l].x, c.y - sites[l].y) - weights[l];
            if (score < best_score) {
                best_score = score;
                best = l;
            }
        }
        assignment[a] = best;
    }
    return Topology{grid, std::move(sites), std::move(weights), std::move(assignment)};
}

// Demand-weighted centroid of every cell. `delta` holds normalized per-element
// demand masses aligned with the topology grid. A cell with zero demand mass
// keeps its current generator.
inline std::vector<Point> mass_centroids(const Topology& topo, std::span<const double> delta) {
    if (static_cast<int>(delta.size()) != topo.grid.size())
        throw validation_error("mass_centroids: density grid mismatch");
    const int L = topo.num_sites();
    std::vector<double> sx(L, 0.0), sy(L, 0.0), mass(L, 0.0);
    for (int a = 0; a < topo.grid.size(); ++a) {
        const int l = topo.assignment[a];
        const Point c = topo.grid.center(a);
        sx[l] += c.x * delta[a];
        sy[l] += c.y * delta[a];
        mass[l] += delta[a];
    }
    std::vector<Point> centroids(L);
    for (int l = 0; l < L; ++l)
        centroids[l] = mass[l] > 0.0 ? Point{sx[l] / mass[l], sy[l] / mass[l]} : topo.sites[l];
    return centroids;
}

// Element indices grouped by serving cell.
inline std::vector<std::vector<int>> cell_elements(const Topology& topo) {
    std::vector<std::vector<int>> cells(topo.num_sites());
    for (int a = 0; a < topo.grid.size(); ++a)
        cells[topo.assignment[a]].push_back(a);
    return cells;
}

} // namespace netplan

#endif
