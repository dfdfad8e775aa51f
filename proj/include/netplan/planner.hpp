#ifndef NETPLAN_PLANNER_HPP
#define NETPLAN_PLANNER_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "netplan/demand.hpp"
#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"

namespace netplan {

struct PlannerParams {
    int lloyd_iterations = 200;   // N
    double weight_step = 0.0;     // initial decrement; < 0, 0 selects the default
    double weight_decay = 0.95;   // multiplier applied to the decrement every period
    int decay_period = 100;       // iterations between decrement reductions
    double cov_threshold = 0.01;  // stop when CoV(share) drops below this
    int max_outer_iterations = 2000;
    std::uint64_t rng_seed = 1;
    bool update_sites = true;     // false: weight adjustment only (fixed/existing networks)

    static double default_weight_step(const RectDomain& d) { return -0.003 * d.diagonal(); }

    void validate(const RectDomain& domain) {
        if (weight_step == 0.0) weight_step = default_weight_step(domain);
        if (!(weight_step < 0.0)) throw validation_error("planner: weight_step must be < 0");
        if (!(weight_decay > 0.0 && weight_decay < 1.0))
            throw validation_error("planner: weight_decay must lie in (0, 1)");
        if (decay_period < 1) throw validation_error("planner: decay_period must be >= 1");
        if (!(cov_threshold > 0.0)) throw validation_error("planner: cov_threshold must be > 0");
        if (lloyd_iterations < 0) throw validation_error("planner: lloyd_iterations must be >= 0");
        if (max_outer_iterations < 1)
            throw validation_error("planner: max_outer_iterations must be >= 1");
    }
};

struct ConvergenceRow {
    int iteration;
    double max_share;
    double min_share;
    double cov;
    double delta;
};

struct PlanResult {
    Topology topology;
    bool converged;
    int iterations;
    double final_cov;
    std::vector<ConvergenceRow> log;
};

inline std::vector<Point> random_sites(const RectDomain& domain, int count, std::uint64_t seed) {
    if (count < 1) throw validation_error("random_sites: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(domain.x_min, domain.x_max);
    std::uniform_real_distribution<double> uy(domain.y_min, domain.y_max);
    std::vector<Point> sites(count);
    for (Point& s : sites) {
        s.x = ux(rng);
        s.y = uy(rng);
    }
    return sites;
}

// Density-weighted Lloyd iterations: standard Voronoi assignment followed by
// replacing each generator with its mass centroid, repeated `iterations` times.
inline Topology cva(std::vector<Point> sites, std::span<const double> delta,
                    const RasterGrid& grid, int iterations) {
    std::vector<double> weights(sites.size(), 0.0);
    Topology topo = assign_power_voronoi(std::move(sites), weights, grid);
    for (int i = 0; i < iterations; ++i) {
        std::vector<Point> centroids = mass_centroids(topo, delta);
        topo = assign_power_voronoi(std::move(centroids), weights, grid);
    }
    return topo;
}

// Lloyd baseline followed by power-Voronoi weight adjustment: each iteration
// moves generators to their centroids, re-assigns with the current weights,
// and decrements the weight of the cell carrying the most demand, until the
// coefficient of variation of the share drops below the threshold.
inline PlanResult plan(std::vector<Point> initial_sites, std::span<const double> delta,
                       const RasterGrid& grid, PlannerParams params, double volume = 1.0) {
    if (initial_sites.size() < 2) throw validation_error("plan: needs at least 2 sites");
    params.validate(grid.domain);

    Topology topo = cva(std::move(initial_sites), delta, grid, params.lloyd_iterations);
    std::vector<double> weights(topo.num_sites(), 0.0);
    double delta_w = params.weight_step;

    PlanResult result{topo, false, 0, 0.0, {}};
    double best_cov = std::numeric_limits<double>::infinity();

    for (int i = 1; i <= params.max_outer_iterations; ++i) {
        std::vector<Point> sites =
            params.update_sites ? mass_centroids(topo, delta) : topo.sites;
        topo = assign_power_voronoi(std::move(sites), weights, grid);
        DemandShare share = demand_share(topo, delta, volume);
        const auto [mn, mx] = std::minmax_element(share.per_cell.begin(), share.per_cell.end());
        const double c = cov(share.per_cell);
        result.log.push_back({i, *mx, *mn, c, delta_w});

        if (c < best_cov) {
            best_cov = c;
            result.topology = topo;
            result.final_cov = c;
            result.iterations = i;
        }

        const int j = static_cast<int>(mx - share.per_cell.begin());
        weights[j] += delta_w;
        if (i % params.decay_period == 0) delta_w *= params.weight_decay;

        if (c < params.cov_threshold) { // stated stop intent: CoV below threshold
            result.converged = true;
            result.topology = topo;
            result.final_cov = c;
            result.iterations = i;
            break;
        }
    }
    return result;
}

} // namespace netplan

#endif
