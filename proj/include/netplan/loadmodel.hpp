#ifndef NETPLAN_LOADMODEL_HPP
#define NETPLAN_LOADMODEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"

namespace netplan {

// SIR value standing in for "no interference at all".
inline constexpr double kSirInterferenceFree = std::numeric_limits<double>::infinity();
// Cap applied when forming loads from interference-free elements.
inline constexpr double kSirCap = 1e6;

struct RadioParams {
    double volume;            // V, average users
    double bandwidth_hz;      // B
    double rate_min_bps;      // R_min
    double pathloss_exponent; // beta
    double d_min = 0.0;       // distance clamp; 0 selects half the element diagonal

    void validate() const {
        if (!(volume > 0.0 && bandwidth_hz > 0.0 && rate_min_bps > 0.0))
            throw validation_error("radio: V, B and R_min must be positive");
        if (!(pathloss_exponent >= 2.0))
            throw validation_error("radio: pathloss exponent must be >= 2");
        if (d_min < 0.0) throw validation_error("radio: d_min must be >= 0");
    }

    // Prefactor of the load equation: V * R_min * ln(2) / B.
    double load_constant() const { return volume * rate_min_bps * std::numbers::ln2 / bandwidth_hz; }
};

inline double default_d_min(const RasterGrid& grid) {
    return 0.5 * std::hypot(grid.dx(), grid.dy());
}

enum class Metric { euclidean, torus };

// Average channel gains G_{l,a} = clamp(d, d_min)^(-beta), stored
// element-major so per-element sums over cells are contiguous.
class GainMatrix {
public:
    static GainMatrix build(std::span<const Point> sites, const RasterGrid& grid, double beta,
                            double d_min, Metric metric) {
        if (sites.empty()) throw validation_error("GainMatrix: empty site list");
        if (!(d_min > 0.0)) throw validation_error("GainMatrix: d_min must be > 0");
        GainMatrix g;
        g.L_ = static_cast<int>(sites.size());
        g.A_ = grid.size();
        g.g_.resize(static_cast<std::size_t>(g.L_) * g.A_);
        const double X = grid.domain.width();
        const double Y = grid.domain.height();
        for (int a = 0; a < g.A_; ++a) {
            const Point c = grid.center(a);
            for (int l = 0; l < g.L_; ++l) {
                double dx = std::abs(c.x - sites[l].x);
                double dy = std::abs(c.y - sites[l].y);
                if (metric == Metric::torus) {
                    dx = std::min(dx, X - dx);
                    dy = std::min(dy, Y - dy);
                }
                const double d = std::max(std::hypot(dx, dy), d_min);
                g.g_[static_cast<std::size_t>(a) * g.L_ + l] = std::pow(d, -beta);
            }
        }
        return g;
    }

    int num_sites() const { return L_; }
    int num_elements() const { return A_; }
    double operator()(int l, int a) const { return g_[static_cast<std::size_t>(a) * L_ + l]; }
    std::span<const double> row(int a) const {
        return {g_.data() + static_cast<std::size_t>(a) * L_, static_cast<std::size_t>(L_)};
    }

private:
    int L_{0}, A_{0};
    std::vector<double> g_;
};

// SIR of area element a served by cell `serving`: own received power over the
// load-scaled interference from every other cell. Returns the
// interference-free value when the denominator vanishes.
inline double sir(int a, int serving, std::span<const double> alpha, std::span<const double> p,
                  const GainMatrix& G) {
    const std::span<const double> g = G.row(a);
    double interference = 0.0;
    for (int l = 0; l < G.num_sites(); ++l)
        if (l != serving) interference += p[l] * g[l] * alpha[l];
    const double signal = p[serving] * g[serving];
    if (interference <= 0.0) return kSirInterferenceFree;
    return signal / interference;
}

// One application of the load map: for each cell, the demand-weighted sum of
// 1/ln(1 + SIR) scaled by V*R_min*ln(2)/B. Interference-free elements use the
// SIR cap so loads stay finite.
inline std::vector<double> cell_loads(const Topology& topo, std::span<const double> delta,
                                      std::span<const double> alpha, std::span<const double> p,
                                      const RadioParams& radio, const GainMatrix& G) {
    const int L = topo.num_sites();
    const int A = topo.grid.size();
    if (G.num_sites() != L || G.num_elements() != A)
        throw validation_error("cell_loads: gain matrix shape mismatch");
    if (static_cast<int>(delta.size()) != A)
        throw validation_error("cell_loads: density grid mismatch");
    const double K = radio.load_constant();
    std::vector<double> out(L, 0.0);
    for (int a = 0; a < A; ++a) {
        const int serving = topo.assignment[a];
        const std::span<const double> g = G.row(a);
        double total = 0.0;
        for (int l = 0; l < L; ++l) total += p[l] * g[l] * alpha[l];
        const double interference = total - p[serving] * g[serving] * alpha[serving];
        const double signal = p[serving] * g[serving];
        double gamma = interference > 0.0 ? signal / interference : kSirInterferenceFree;
        gamma = std::min(gamma, kSirCap);
        if (!(gamma > 0.0) && delta[a] > 0.0)
            throw convergence_error("cell_loads: zero SIR at element " + std::to_string(a) +
                                    " with positive demand (outage)");
        out[serving] += delta[a] / std::log1p(gamma);
    }
    for (double& v : out) v *= K;
    return out;
}

struct NlceResult {
    std::vector<double> alpha;
    int iterations;
};

// Fixed-point solve of the load-coupling equations, iterating from alpha = 0.
// The iteration is monotone nondecreasing; loads above 1 are legal (outage)
// and reported as-is.
inline NlceResult solve_nlce(const Topology& topo, std::span<const double> delta,
                             std::span<const double> p, const RadioParams& radio,
                             const GainMatrix& G, double tol = 1e-9, int max_iter = 500,
                             std::span<const double> initial = {}) {
    for (double v : p)
        if (!(v > 0.0)) throw validation_error("solve_nlce: powers must be positive");
    std::vector<double> alpha(topo.num_sites(), 0.0);
    if (!initial.empty()) {
        if (static_cast<int>(initial.size()) != topo.num_sites())
            throw validation_error("solve_nlce: bad initial guess size");
        alpha.assign(initial.begin(), initial.end());
    }
    constexpr double kDivergenceLimit = 1e9;
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> next = cell_loads(topo, delta, alpha, p, radio, G);
        double diff = 0.0, peak = 0.0;
        for (int l = 0; l < topo.num_sites(); ++l) {
            diff = std::max(diff, std::abs(next[l] - alpha[l]));
            peak = std::max(peak, next[l]);
        }
        const bool diverged = peak > kDivergenceLimit;
        if (diverged || it == max_iter) {
            if (diff < tol && !diverged) return {std::move(next), it};
            std::string msg = diverged ? "solve_nlce: loads diverged (outage)"
                                       : "solve_nlce: no fixed point within max_iter";
            msg += "; last iterates max " + std::to_string(peak) + ", step " + std::to_string(diff);
            throw convergence_error(msg);
        }
        alpha = std::move(next);
        if (diff < tol) return {std::move(alpha), it};
    }
    throw convergence_error("solve_nlce: unreachable");
}

// Rectangular m x n lattice of sites at cell centers.
inline std::vector<Point> rectangular_lattice(const RectDomain& domain, int cols, int rows) {
    if (cols < 1 || rows < 1) throw validation_error("rectangular_lattice: bad shape");
    std::vector<Point> sites;
    sites.reserve(static_cast<std::size_t>(cols) * rows);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i)
            sites.push_back({domain.x_min + (i + 0.5) * domain.width() / cols,
                             domain.y_min + (j + 0.5) * domain.height() / rows});
    return sites;
}

// Factor pair cols*rows = L whose lattice cell aspect ratio is closest to square.
inline std::pair<int, int> lattice_shape(const RectDomain& domain, int L) {
    if (L < 1) throw validation_error("lattice_shape: L must be >= 1");
    int best_cols = 1, best_rows = L;
    double best_score = std::numeric_limits<double>::infinity();
    for (int cols = 1; cols <= L; ++cols) {
        if (L % cols != 0) continue;
        const int rows = L / cols;
        const double aspect = (domain.width() / cols) / (domain.height() / rows);
        const double score = std::abs(std::log(aspect));
        if (score < best_score) {
            best_score = score;
            best_cols = cols;
            best_rows = rows;
        }
    }
    return {best_cols, best_rows};
}

struct DimensionResult {
    int sites;       // L
    int lattice_cols;
    int lattice_rows;
    double load;     // solved uniform load at that L
};

// Smallest lattice size whose uniform-demand, uniform-power load on the flat
// torus stays at or below the target. Scans L upward; lattices whose load
// diverges are treated as infeasible.
inline DimensionResult dimension(const RasterGrid& grid, const RadioParams& radio,
                                 double target_load, int max_sites = 200) {
    radio.validate();
    if (!(target_load > 0.0)) throw validation_error("dimension: target load must be > 0");
    const std::vector<double> delta(grid.size(), 1.0 / grid.size());
    const double d_min = radio.d_min > 0.0 ? radio.d_min : default_d_min(grid);
    for (int L = 1; L <= max_sites; ++L) {
        const auto [cols, rows] = lattice_shape(grid.domain, L);
        std::vector<Point> sites = rectangular_lattice(grid.domain, cols, rows);
        GainMatrix G = GainMatrix::build(sites, grid, radio.pathloss_exponent, d_min, Metric::torus);
        Topology topo = assign_power_voronoi(std::move(sites), std::vector<double>(L, 0.0), grid);
        const std::vector<double> p(L, 1.0);
        try {
            NlceResult r = solve_nlce(topo, delta, p, radio, G);
            const double load = *std::max_element(r.alpha.begin(), r.alpha.end());
            if (load <= target_load) return {L, cols, rows, load};
        } catch (const convergence_error&) {
            // overloaded lattice: keep scanning
        }
    }
    throw convergence_error("dimension: no feasible lattice up to L = " + std::to_string(max_sites));
}

} // namespace netplan

#endif
