#ifndef NETPLAN_POWOPT_HPP
#define NETPLAN_POWOPT_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"
#include "netplan/loadmodel.hpp"

namespace netplan {

enum class SweepMode { gauss_seidel, jacobi };

inline SweepMode sweep_mode_from_name(const std::string& name) {
    if (name == "gauss_seidel") return SweepMode::gauss_seidel;
    if (name == "jacobi") return SweepMode::jacobi;
    throw validation_error("unknown sweep mode: " + name);
}

struct PowerOptOptions {
    double var_tol = 1e-6;     // stop when Var(alpha) drops below this
    int max_outer = 300;
    double p_min_ratio = 1e-4; // lower power bound relative to the maximum
    SweepMode sweep = SweepMode::gauss_seidel;
    double nlce_tol = 1e-9;
    int nlce_max_iter = 500;
};

struct PowerOptResult {
    std::vector<double> p_star;  // normalized so max(p) = 1
    double alpha_bar;            // achieved uniform load
    double residual_var;
    int iterations;
    bool converged;
    int limited_cell = -1;       // cell pinned at a power bound, -1 if none
    std::vector<double> loads;   // solved loads at p_star
};

inline double population_variance(std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / v.size();
}

namespace detail {

// Load of cell l when its own power is p_l, with every other cell assumed to
// carry load alpha_bar at the given powers. Monotone decreasing in p_l.
inline double own_load(int l, double p_l, double alpha_bar, std::span<const int> elements,
                       std::span<const double> interference_unit, std::span<const double> delta,
                       const GainMatrix& G, double K) {
    double acc = 0.0;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const int a = elements[i];
        const double interference = alpha_bar * interference_unit[i];
        double gamma =
            interference > 0.0 ? p_l * G(l, a) / interference : kSirInterferenceFree;
        gamma = std::min(gamma, kSirCap);
        acc += delta[a] / std::log1p(gamma);
    }
    return K * acc;
}

} // namespace detail

// Variance-minimizing power allocation: alternate between solving the coupled
// loads at the current powers and per-cell 1D solves that pull every cell's
// load to the current mean. The solution's scale is free; the output is
// normalized to max(p) = 1.
inline PowerOptResult optimize_power(const Topology& topo, std::span<const double> delta,
                                     const RadioParams& radio, const GainMatrix& G,
                                     PowerOptOptions opts = {}) {
    const int L = topo.num_sites();
    if (L < 1) throw validation_error("optimize_power: empty topology");
    const double K = radio.load_constant();
    const std::vector<std::vector<int>> cells = cell_elements(topo);

    std::vector<double> p(L, 1.0);
    NlceResult base = solve_nlce(topo, delta, p, radio, G, opts.nlce_tol, opts.nlce_max_iter);
    std::vector<double> alpha = std::move(base.alpha);

    PowerOptResult result;
    result.converged = false;
    result.iterations = 0;

    std::vector<double> interference_unit;
    for (int outer = 1; outer <= opts.max_outer; ++outer) {
        result.iterations = outer;
        const double var = population_variance(alpha);
        if (var <= opts.var_tol) {
            result.converged = true;
            break;
        }
        const double alpha_bar = std::accumulate(alpha.begin(), alpha.end(), 0.0) / L;
        const std::vector<double> frozen =
            opts.sweep == SweepMode::jacobi ? p : std::vector<double>{};
        std::vector<double> next = p;
        result.limited_cell = -1;
        for (int l = 0; l < L; ++l) {
            const std::vector<double>& pref = opts.sweep == SweepMode::jacobi ? frozen : next;
            const auto& elems = cells[l];
            interference_unit.resize(elems.size());
            for (std::size_t i = 0; i < elems.size(); ++i) {
                const std::span<const double> g = G.row(elems[i]);
                double acc = 0.0;
                for (int k = 0; k < L; ++k)
                    if (k != l) acc += pref[k] * g[k];
                interference_unit[i] = acc;
            }
            const auto load_at = [&](double pl) {
                return detail::own_load(l, pl, alpha_bar, elems, interference_unit, delta, G, K);
            };
            double lo = opts.p_min_ratio, hi = 1.0;
            if (load_at(hi) > alpha_bar) {
                next[l] = hi; // even full power cannot reach the target
                result.limited_cell = l;
            } else if (load_at(lo) < alpha_bar) {
                next[l] = lo;
                result.limited_cell = l;
            } else {
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (load_at(mid) > alpha_bar ? lo : hi) = mid;
                }
                next[l] = 0.5 * (lo + hi);
            }
        }
        const double peak = *std::max_element(next.begin(), next.end());
        for (double& v : next) v /= peak;
        p = std::move(next);
        NlceResult solved =
            solve_nlce(topo, delta, p, radio, G, opts.nlce_tol, opts.nlce_max_iter, alpha);
        alpha = std::move(solved.alpha);
    }

    result.p_star = std::move(p);
    result.loads = alpha;
    result.alpha_bar = std::accumulate(alpha.begin(), alpha.end(), 0.0) / L;
    result.residual_var = population_variance(alpha);
    if (!result.converged && result.limited_cell >= 0)
        throw convergence_error("optimize_power: cell " + std::to_string(result.limited_cell) +
                                " cannot reach the target load within the power bounds");
    return result;
}

// Loads depend on the power vector only through ratios: re-solving at c * p
// must reproduce the same load vector.
inline bool verify_scale_freedom(const Topology& topo, std::span<const double> delta,
                                 const RadioParams& radio, const GainMatrix& G,
                                 const PowerOptResult& result, double c, double tol = 1e-9) {
    if (!(c > 0.0)) throw validation_error("verify_scale_freedom: c must be > 0");
    std::vector<double> scaled(result.p_star);
    for (double& v : scaled) v *= c;
    NlceResult r = solve_nlce(topo, delta, scaled, radio, G);
    for (int l = 0; l < topo.num_sites(); ++l)
        if (std::abs(r.alpha[l] - result.loads[l]) > tol) return false;
    return true;
}

} // namespace netplan

#endif
