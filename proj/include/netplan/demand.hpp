#ifndef NETPLAN_DEMAND_HPP
#define NETPLAN_DEMAND_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"

namespace netplan {

enum class BuiltinDensity { uniform, x_exp_negy, x_plus_y };

inline BuiltinDensity builtin_density_from_name(const std::string& name) {
    if (name == "uniform") return BuiltinDensity::uniform;
    if (name == "x_exp_negy") return BuiltinDensity::x_exp_negy;
    if (name == "x_plus_y") return BuiltinDensity::x_plus_y;
    throw validation_error("unknown builtin density: " + name);
}

// Spatial service-demand distribution over a rectangular domain. Either an
// analytic builtin or a raster table of nonnegative values. Values returned by
// value() are unnormalized; discretize() yields per-element masses summing to 1.
class DensityField {
public:
    static DensityField builtin(BuiltinDensity kind, RectDomain domain) {
        DensityField d(domain);
        d.builtin_ = kind;
        if (kind == BuiltinDensity::x_exp_negy && domain.x_min < 0.0)
            throw validation_error("x_exp_negy density is negative for x < 0");
        if (kind == BuiltinDensity::x_plus_y && domain.x_min + domain.y_min < 0.0)
            throw validation_error("x_plus_y density is negative over this domain");
        return d;
    }

    static DensityField raster(RectDomain domain, int nx, int ny, std::vector<double> values) {
        if (nx < 2 || ny < 2)
            throw validation_error("raster density: nx and ny must both be >= 2");
        if (static_cast<int>(values.size()) != nx * ny)
            throw validation_error("raster density: value count does not match nx*ny");
        double total = 0.0;
        for (double v : values) {
            if (!(v >= 0.0)) throw validation_error("raster density: negative or NaN value");
            total += v;
        }
        if (total <= 0.0) throw validation_error("raster density: zero total mass");
        DensityField d(domain);
        d.is_raster_ = true;
        d.rnx_ = nx;
        d.rny_ = ny;
        d.rvals_ = std::move(values);
        return d;
    }

    const RectDomain& domain() const { return domain_; }
    bool is_raster() const { return is_raster_; }
    BuiltinDensity builtin_kind() const { return builtin_; }

    // Unnormalized density. Raster tables are interpolated bilinearly between
    // cell centers (clamped at the border strip).
    double value(double x, double y) const {
        if (!is_raster_) {
            switch (builtin_) {
                case BuiltinDensity::uniform: return 1.0;
                case BuiltinDensity::x_exp_negy: return x * std::exp(-y);
                case BuiltinDensity::x_plus_y: return x + y;
            }
            return 0.0;
        }
        const double cw = domain_.width() / rnx_;
        const double ch = domain_.height() / rny_;
        double u = (x - domain_.x_min) / cw - 0.5;
        double v = (y - domain_.y_min) / ch - 0.5;
        u = std::clamp(u, 0.0, static_cast<double>(rnx_ - 1));
        v = std::clamp(v, 0.0, static_cast<double>(rny_ - 1));
        const int i0 = std::min(static_cast<int>(u), rnx_ - 2);
        const int j0 = std::min(static_cast<int>(v), rny_ - 2);
        const double fu = u - i0;
        const double fv = v - j0;
        const auto at = [&](int i, int j) { return rvals_[j * rnx_ + i]; };
        return (1 - fu) * (1 - fv) * at(i0, j0) + fu * (1 - fv) * at(i0 + 1, j0) +
               (1 - fu) * fv * at(i0, j0 + 1) + fu * fv * at(i0 + 1, j0 + 1);
    }

    // Normalized per-element demand masses on the given grid (sum == 1).
    std::vector<double> discretize(const RasterGrid& grid) const {
        std::vector<double> delta(grid.size());
        double total = 0.0;
        for (int a = 0; a < grid.size(); ++a) {
            const Point c = grid.center(a);
            const double v = value(c.x, c.y);
            if (!(v >= 0.0)) throw validation_error("density: negative value inside domain");
            delta[a] = v;
            total += v;
        }
        if (total <= 0.0) throw validation_error("density: zero total mass on grid");
        for (double& v : delta) v /= total;
        return delta;
    }

private:
    explicit DensityField(RectDomain domain) : domain_(domain) {}

    RectDomain domain_;
    bool is_raster_{false};
    BuiltinDensity builtin_{BuiltinDensity::uniform};
    int rnx_{0}, rny_{0};
    std::vector<double> rvals_;
};

// One-dimensional density tabulated on uniform nodes, normalized to unit mass.
class Density1D {
public:
    template <class F>
    static Density1D from_function(F&& pdf, double lo, double hi, int nodes = 2049) {
        if (!(hi > lo) || nodes < 2) throw validation_error("Density1D: bad range");
        Density1D d;
        d.lo_ = lo;
        d.hi_ = hi;
        d.vals_.resize(nodes);
        const double h = (hi - lo) / (nodes - 1);
        for (int i = 0; i < nodes; ++i) {
            const double v = pdf(lo + i * h);
            if (!(v >= 0.0)) throw validation_error("Density1D: negative value");
            d.vals_[i] = v;
        }
        // trapezoid mass
        double mass = 0.0;
        for (int i = 0; i + 1 < nodes; ++i) mass += 0.5 * (d.vals_[i] + d.vals_[i + 1]) * h;
        if (mass <= 0.0) throw validation_error("Density1D: zero mass");
        for (double& v : d.vals_) v /= mass;
        return d;
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double value(double x) const {
        if (x <= lo_) return vals_.front();
        if (x >= hi_) return vals_.back();
        const double s = (x - lo_) / (hi_ - lo_) * (vals_.size() - 1);
        const int i = std::min(static_cast<int>(s), static_cast<int>(vals_.size()) - 2);
        const double f = s - i;
        return (1 - f) * vals_[i] + f * vals_[i + 1];
    }

    double integral() const { return 1.0; } // normalized at construction

private:
    double lo_{0}, hi_{1};
    std::vector<double> vals_;
};

namespace detail {
// Midpoint integral of f over [lo, hi] with n panels.
template <class F>
double integrate_midpoint(F&& f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f(lo + (i + 0.5) * h);
    return acc * h;
}
} // namespace detail

// Marginal density along x: integrates the 2D density over the y-range.
inline Density1D marginalize_x(const DensityField& density, int nodes = 2049,
                               int integration_panels = 1024) {
    const RectDomain& d = density.domain();
    return Density1D::from_function(
        [&](double x) {
            return detail::integrate_midpoint([&](double y) { return density.value(x, y); },
                                              d.y_min, d.y_max, integration_panels);
        },
        d.x_min, d.x_max, nodes);
}

inline Density1D marginalize_y(const DensityField& density, int nodes = 2049,
                               int integration_panels = 1024) {
    const RectDomain& d = density.domain();
    return Density1D::from_function(
        [&](double y) {
            return detail::integrate_midpoint([&](double x) { return density.value(x, y); },
                                              d.x_min, d.x_max, integration_panels);
        },
        d.y_min, d.y_max, nodes);
}

// Conditional density of y given a fixed x-coordinate, normalized over the
// y-range. Throws if the slice carries no mass.
inline Density1D conditional_y(const DensityField& density, double xprime, int nodes = 2049) {
    const RectDomain& d = density.domain();
    if (xprime < d.x_min || xprime > d.x_max)
        throw validation_error("conditional_y: x outside the domain");
    return Density1D::from_function([&](double y) { return density.value(xprime, y); }, d.y_min,
                                    d.y_max, nodes);
}

inline Density1D conditional_x(const DensityField& density, double yprime, int nodes = 2049) {
    const RectDomain& d = density.domain();
    if (yprime < d.y_min || yprime > d.y_max)
        throw validation_error("conditional_x: y outside the domain");
    return Density1D::from_function([&](double x) { return density.value(x, yprime); }, d.x_min,
                                    d.x_max, nodes);
}

// Statistical-independence check: the normalized conditional in y must be the
// same at every x-column for a separable density.
inline bool is_separable(const DensityField& density, double tol = 1e-6, int columns = 7,
                         int samples = 65) {
    const RectDomain& d = density.domain();
    std::vector<Density1D> conds;
    for (int c = 0; c < columns; ++c) {
        const double x = d.x_min + (c + 0.5) / columns * d.width();
        try {
            conds.push_back(conditional_y(density, x, samples));
        } catch (const validation_error&) {
            return false; // zero-mass column: cannot certify separability
        }
    }
    for (int s = 0; s < samples; ++s) {
        const double y = d.y_min + (s + 0.5) / samples * d.height();
        const double ref = conds.front().value(y);
        for (const auto& cond : conds)
            if (std::abs(cond.value(y) - ref) > tol) return false;
    }
    return true;
}

// Per-cell expected demand: V_l = V * sum of element masses served by cell l.
struct DemandShare {
    double volume;
    std::vector<double> per_cell;
};

inline DemandShare demand_share(const Topology& topo, std::span<const double> delta, double volume) {
    if (static_cast<int>(delta.size()) != topo.grid.size())
        throw validation_error("demand_share: density grid mismatch");
    std::vector<double> shares(topo.num_sites(), 0.0);
    for (int a = 0; a < topo.grid.size(); ++a) shares[topo.assignment[a]] += delta[a];
    for (double& s : shares) s *= volume;
    return DemandShare{volume, std::move(shares)};
}

// Coefficient of variation: population standard deviation over the mean.
inline double cov(std::span<const double> values) {
    if (values.empty()) throw validation_error("cov: empty list");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    if (!(mean > 0.0)) throw validation_error("cov: mean must be positive");
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / values.size()) / mean;
}

} // namespace netplan

#endif
