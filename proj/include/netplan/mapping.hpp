#ifndef NETPLAN_MAPPING_HPP
#define NETPLAN_MAPPING_HPP

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netplan/demand.hpp"
#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"

namespace netplan {

// Tabulated monotone CDF on [lo, hi]: piecewise-linear over uniform panels,
// normalized so cdf(lo) = 0 and cdf(hi) = 1.
class Cdf1D {
public:
    template <class F>
    static Cdf1D from_density(F&& pdf, double lo, double hi, int panels = 16384) {
        if (!(hi > lo) || panels < 2) throw validation_error("Cdf1D: bad range");
        Cdf1D c;
        c.lo_ = lo;
        c.hi_ = hi;
        c.cum_.resize(panels + 1);
        const double h = (hi - lo) / panels;
        double acc = 0.0;
        c.cum_[0] = 0.0;
        for (int i = 0; i < panels; ++i) {
            const double v = pdf(lo + (i + 0.5) * h);
            if (!(v >= 0.0)) throw validation_error("Cdf1D: negative density");
            acc += v * h;
            c.cum_[i + 1] = acc;
        }
        if (acc <= 0.0) throw validation_error("Cdf1D: zero density mass");
        for (double& v : c.cum_) v /= acc;
        return c;
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        const int panels = static_cast<int>(cum_.size()) - 1;
        const double s = (x - lo_) / (hi_ - lo_) * panels;
        const int i = std::min(static_cast<int>(s), panels - 1);
        const double f = s - i;
        return (1 - f) * cum_[i] + f * cum_[i + 1];
    }

private:
    double lo_{0}, hi_{1};
    std::vector<double> cum_;
};

// Solve cdf(x) = t on [lo, hi] by bisection. The CDF must be nondecreasing
// with cdf(lo) = 0 and cdf(hi) = 1; a sampled decrease larger than 1e-12
// is rejected as non-monotone.
template <class Cdf>
double invert_1d(Cdf&& cdf, double lo, double hi, double t) {
    if (!(hi > lo)) throw validation_error("invert_1d: bad interval");
    if (!(t >= 0.0 && t <= 1.0)) throw validation_error("invert_1d: t outside [0, 1]");
    constexpr int kProbe = 33;
    double prev = cdf(lo);
    if (std::abs(prev) > 1e-9) throw validation_error("invert_1d: cdf(lo) != 0");
    for (int i = 1; i < kProbe; ++i) {
        const double v = cdf(lo + (hi - lo) * i / (kProbe - 1));
        if (v < prev - 1e-12) throw validation_error("invert_1d: non-monotone cdf");
        prev = v;
    }
    if (std::abs(prev - 1.0) > 1e-9) throw validation_error("invert_1d: cdf(hi) != 1");

    double a = lo, b = hi;
    for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        (cdf(m) < t ? a : b) = m;
    }
    return 0.5 * (a + b);
}

enum class MappingMode { separable, marginal_x_first, marginal_y_first };

inline MappingMode mapping_mode_from_name(const std::string& name) {
    if (name == "separable") return MappingMode::separable;
    if (name == "marginal_x_first") return MappingMode::marginal_x_first;
    if (name == "marginal_y_first") return MappingMode::marginal_y_first;
    throw validation_error("unknown mapping mode: " + name);
}

// Inverse spatial mapping: transports points from a source rectangle with
// uniform demand onto the density's rectangle so that equal source areas carry
// equal demand mass. Each axis is an inverse-CDF solve; non-separable
// densities use a marginal-then-conditional factorization.
struct MappingOptions {
    int marginal_panels = 16384;
    int conditional_panels = 8192;
    int integration_panels = 512;
    double separability_tol = 1e-6;
};

class MappingSpec {
public:
    MappingSpec(RectDomain source, DensityField density, MappingMode mode,
                MappingOptions opts = {})
        : source_(source), density_(std::move(density)), mode_(mode), opts_(opts) {
        const RectDomain& t = density_.domain();
        if (mode_ == MappingMode::separable && !is_separable(density_, opts_.separability_tol))
            throw validation_error("separable mapping requested for a non-separable density");
        if (mode_ != MappingMode::marginal_y_first)
            cdf_x_ = Cdf1D::from_density(
                [&](double x) {
                    return detail::integrate_midpoint(
                        [&](double y) { return density_.value(x, y); }, t.y_min, t.y_max,
                        opts_.integration_panels);
                },
                t.x_min, t.x_max, opts_.marginal_panels);
        if (mode_ != MappingMode::marginal_x_first)
            cdf_y_ = Cdf1D::from_density(
                [&](double y) {
                    return detail::integrate_midpoint(
                        [&](double x) { return density_.value(x, y); }, t.x_min, t.x_max,
                        opts_.integration_panels);
                },
                t.y_min, t.y_max, opts_.marginal_panels);
    }

    const RectDomain& source() const { return source_; }
    const RectDomain& target() const { return density_.domain(); }
    MappingMode mode() const { return mode_; }
    const DensityField& density() const { return density_; }

    // CDF of the x-marginal on the target (separable and x-first modes).
    const Cdf1D& marginal_cdf_x() const { return cdf_x_.value(); }
    const Cdf1D& marginal_cdf_y() const { return cdf_y_.value(); }

    // Conditional CDF of y' given x' (x-first), or of x' given y' (y-first).
    Cdf1D conditional_cdf_y(double xprime) const {
        const RectDomain& t = target();
        return Cdf1D::from_density([&](double y) { return density_.value(xprime, y); }, t.y_min,
                                   t.y_max, opts_.conditional_panels);
    }
    Cdf1D conditional_cdf_x(double yprime) const {
        const RectDomain& t = target();
        return Cdf1D::from_density([&](double x) { return density_.value(x, yprime); }, t.x_min,
                                   t.x_max, opts_.conditional_panels);
    }

    Point map_point(Point p) const {
        if (!source_.contains(p))
            throw validation_error("map_point: point outside the source domain");
        const double tx = (p.x - source_.x_min) / source_.width();
        const double ty = (p.y - source_.y_min) / source_.height();
        const RectDomain& t = target();
        switch (mode_) {
            case MappingMode::separable: {
                const double xp = invert_1d(*cdf_x_, t.x_min, t.x_max, tx);
                const double yp = invert_1d(*cdf_y_, t.y_min, t.y_max, ty);
                return {xp, yp};
            }
            case MappingMode::marginal_x_first: {
                const double xp = invert_1d(*cdf_x_, t.x_min, t.x_max, tx);
                Cdf1D cond = conditional_cdf_y(xp); // throws if the slice has no mass
                const double yp = invert_1d(cond, t.y_min, t.y_max, ty);
                return {xp, yp};
            }
            case MappingMode::marginal_y_first: {
                const double yp = invert_1d(*cdf_y_, t.y_min, t.y_max, ty);
                Cdf1D cond = conditional_cdf_x(yp);
                const double xp = invert_1d(cond, t.x_min, t.x_max, tx);
                return {xp, yp};
            }
        }
        throw validation_error("map_point: bad mode");
    }

    // Element-wise mapping of a site list. Power weights are not transported;
    // cells on the target side are re-derived by standard Voronoi assignment.
    std::vector<Point> map_topology(std::span<const Point> sites) const {
        std::vector<Point> out;
        out.reserve(sites.size());
        for (const Point& s : sites) out.push_back(map_point(s));
        return out;
    }

private:
    RectDomain source_;
    DensityField density_;
    MappingMode mode_;
    MappingOptions opts_;
    std::optional<Cdf1D> cdf_x_;
    std::optional<Cdf1D> cdf_y_;
};

} // namespace netplan

#endif
