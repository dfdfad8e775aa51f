#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "netplan/loadmodel.hpp"
#include "netplan/mapping.hpp"

using namespace netplan;

namespace {

// Closed-form inverses used as oracles throughout this file.
// Separable density d1(x,y) = x*exp(-y) on [0,6]x[0,4]:
double oracle1_x(double x) { return std::sqrt(6.0 * x); }
double oracle1_y(double y) { return -std::log(1.0 - (y / 4.0) * (1.0 - std::exp(-4.0))); }
// Non-separable density d2(x,y) = x + y on [0,6]x[0,4]:
double oracle2_u(double x) { return 0.5 * (-4.0 + std::sqrt(16.0 + 40.0 * x)); }
double oracle2_v(double x, double y) {
    const double u = oracle2_u(x);
    return -u + std::sqrt(u * u + y * (2.0 * u + 4.0));
}

} // namespace

TEST_CASE("Cdf1D of a uniform density is the identity ramp") {
    Cdf1D c = Cdf1D::from_density([](double) { return 1.0; }, 0.0, 1.0, 4096);
    CHECK(c(0.0) == 0.0);
    CHECK(c(1.0) == 1.0);
    CHECK(c(0.3) == Catch::Approx(0.3).margin(1e-9));
    CHECK(c(-5.0) == 0.0);
    CHECK(c(7.0) == 1.0);
}

TEST_CASE("Cdf1D rejects invalid input") {
    CHECK_THROWS_AS(Cdf1D::from_density([](double) { return 1.0; }, 1.0, 1.0, 16),
                    validation_error);
    CHECK_THROWS_AS(Cdf1D::from_density([](double x) { return x - 10.0; }, 0.0, 1.0, 16),
                    validation_error);
    CHECK_THROWS_AS(Cdf1D::from_density([](double) { return 0.0; }, 0.0, 1.0, 16),
                    validation_error);
}

TEST_CASE("invert_1d: uniform density gives back t") {
    Cdf1D c = Cdf1D::from_density([](double) { return 1.0; }, 0.0, 1.0, 4096);
    CHECK(invert_1d(c, 0.0, 1.0, 0.3) == Catch::Approx(0.3).margin(1e-9));
    CHECK(invert_1d(c, 0.0, 1.0, 0.0) == Catch::Approx(0.0).margin(1e-9));
    CHECK(invert_1d(c, 0.0, 1.0, 1.0) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("invert_1d: linear density matches x' = sqrt(6x)") {
    Cdf1D c = Cdf1D::from_density([](double x) { return x; }, 0.0, 6.0, 16384);
    // t = x/6 with x = 1.5 -> x' = sqrt(9) = 3
    CHECK(invert_1d(c, 0.0, 6.0, 1.5 / 6.0) == Catch::Approx(3.0).margin(1e-6));
    for (double x : {0.2, 1.0, 2.7, 4.4, 5.9})
        CHECK(invert_1d(c, 0.0, 6.0, x / 6.0) == Catch::Approx(oracle1_x(x)).margin(1e-6));
}

TEST_CASE("invert_1d: exponential density matches the log closed form") {
    Cdf1D c = Cdf1D::from_density([](double y) { return std::exp(-y); }, 0.0, 4.0, 16384);
    const double expected = oracle1_y(2.0); // 0.674997...
    CHECK(expected == Catch::Approx(0.674997).margin(5e-6));
    CHECK(invert_1d(c, 0.0, 4.0, 2.0 / 4.0) == Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("invert_1d rejects bad input") {
    Cdf1D c = Cdf1D::from_density([](double) { return 1.0; }, 0.0, 1.0, 256);
    CHECK_THROWS_AS(invert_1d(c, 1.0, 0.0, 0.5), validation_error);
    CHECK_THROWS_AS(invert_1d(c, 0.0, 1.0, 1.5), validation_error);
    CHECK_THROWS_AS(invert_1d(c, 0.0, 1.0, -0.1), validation_error);
    // non-monotone "cdf"
    CHECK_THROWS_AS(invert_1d([](double x) { return std::sin(6.0 * x); }, 0.0, 1.0, 0.5),
                    validation_error);
    // cdf not anchored at 0/1
    CHECK_THROWS_AS(invert_1d([](double x) { return 0.1 + 0.8 * x; }, 0.0, 1.0, 0.5),
                    validation_error);
}

TEST_CASE("mapping mode names") {
    CHECK(mapping_mode_from_name("separable") == MappingMode::separable);
    CHECK(mapping_mode_from_name("marginal_x_first") == MappingMode::marginal_x_first);
    CHECK(mapping_mode_from_name("marginal_y_first") == MappingMode::marginal_y_first);
    CHECK_THROWS_AS(mapping_mode_from_name("diagonal"), validation_error);
}

TEST_CASE("separable mapping matches the closed form for x*exp(-y)") {
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    MappingSpec spec(d, DensityField::builtin(BuiltinDensity::x_exp_negy, d),
                     MappingMode::separable);
    // corner preservation
    Point p00 = spec.map_point({0.0, 0.0});
    CHECK(p00.x == Catch::Approx(0.0).margin(1e-9));
    CHECK(p00.y == Catch::Approx(0.0).margin(1e-9));
    Point p64 = spec.map_point({6.0, 4.0});
    CHECK(p64.x == Catch::Approx(6.0).margin(1e-9));
    CHECK(p64.y == Catch::Approx(4.0).margin(1e-9));
    // interior value from the closed form
    Point p = spec.map_point({1.5, 2.0});
    CHECK(p.x == Catch::Approx(3.0).margin(1e-6));
    CHECK(p.y == Catch::Approx(oracle1_y(2.0)).margin(1e-6));
}

TEST_CASE("separable mapping refuses a non-separable density") {
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    CHECK_THROWS_AS(MappingSpec(d, DensityField::builtin(BuiltinDensity::x_plus_y, d),
                                MappingMode::separable),
                    validation_error);
}

TEST_CASE("marginal-x-first mapping matches the closed form for x + y") {
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    MappingSpec spec(d, DensityField::builtin(BuiltinDensity::x_plus_y, d),
                     MappingMode::marginal_x_first);
    // corners map to corners: u(6) = 6, v(6, 4) = 4
    Point p = spec.map_point({6.0, 4.0});
    CHECK(p.x == Catch::Approx(6.0).margin(1e-9));
    CHECK(p.y == Catch::Approx(4.0).margin(1e-9));
    Point q = spec.map_point({0.0, 0.0});
    CHECK(q.x == Catch::Approx(0.0).margin(1e-9));
    CHECK(q.y == Catch::Approx(0.0).margin(1e-9));
    // u(1.5) = (-4 + sqrt(76)) / 2
    Point r = spec.map_point({1.5, 2.0});
    CHECK(oracle2_u(1.5) == Catch::Approx(2.3589).margin(5e-4));
    CHECK(r.x == Catch::Approx(oracle2_u(1.5)).margin(1e-6));
    CHECK(r.y == Catch::Approx(oracle2_v(1.5, 2.0)).margin(1e-6));
}

TEST_CASE("marginal-y-first mapping mirrors the factorization") {
    // For the symmetric density x + y on a square domain, y-first at (a, b)
    // must equal the transpose of x-first at (b, a).
    RectDomain d(0.0, 4.0, 0.0, 4.0);
    DensityField f = DensityField::builtin(BuiltinDensity::x_plus_y, d);
    MappingSpec xf(d, f, MappingMode::marginal_x_first);
    MappingSpec yf(d, f, MappingMode::marginal_y_first);
    Point a = xf.map_point({1.0, 2.5});
    Point b = yf.map_point({2.5, 1.0});
    CHECK(a.x == Catch::Approx(b.y).margin(1e-7));
    CHECK(a.y == Catch::Approx(b.x).margin(1e-7));
}

TEST_CASE("uniform density mapping is the identity") {
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    MappingSpec spec(d, DensityField::builtin(BuiltinDensity::uniform, d),
                     MappingMode::separable);
    std::vector<Point> sites = rectangular_lattice(d, 6, 5);
    std::vector<Point> mapped = spec.map_topology(sites);
    REQUIRE(mapped.size() == sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        CHECK(mapped[i].x == Catch::Approx(sites[i].x).margin(1e-9));
        CHECK(mapped[i].y == Catch::Approx(sites[i].y).margin(1e-9));
    }
}

TEST_CASE("map_point rejects points outside the source rectangle") {
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    MappingSpec spec(d, DensityField::builtin(BuiltinDensity::uniform, d),
                     MappingMode::separable);
    CHECK_THROWS_AS(spec.map_point({-0.1, 1.0}), validation_error);
    CHECK_THROWS_AS(spec.map_point({3.0, 4.1}), validation_error);
}

TEST_CASE("lattice under x*exp(-y) concentrates toward high demand") {
    // demand grows with x and shrinks with y, so image sites shift toward
    // large x and small y on average.
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    MappingSpec spec(d, DensityField::builtin(BuiltinDensity::x_exp_negy, d),
                     MappingMode::separable);
    std::vector<Point> sites = rectangular_lattice(d, 6, 5);
    std::vector<Point> mapped = spec.map_topology(sites);
    double mx_in = 0, my_in = 0, mx_out = 0, my_out = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        mx_in += sites[i].x;
        my_in += sites[i].y;
        mx_out += mapped[i].x;
        my_out += mapped[i].y;
    }
    CHECK(mx_out > mx_in);
    CHECK(my_out < my_in);
}

TEST_CASE("center of the source under x + y shifts along the closed form") {
    RectDomain d(0.0, 6.0, 0.0, 4.0);
    MappingSpec spec(d, DensityField::builtin(BuiltinDensity::x_plus_y, d),
                     MappingMode::marginal_x_first);
    const Point c = d.center();
    Point m = spec.map_point(c);
    CHECK(m.x >= c.x);
    CHECK(m.x == Catch::Approx(oracle2_u(c.x)).margin(1e-6));
    CHECK(m.y == Catch::Approx(oracle2_v(c.x, c.y)).margin(1e-6));
}
