#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "berry/errors.hpp"
#include "berry/geometry.hpp"

using namespace berry;

namespace {

constexpr double kPi = std::numbers::pi;

GridField sample(const Grid& g, double (*f)(double, double)) {
    GridField out;
    out.grid = g;
    out.value.resize(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto p = g.point(i, j);
            out.value[g.index(i, j)] = f(p[0], p[1]);
        }
    return out;
}

double circle(double x, double y) { return x * x + y * y - 0.25; }
double stripes(double x, double) { return std::cos(2.0 * kPi * x); }
double sin_x(double x, double) { return std::sin(2.0 * kPi * x); }
double sin_y(double, double y) { return std::sin(2.0 * kPi * y); }
double positive(double x, double y) { return 2.0 + std::sin(x) * std::cos(y); }
double tilted(double x, double y) { return std::sin(7.0 * x + 3.0 * y) + 0.3 * std::cos(5.0 * y - 2.0 * x); }

Domain l_shape() { return Domain::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}); }

} // namespace

TEST_CASE("areas, diameters and intersections") {
    const auto sq = Domain::rectangle(0, 0, 1, 1);
    const auto shifted = Domain::rectangle(0.5, 0, 1, 1);
    CHECK(area(sq) == 1.0);
    CHECK(intersection_area(sq, shifted) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(diam(Domain::disk(0.3, 0.1, 0.7)) == doctest::Approx(1.4));
    CHECK(diam(sq) == doctest::Approx(std::sqrt(2.0)));
    CHECK(area(l_shape()) == doctest::Approx(3.0));
    CHECK(diam(l_shape()) == doctest::Approx(std::sqrt(8.0)));

    const auto disk = Domain::disk(0.0, 0.0, 1.0);
    CHECK(area(disk) == doctest::Approx(kPi));
    // Lens of two unit disks at distance 1.
    const double lens = 2.0 * std::acos(0.5) - 0.5 * std::sqrt(3.0);
    CHECK(intersection_area(disk, Domain::disk(1.0, 0.0, 1.0)) == doctest::Approx(lens).epsilon(1e-13));
    // Quarter disk inside the first quadrant square.
    CHECK(intersection_area(disk, Domain::rectangle(0, 0, 2, 2)) == doctest::Approx(kPi / 4.0).epsilon(1e-13));
    CHECK(intersection_area(Domain::rectangle(0, 0, 2, 2), disk) == doctest::Approx(kPi / 4.0).epsilon(1e-13));
    CHECK(intersection_area(l_shape(), Domain::rectangle(0.5, 0.5, 1, 1)) == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(intersection_area(sq, Domain::rectangle(3, 3, 1, 1)) == 0.0);

    for (const auto& D : {sq, disk, l_shape()}) {
        CHECK(intersection_area(D, D) == doctest::Approx(area(D)).epsilon(1e-12));
        CHECK(intersection_area(D, shifted) == doctest::Approx(intersection_area(shifted, D)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(Domain::rectangle(0, 0, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(Domain::disk(0, 0, -1), InvalidArgument);
    CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidArgument);
}

TEST_CASE("polygon orientation and containment") {
    const auto cw = Domain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(area(cw) == doctest::Approx(1.0));
    CHECK(cw.contains({0.5, 0.5}));
    CHECK_FALSE(l_shape().contains({1.5, 1.5}));
    CHECK(l_shape().contains({1.5, 0.5}));
}

TEST_CASE("erosion and dilation") {
    CHECK(erosion_area(Domain::disk(0, 0, 1), 0.25) == doctest::Approx(kPi * 0.5625));
    CHECK(erosion_area(Domain::rectangle(0, 0, 1, 1), 0.6) == 0.0);
    CHECK(erosion_area(Domain::rectangle(0, 0, 2, 1), 0.1) == doctest::Approx(1.8 * 0.8));
    CHECK(dilation_area(Domain::disk(0, 0, 1), 0.5) == doctest::Approx(kPi * 2.25));
    // Rectangle dilation: area + perimeter eta + pi eta^2.
    CHECK(dilation_area(Domain::rectangle(0, 0, 2, 1), 0.1) == doctest::Approx(2.0 + 6.0 * 0.1 + kPi * 0.01).epsilon(1e-12));
    CHECK_THROWS_AS(erosion_area(Domain::disk(0, 0, 1), -0.1), InvalidArgument);

    // L-shape: the reflex corner rounds the inner boundary of the eroded set.
    const double eta = 0.1;
    const double exact = 2.0 * (2.0 - 2.0 * eta) * (1.0 - 2.0 * eta) - (1.0 - 2.0 * eta) * (1.0 - 2.0 * eta) +
                         eta * eta * (1.0 - kPi / 4.0);
    const double offset = erosion_area(l_shape(), eta);
    const double raster = raster_erosion_area(l_shape(), eta, 4096);
    CHECK(offset == doctest::Approx(exact).epsilon(1e-6));
    CHECK(std::abs(offset - raster) / raster < 1e-3);
    // Polygon dilation: five convex corners add quarter disks, the reflex corner double counts an eta square.
    CHECK(dilation_area(l_shape(), eta) ==
          doctest::Approx(3.0 + 8.0 * eta + 5.0 * kPi / 4.0 * eta * eta - eta * eta).epsilon(1e-6));

    double prev = area(l_shape());
    for (int i = 1; i <= 12; ++i) {
        const double a = erosion_area(l_shape(), 0.05 * i);
        CHECK(a <= prev + 1e-12);
        prev = a;
    }
}

TEST_CASE("intersection with an eroded domain") {
    const auto A = Domain::rectangle(0, 0, 1, 1), B = Domain::rectangle(0.5, 0, 1, 1);
    // B^{-0.1} = [0.6, 1.4] x [0.1, 0.9].
    CHECK(intersection_eroded_area(A, B, 0.1) == doctest::Approx(0.4 * 0.8));
    CHECK(intersection_eroded_area(A, A, 0.0) == doctest::Approx(1.0));
    CHECK(intersection_diam(A, B) == doctest::Approx(std::hypot(0.5, 1.0)));
    CHECK(intersection_diam(A, Domain::rectangle(2, 2, 1, 1)) == 0.0);
}

TEST_CASE("domain descriptors round trip") {
    for (const auto& D : {Domain::rectangle(0.25, -1, 2, 0.5), Domain::disk(1, 2, 0.3), l_shape()}) {
        const auto back = parse_domain(D.describe());
        CHECK(back.describe() == D.describe());
        CHECK(area(back) == area(D));
    }
    CHECK_THROWS_AS(parse_domain("triangle 0 0 1"), InvalidArgument);
    CHECK_THROWS_AS(parse_domain("rectangle 0 0 1"), InvalidArgument);
    CHECK_THROWS_AS(parse_domain("disk 0 0 x"), InvalidArgument);
}

TEST_CASE("clipped segment lengths") {
    CHECK(clipped_length(Domain::rectangle(0, 0, 1, 1), {-1, 0.5}, {2, 0.5}) == doctest::Approx(1.0));
    CHECK(clipped_length(Domain::disk(0, 0, 1), {-2, 0}, {2, 0}) == doctest::Approx(2.0));
    CHECK(clipped_length(l_shape(), {-1, 1.5}, {3, 1.5}) == doctest::Approx(1.0));
}

TEST_CASE("nodal length of analytic test fields") {
    const auto sq = Domain::rectangle(0, 0, 1, 1);
    const auto g = node_grid({0, 0}, {1, 1}, 1.0 / 256.0);
    const auto res = nodal_length(sample(g, stripes), sq);
    CHECK(res.length == doctest::Approx(2.0).epsilon(5e-4));
    CHECK(res.grid_spacing == doctest::Approx(1.0 / 256.0));

    const auto g2 = node_grid({-1, -1}, {1, 1}, 1.0 / 256.0);
    const auto box = Domain::rectangle(-1, -1, 2, 2);
    CHECK(std::abs(nodal_length(sample(g2, circle), box).length - kPi) < 2e-3);

    const auto flat = nodal_length(sample(g, positive), sq);
    CHECK(flat.length == 0.0);
    CHECK(flat.segment_count == 0);

    const auto small = Domain::rectangle(0.5, 0.5, 0.2, 0.2);
    CHECK_THROWS_AS(nodal_length(sample(node_grid({0, 0}, {0.3, 0.3}, 0.01), stripes), small), InvalidArgument);
}

TEST_CASE("nodal length refinement converges at second order") {
    const auto box = Domain::rectangle(-1, -1, 2, 2);
    double err[3];
    for (int k = 0; k < 3; ++k) {
        const double d = 1.0 / (16 << k);
        err[k] = std::abs(nodal_length(sample(node_grid({-1, -1}, {1, 1}, d), circle), box).length - kPi);
    }
    CHECK(err[1] < 0.35 * err[0]);
    CHECK(err[2] < 0.35 * err[1]);
}

TEST_CASE("nodal length is additive over grid-aligned splits") {
    const auto g = node_grid({0, 0}, {2, 1}, 1.0 / 128.0);
    const auto f = sample(g, tilted);
    const auto whole = nodal_length(f, Domain::rectangle(0, 0, 2, 1)).length;
    const auto parts = nodal_lengths(f, {Domain::rectangle(0, 0, 0.75, 1), Domain::rectangle(0.75, 0, 1.25, 1)});
    CHECK(parts[0].length + parts[1].length == doctest::Approx(whole).epsilon(1e-12));
    const auto nested = nodal_lengths(f, {Domain::rectangle(0.25, 0.25, 0.5, 0.5), Domain::rectangle(0, 0, 1, 1)});
    CHECK(nested[0].length <= nested[1].length);
}

TEST_CASE("vortex counting") {
    const auto g = node_grid({0, 0}, {1, 1}, 1.0 / 256.0);
    const auto re = sample(g, sin_x), im = sample(g, sin_y);
    const auto v = vortex_count(re, im, Domain::rectangle(0.25, 0.25, 0.5, 0.5));
    REQUIRE(v.count == 1);
    CHECK(v.locations[0][0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(v.locations[0][1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(v.residuals[0] < 1e-8);

    // Scaling both components leaves the count unchanged.
    auto re2 = re, im2 = im;
    for (auto& x : re2.value)
        x *= 3.5;
    for (auto& x : im2.value)
        x *= 3.5;
    const auto box = Domain::rectangle(0.05, 0.05, 0.9, 0.9);
    CHECK(vortex_count(re2, im2, box).count == vortex_count(re, im, box).count);
    CHECK(vortex_count(re, im, box).count == 1);

    // Same sign pattern in both components and no common zero.
    const auto p1 = sample(g, positive);
    CHECK(vortex_count(p1, p1, Domain::rectangle(0, 0, 1, 1)).count == 0);

    const auto other = sample(node_grid({0, 0}, {1, 1}, 1.0 / 128.0), sin_y);
    CHECK_THROWS_AS(vortex_count(re, other, box), InvalidArgument);
}
