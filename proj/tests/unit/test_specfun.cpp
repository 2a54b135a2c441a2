#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "berry/errors.hpp"
#include "berry/specfun.hpp"
#include "bessel_oracle.hpp"

using namespace berry;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("bessel_j small values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(2, 0.0) == 0.0);
    CHECK(bessel_j(1, -1.3) == doctest::Approx(-bessel_j(1, 1.3)).epsilon(1e-15));
    CHECK(bessel_j(2, -1.3) == doctest::Approx(bessel_j(2, 1.3)).epsilon(1e-15));
}

TEST_CASE("bessel_j first zero of J0") {
    const double u = bessel_j0_first_zero();
    CHECK(u == doctest::Approx(2.404825557695773).epsilon(1e-14));
    CHECK(std::abs(bessel_j(0, u)) < 1e-10);
}

TEST_CASE("bessel_j against the high-precision series") {
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double u = 100.0 * i / 2000.0;
        for (int n = 0; n <= 2; ++n)
            worst = std::max(worst, std::abs(bessel_j(n, u) - bessel_oracle(n, u)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("bessel_j large arguments") {
    // Hankel region far out; compare with the standard library.
    for (double u : {150.0, 999.5, 5000.0, 10000.0})
        for (int n = 0; n <= 2; ++n)
            CHECK(std::abs(bessel_j(n, u) - std::cyl_bessel_j(n, u)) < 1e-10);
}

TEST_CASE("bessel_j rejects bad input") {
    CHECK_THROWS_AS(bessel_j(3, 1.0), InvalidArgument);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(bessel_j(0, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
    CHECK_THROWS_AS(bessel_j(0, std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST_CASE("bessel_j_sequence matches the direct evaluator") {
    for (double u : {0.0, 0.5, 7.0, 40.0, 300.0}) {
        const auto seq = bessel_j_sequence(60, u);
        for (int n = 0; n <= 2; ++n)
            CHECK(std::abs(seq[n] - bessel_j(n, u)) < 1e-12);
    }
}

TEST_CASE("kernel_r") {
    CHECK(kernel_r(1.0, {0.0, 0.0}) == 1.0);
    const double u = bessel_j0_first_zero();
    CHECK(std::abs(kernel_r(1.0, {u / (2.0 * kPi), 0.0})) < 1e-10);
    const Vec2 dx{0.31, -0.17};
    for (double a : {0.3, 1.0, 2.5}) {
        const Vec2 rot{std::cos(a) * dx[0] - std::sin(a) * dx[1], std::sin(a) * dx[0] + std::cos(a) * dx[1]};
        CHECK(kernel_r(7.0, rot) == doctest::Approx(kernel_r(7.0, dx)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(kernel_r(0.0, dx), InvalidArgument);
    CHECK_THROWS_AS(kernel_set(-1.0, dx), InvalidArgument);
}

TEST_CASE("kernel_set special displacements") {
    const double E = 3.0;
    const auto axis = kernel_set(E, {0.2, 0.0});
    CHECK(axis.rij[0][1] == 0.0);
    CHECK(axis.rij[1][0] == 0.0);
    const auto zero = kernel_set(E, {0.0, 0.0});
    CHECK(zero.r == 1.0);
    CHECK(zero.r0i[0] == 0.0);
    CHECK(zero.r0i[1] == 0.0);
    CHECK(zero.rij[0][0] == doctest::Approx(2.0 * kPi * kPi * E));
    CHECK(zero.rij[1][1] == doctest::Approx(2.0 * kPi * kPi * E));
    CHECK(zero.rij[0][1] == 0.0);
}

TEST_CASE("kernel_set first derivative against central differences") {
    const double h = 1e-5;
    const Vec2 dx{0.3 * std::cos(0.7), 0.3 * std::sin(0.7)};
    const auto ks = kernel_set(1.0, dx);
    for (int i = 0; i < 2; ++i) {
        Vec2 p = dx, m = dx;
        p[i] += h;
        m[i] -= h;
        // r_{0,i} = d/dy_i r(x - y) = -d/d(dx_i) r.
        const double fd = -(kernel_r(1.0, p) - kernel_r(1.0, m)) / (2.0 * h);
        CHECK(std::abs(ks.r0i[i] - fd) / std::abs(fd) < 1e-6);
    }
}

TEST_CASE("kernel_set second derivatives against central differences") {
    const double h = 1e-4, E = 1.0;
    const Vec2 dx{0.21, 0.13};
    const auto ks = kernel_set(E, dx);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            // r_{i,j} = d/dx_i d/dy_j r(x - y) = -d^2 r / d(dx_i) d(dx_j).
            auto at = [&](double si, double sj) {
                Vec2 p = dx;
                p[i] += si * h;
                p[j] += sj * h;
                return kernel_r(E, p);
            };
            const double fd = -(at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
            CHECK(std::abs(ks.rij[i][j] - fd) < 1e-5 * 2.0 * kPi * kPi * E);
        }
}

TEST_CASE("kernel_set invariants on random displacements") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (double E : {1.0, 100.0, 10000.0}) {
        const double scale = 2.0 * kPi * kPi * E;
        for (int t = 0; t < 10000; ++t) {
            const Vec2 dx{U(rng), U(rng)};
            const auto ks = kernel_set(E, dx);
            REQUIRE(std::abs(ks.r) <= 1.0 + 1e-12);
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    REQUIRE(std::abs(ks.rtilde[k][l]) <= 1.0 + 1e-12);
            REQUIRE(ks.rtilde[0][0] == ks.r);
            for (int i = 0; i < 2; ++i) {
                REQUIRE(ks.rtilde[0][i + 1] == doctest::Approx(ks.r0i[i] / std::sqrt(scale)).epsilon(1e-12));
                REQUIRE(ks.rtilde[i + 1][0] == doctest::Approx(-ks.rtilde[0][i + 1]).epsilon(1e-12));
                for (int j = 0; j < 2; ++j)
                    REQUIRE(ks.rtilde[i + 1][j + 1] == doctest::Approx(ks.rij[i][j] / scale).epsilon(1e-12));
            }
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    REQUIRE(ks.sigma[a][b] == ks.sigma[b][a]);
            if (t < 1000) {
                Eigen::Matrix<double, 6, 6> S;
                for (int a = 0; a < 6; ++a)
                    for (int b = 0; b < 6; ++b)
                        S(a, b) = ks.sigma[a][b];
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(S, Eigen::EigenvaluesOnly);
                REQUIRE(es.eigenvalues().minCoeff() >= -1e-9 * (1.0 + scale));
            }
        }
    }
}

TEST_CASE("normalized kernels obey the energy scaling law") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double E : {4.0, 250.0, 1e4}) {
        for (int t = 0; t < 200; ++t) {
            const Vec2 dx{U(rng), U(rng)};
            const auto a = kernel_set(E, dx);
            const auto b = kernel_set(1.0, {std::sqrt(E) * dx[0], std::sqrt(E) * dx[1]});
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    REQUIRE(std::abs(a.rtilde[k][l] - b.rtilde[k][l]) < 1e-11);
        }
    }
}

TEST_CASE("asymptotic leading forms") {
    const double E = 1.0;
    const double v = asymptotic_leading(KernelKind::r, E, 12.3, 0.0);
    for (double th : {0.4, 1.9, 4.0})
        CHECK(asymptotic_leading(KernelKind::r, E, 12.3, th) == doctest::Approx(v).epsilon(1e-15));
    CHECK(asymptotic_leading(KernelKind::r02, E, 12.3, 0.0) == 0.0);
    const double phi = 17.1, th = 0.8, psi = std::sqrt(E) * phi;
    CHECK(asymptotic_leading(KernelKind::r11, E, phi, th) ==
          doctest::Approx(2.0 * std::cos(th) * std::cos(th) / (kPi * std::sqrt(psi)) *
                          std::cos(2.0 * kPi * psi - kPi / 4.0)));
    CHECK_THROWS_AS(asymptotic_leading(KernelKind::r, E, 0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(asymptotic_leading(KernelKind::r, E, -1.0, 0.0), InvalidArgument);
}

TEST_CASE("leading forms approximate the kernels to order phi^-3/2") {
    const KernelKind kinds[] = {KernelKind::r, KernelKind::r01, KernelKind::r02,
                                KernelKind::r11, KernelKind::r22, KernelKind::r12};
    for (auto kind : kinds) {
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double phi = 10.0 + 90.0 * i / 4000.0;
            for (int j = 0; j < 16; ++j) {
                const double th = 2.0 * kPi * j / 16.0;
                const double d = std::abs(normalized_kernel(kind, 1.0, phi, th) - asymptotic_leading(kind, 1.0, phi, th)) *
                                 std::pow(phi, 1.5);
                (phi < 40.0 ? lo : hi) = std::max(phi < 40.0 ? lo : hi, d);
            }
        }
        CAPTURE(kernel_name(kind));
        CHECK(lo < 1.0);
        CHECK(hi < 1.0);
        CHECK(hi < 1.5 * lo);
    }
}

TEST_CASE("small-distance laws") {
    double b11 = 0.0, b01 = 0.0, b12 = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double psi = 0.1 * i / 1000.0;
        for (int j = 0; j < 16; ++j) {
            const double th = 2.0 * kPi * j / 16.0 + 0.1;
            b11 = std::max(b11, std::abs(normalized_kernel(KernelKind::r11, 1.0, psi, th) - 1.0) / (psi * psi));
            b01 = std::max(b01, std::abs(normalized_kernel(KernelKind::r01, 1.0, psi, th)) / psi);
            b12 = std::max(b12, std::abs(normalized_kernel(KernelKind::r12, 1.0, psi, th)) / (psi * psi));
        }
    }
    CHECK(b11 < 20.0);
    CHECK(b01 < 10.0);
    CHECK(b12 < 20.0);
}
