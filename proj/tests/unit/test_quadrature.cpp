#include <doctest.h>

#include <cmath>
#include <numbers>

#include "berry/quadrature.hpp"

using namespace berry;

TEST_CASE("gauss_hermite integrates Gaussian moments") {
    const auto q = gauss_hermite(20);
    double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double x = q.nodes[i], w = q.weights[i];
        m0 += w;
        m2 += w * x * x;
        m4 += w * std::pow(x, 4);
        m6 += w * std::pow(x, 6);
    }
    const double s = std::sqrt(2.0 * std::numbers::pi);
    CHECK(m0 == doctest::Approx(s).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(s).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0 * s).epsilon(1e-13));
    CHECK(m6 == doctest::Approx(15.0 * s).epsilon(1e-13));
}

TEST_CASE("gauss_legendre is exact for polynomials") {
    const auto q = gauss_legendre(16);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        s += q.weights[i] * (std::pow(q.nodes[i], 30) + std::pow(q.nodes[i], 3));
    CHECK(s == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("gauss_laguerre integrates t^alpha e^-t") {
    const auto q = gauss_laguerre(32, 0.5);
    double m0 = 0, m3 = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        m0 += q.weights[i];
        m3 += q.weights[i] * std::pow(q.nodes[i], 3);
    }
    CHECK(m0 == doctest::Approx(std::tgamma(1.5)).epsilon(1e-12));
    CHECK(m3 == doctest::Approx(std::tgamma(4.5)).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts the normal cdf") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    for (double p : {1e-10, 1e-4, 0.02, 0.3, 0.5, 0.77, 0.999})
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}
