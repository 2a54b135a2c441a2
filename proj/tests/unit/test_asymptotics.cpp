#include <doctest.h>

#include <cmath>
#include <numbers>

#include "berry/asymptotics.hpp"
#include "berry/chaos.hpp"
#include "berry/errors.hpp"

using namespace berry;

namespace {

constexpr double kPi = std::numbers::pi;

// Numeric covariance in units of area log E / (pi^3 E).
double rate_units(double numeric, double E, double overlap) { return numeric * kPi * kPi * kPi * E / (overlap * std::log(E)); }

SquareMatrix<3> q_single(int k, int l, int power) {
    SquareMatrix<3> q{};
    q[k][l] = power;
    return q;
}

} // namespace

TEST_CASE("rate table entries") {
    const auto& t = rate_table();
    CHECK(t.a_rate(1, 1) == 9.0);
    CHECK(t.a_rate(2, 2) == doctest::Approx(315.0 / 8.0));
    CHECK(t.a_rate(1, 4) == doctest::Approx(9.0 / 2.0));
    CHECK(t.b_rate(1, 1) == doctest::Approx(24.0 / 16.0));
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 6; ++j)
            CHECK(t.a_rate(i, j) == t.a_rate(j, i));
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j)
            CHECK(t.b_rate(i, j) == t.b_rate(j, i));
}

TEST_CASE("functional and pair parsing") {
    CHECK(parse_functional("a4").degrees() == std::vector<int>{0, 2, 2});
    CHECK(parse_functional("b1").degrees().size() == 6);
    CHECK(parse_pair("a1,a6").second.index == 6);
    CHECK(parse_pair("b2:b7").first.kind == 'b');
    CHECK_THROWS_AS(parse_pair("a1,b2"), InvalidArgument);
    CHECK_THROWS_AS(parse_pair("a7,a1"), InvalidArgument);
    CHECK_THROWS_AS(parse_pair("c1,c2"), InvalidArgument);
    CHECK_THROWS_AS(parse_pair("a1"), InvalidArgument);
    CHECK(all_a_pairs().size() == 21);
    CHECK(all_b_pairs().size() == 55);
}

TEST_CASE("covariance integrand matches the diagram formula") {
    const auto ks = kernel_set(3.0, {0.13, -0.07});
    std::vector<std::vector<double>> C(3, std::vector<double>(3));
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            C[k][l] = ks.rtilde[k][l];
    for (const auto& p : all_a_pairs()) {
        const double direct = hermite_product_moment(p.first.degrees(), p.second.degrees(), C);
        CHECK(covariance_integrand(p).evaluate(ks.rtilde) == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("radial reduction rejects exponents not summing to four") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    CHECK_THROWS_AS(radial_reduction(q_single(0, 0, 3), D, D, 1e4), InvalidArgument);
    CHECK_THROWS_AS(radial_reduction(q_single(1, 2, 5), D, D, 1e4), InvalidArgument);
}

TEST_CASE("fourth moment of the kernel approaches its logarithmic law") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    // int int r^4 ~ (3/8) area log E / (pi^3 E).
    double previous = INFINITY;
    for (double E : {1e4, 1e5, 1e6}) {
        const double v = rate_units(radial_reduction(q_single(0, 0, 4), D, D, E), E, 1.0) / 0.375;
        CHECK(v > 1.0);
        CHECK(v < previous);
        previous = v;
    }
    RadialOptions lead;
    lead.leading_order = true;
    const double e1 = 1e8, e2 = 1e10;
    const double slope = (radial_reduction(q_single(0, 0, 4), D, D, e2, lead) * e2 -
                          radial_reduction(q_single(0, 0, 4), D, D, e1, lead) * e1) *
                         kPi * kPi * kPi / (std::log(e2) - std::log(e1));
    CHECK(slope == doctest::Approx(0.375).epsilon(1e-3));
}

TEST_CASE("leading-order slopes reproduce the rate table") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    RadialOptions lead;
    lead.leading_order = true;
    const double e1 = 1e8, e2 = 1e10;
    auto pairs = all_a_pairs();
    const auto bp = all_b_pairs();
    pairs.insert(pairs.end(), bp.begin(), bp.end());
    const auto c1 = covariance_rate_checks(pairs, e1, D, D, lead);
    const auto c2 = covariance_rate_checks(pairs, e2, D, D, lead);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double slope = (c2[i].numeric * e2 - c1[i].numeric * e1) * kPi * kPi * kPi / (std::log(e2) - std::log(e1));
        const double expect = c2[i].predicted * e2 * kPi * kPi * kPi / std::log(e2);
        CAPTURE(c1[i].pair);
        CHECK(std::abs(slope - expect) < 1e-3 * std::max(1.0, std::abs(expect)));
    }
}

TEST_CASE("finite-energy rate ratios move toward one") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    const auto lo = covariance_rate_checks(all_a_pairs(), 1e4, D, D);
    const auto hi = covariance_rate_checks(all_a_pairs(), 1e6, D, D);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        CAPTURE(lo[i].pair);
        CHECK(std::abs(hi[i].ratio - 1.0) < std::abs(lo[i].ratio - 1.0));
    }
}

TEST_CASE("reduced integral agrees with the full double integral") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    const double E = 1e3;
    const auto red = reduced_monomial_integrals(D, D, E);
    const auto full = full_monomial_integrals(D, D, E);
    for (const auto& p : {parse_pair("a1,a1"), parse_pair("a2,a5"), parse_pair("b3,b3")}) {
        const auto poly = covariance_integrand(p);
        CHECK(red.integrate(poly) == doctest::Approx(full.integrate(poly)).epsilon(2e-3));
    }
    CHECK_THROWS_AS(full_monomial_integrals(Domain::disk(0, 0, 1), D, E), UnsupportedCase);
}

TEST_CASE("covariance follows the overlap area") {
    const auto A = Domain::rectangle(0, 0, 1, 1);
    const auto B = Domain::rectangle(0.5, 0, 1, 1);
    const auto far = Domain::rectangle(3, 0, 1, 1);
    const auto pair = parse_pair("a1,a1");
    const double E = 1e6;
    const double self = covariance_rate_check(pair, E, A, A).numeric;
    const double half = covariance_rate_check(pair, E, A, B).numeric;
    CHECK(half / self == doctest::Approx(0.5).epsilon(0.05));
    const auto disjoint = covariance_rate_check(pair, E, A, far);
    CHECK(disjoint.predicted == 0.0);
    CHECK(disjoint.numeric == 0.0);
    CHECK(std::isnan(disjoint.ratio));

    // Adjacent squares: the full covariance is a boundary effect, small against the overlap law.
    const auto touch = Domain::rectangle(1, 0, 1, 1);
    const auto poly = covariance_integrand(pair);
    double previous = INFINITY;
    for (double e : {1e3, 1e4, 1e5}) {
        const double v = rate_units(full_monomial_integrals(A, touch, e).integrate(poly), e, 1.0) / rate_table().a_rate(1, 1);
        CHECK(std::abs(v) < previous);
        previous = std::abs(v);
    }
    CHECK(previous < 0.1);
}

TEST_CASE("nested domains have increasing covariance") {
    const auto pair = parse_pair("a1,a1");
    double previous = 0.0;
    for (double s : {0.25, 0.5, 1.0}) {
        const auto D = Domain::rectangle(0, 0, s, s);
        const double v = covariance_rate_check(pair, 1e5, D, D).numeric;
        CHECK(v > previous);
        previous = v;
    }
}

TEST_CASE("oscillatory channels are lower order") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    for (double x : {0.1, 0.7, 2.3})
        CHECK(std::pow(std::cos(x), 4) ==
              doctest::Approx(0.375 + 0.5 * std::cos(2 * x) + 0.125 * std::cos(4 * x)));
    double previous = INFINITY;
    for (double E : {1e3, 1e4, 1e5}) {
        const auto r = oscillatory_remainder_check(E, D);
        const double rel = r.magnitude / std::abs(r.constant);
        CHECK(rel < previous);
        previous = rel;
    }
    CHECK(previous < 0.05);
}

TEST_CASE("predictions") {
    const double E = 400.0;
    const std::vector<Domain> d{Domain::rectangle(0, 0, 1, 1), Domain::rectangle(0.5, 0, 1, 1), Domain::disk(5, 5, 0.5)};
    const auto p = predictions(E, d);
    CHECK(p.mean_length[0] == doctest::Approx(kPi * 20.0 / std::sqrt(2.0)));
    CHECK(p.mean_count[2] == doctest::Approx(kPi * E * kPi * 0.25));
    CHECK(p.var_length[0] == doctest::Approx(std::log(E) / (512.0 * kPi)));
    CHECK(p.var_count[0] == doctest::Approx(11.0 * E * std::log(E) / (32.0 * kPi)));
    CHECK(p.C[0][0] == doctest::Approx(1.0));
    CHECK(p.C[0][1] == doctest::Approx(0.5));
    CHECK(p.C[0][2] == 0.0);
}
