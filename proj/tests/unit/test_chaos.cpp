#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>

#include "berry/chaos.hpp"
#include "berry/errors.hpp"
#include "berry/quadrature.hpp"
#include "berry/rng.hpp"

using namespace berry;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// E[prod H_p(X) prod H_q(Y)] by tensor Gauss-Hermite quadrature after writing
// X = Z and Y = C^T Z + L W with L L^T = I - C^T C.
double moment_oracle(const std::vector<int>& p, const std::vector<int>& q, const std::vector<std::vector<double>>& C) {
    const int nx = static_cast<int>(p.size()), ny = static_cast<int>(q.size());
    Eigen::MatrixXd Cm(nx, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            Cm(i, j) = C[i][j];
    const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(ny, ny) - Cm.transpose() * Cm;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    const Eigen::MatrixXd L = ldlt.transpositionsP().transpose() * Eigen::MatrixXd(ldlt.matrixL()) *
                              ldlt.vectorD().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const auto gh = gauss_hermite(8);
    const int dim = nx + ny, n = static_cast<int>(gh.nodes.size());
    std::vector<int> idx(dim, 0);
    double total = 0.0;
    while (true) {
        Eigen::VectorXd z(nx), w(ny);
        double weight = 1.0;
        for (int d = 0; d < dim; ++d) {
            weight *= gh.weights[idx[d]] / kSqrt2Pi;
            (d < nx ? z(d) : w(d - nx)) = gh.nodes[idx[d]];
        }
        const Eigen::VectorXd y = Cm.transpose() * z + L * w;
        double v = weight;
        for (int i = 0; i < nx; ++i)
            v *= hermite(p[i], z(i));
        for (int j = 0; j < ny; ++j)
            v *= hermite(q[j], y(j));
        total += v;
        int d = 0;
        while (d < dim && ++idx[d] == n)
            idx[d++] = 0;
        if (d == dim)
            break;
    }
    return total;
}

GridField constant_field(double v, const Grid& g) {
    GridField f;
    f.grid = g;
    f.value.assign(g.size(), v);
    f.d1.assign(g.size(), 0.0);
    f.d2.assign(g.size(), 0.0);
    return f;
}

} // namespace

TEST_CASE("hermite polynomials") {
    CHECK(hermite(4, 0.0) == 3.0);
    CHECK(hermite(4, 1.0) == -2.0);
    CHECK(hermite(4, 2.0) == -5.0);
    CHECK(hermite(0, 1.7) == 1.0);
    CHECK(hermite(1, 1.7) == 1.7);
    CHECK_THROWS_AS(hermite(-1, 0.0), InvalidArgument);
}

TEST_CASE("hermite orthogonality under Gauss-Hermite quadrature") {
    const auto q = gauss_hermite(20);
    for (int m = 0; m <= 8; ++m)
        for (int n = 0; n <= 8; ++n) {
            double s = 0.0;
            for (std::size_t i = 0; i < q.nodes.size(); ++i)
                s += q.weights[i] * hermite(m, q.nodes[i]) * hermite(n, q.nodes[i]);
            s /= kSqrt2Pi;
            const double expect = m == n ? std::tgamma(n + 1.0) : 0.0;
            CHECK(std::abs(s - expect) < 1e-10 * std::sqrt(std::tgamma(m + 1.0) * std::tgamma(n + 1.0)));
        }
}

TEST_CASE("beta coefficients") {
    CHECK(beta_coeff(0, 0.0) == doctest::Approx(1.0 / kSqrt2Pi));
    CHECK(beta_coeff(1, 0.0) == 0.0);
    CHECK(beta_coeff(3, 0.0) == 0.0);
    CHECK(beta_coeff(2, 0.0) == doctest::Approx(-1.0 / (2.0 * kSqrt2Pi)));
    CHECK(beta_coeff(4, 0.0) == doctest::Approx(3.0 / (24.0 * kSqrt2Pi)));
    const double z = 0.7;
    CHECK(beta_coeff(4, z) ==
          doctest::Approx(std::exp(-z * z / 2) / kSqrt2Pi * (std::pow(z, 4) - 6 * z * z + 3) / 24.0));
}

TEST_CASE("alpha coefficients: table and quadrature") {
    CHECK(alpha_coeff(0, 0) == doctest::Approx(kSqrt2Pi / 2.0));
    CHECK(alpha_coeff(1, 2) == 0.0);
    CHECK(alpha_coeff(3, 3) == 0.0);
    const int cases[][2] = {{0, 0}, {2, 0}, {0, 2}, {4, 0}, {0, 4}, {2, 2}};
    for (const auto& c : cases)
        CHECK(std::abs(alpha_coeff_quadrature(c[0], c[1]) - *alpha_table(c[0], c[1])) < 1e-8);
    CHECK(std::abs(alpha_coeff_quadrature(2, 1)) < 1e-12);
    CHECK(std::abs(alpha_coeff_quadrature(6, 0) - alpha_coeff_quadrature(0, 6)) < 1e-10);
    CHECK_FALSE(alpha_table(6, 0).has_value());
}

TEST_CASE("zeta coefficients: table and quasi Monte Carlo") {
    CHECK(zeta_coeff(1, 1, 1, 1) == -3.0 / 8.0);
    CHECK(zeta_coeff(0, 0, 0, 0) == 1.0);
    CHECK(zeta_coeff(1, 0, 0, 0) == 0.0);
    CHECK(zeta_coeff(2, 1, 0, 1) == 0.0);
    const std::vector<std::array<int, 4>> idx{{0, 0, 0, 0}, {2, 0, 0, 0}, {1, 1, 1, 1}, {2, 0, 0, 2}, {2, 2, 0, 0}, {0, 0, 4, 0}};
    const auto est = zeta_coeff_qmc_batch(idx, 1'000'000, 16, 7);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double t = *zeta_table(idx[i][0], idx[i][1], idx[i][2], idx[i][3]);
        CAPTURE(i);
        CHECK(est[i].std_error < 5e-3);
        CHECK(std::abs(est[i].value - t) < 4.0 * est[i].std_error + 1e-4);
    }
}

TEST_CASE("diagram formula moments") {
    for (double r : {-0.8, -0.3, 0.0, 0.45, 0.9}) {
        const std::vector<std::vector<double>> C{{r}};
        CHECK(hermite_product_moment({4}, {4}, C) == doctest::Approx(24.0 * std::pow(r, 4)).epsilon(1e-12));
        CHECK(moment_oracle({4}, {4}, C) == doctest::Approx(24.0 * std::pow(r, 4)).epsilon(1e-9));
        CHECK(hermite_product_moment({2}, {2}, C) == doctest::Approx(2.0 * r * r).epsilon(1e-12));
    }
    CHECK(hermite_product_moment({4}, {2}, {{0.5}}) == 0.0);
    CHECK_THROWS_AS(hermite_product_moment({5}, {5}, {{0.5}}), UnsupportedCase);
    CHECK_THROWS_AS(hermite_product_moment({3, 2}, {5, 0}, {{0.1, 0.1}, {0.1, 0.1}}), UnsupportedCase);
}

TEST_CASE("diagram formula against the quadrature oracle on kernel covariances") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> cases{
        {{0, 2, 2}, {0, 2, 2}}, {{4, 0, 0}, {0, 2, 2}}, {{2, 2, 0}, {2, 0, 2}}, {{0, 4, 0}, {2, 2, 0}}, {{1, 1, 2}, {2, 1, 1}}};
    for (int t = 0; t < 100; ++t) {
        const auto ks = kernel_set(1.0, {U(rng), U(rng)});
        std::vector<std::vector<double>> C(3, std::vector<double>(3));
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                C[k][l] = ks.rtilde[k][l];
        for (const auto& [p, q] : cases)
            REQUIRE(hermite_product_moment(p, q, C) == doctest::Approx(moment_oracle(p, q, C)).epsilon(1e-9).scale(1.0));
        // Cov(a4, a4) integrand: 4 (r11^2 r22^2 + r12^4 + 4 r11 r22 r12^2).
        const double r11 = C[1][1], r22 = C[2][2], r12 = C[1][2];
        REQUIRE(hermite_product_moment({0, 2, 2}, {0, 2, 2}, C) ==
                doctest::Approx(4.0 * (r11 * r11 * r22 * r22 + std::pow(r12, 4) + 4.0 * r11 * r22 * r12 * r12)));
    }
}

TEST_CASE("fourth chaos of a constant field") {
    const auto D = Domain::rectangle(0, 0, 1, 1);
    const double E = 100.0;
    const auto g = midpoint_grid({0, 0}, {1, 1}, 1.0 / (16.0 * std::sqrt(E)));
    const auto f = constant_field(0.5, g);
    const auto c = fourth_chaos_length(f, E, D);
    CHECK(c.a[0] == doctest::Approx(hermite(4, 0.5) * area(D)).epsilon(1e-12));
    CHECK(c.a[0] == doctest::Approx(std::pow(0.5, 4) - 6 * 0.25 + 3).epsilon(1e-12));
    CHECK(c.value == length4_combination(c.a, E));
}

TEST_CASE("chaos functionals on realizations") {
    const double E = 100.0;
    const auto D = Domain::rectangle(0, 0, 1, 1);
    WaveSpec s;
    s.E = E;
    s.seed = 4;
    const auto w = sample_complex(s);
    const auto g = midpoint_grid({0, 0}, {1, 1}, 1.0 / (16.0 * std::sqrt(E)));
    const auto re = eval_grid(w.re, g, true), im = eval_grid(w.im, g, true);

    const auto L = fourth_chaos_length(re, E, D);
    CHECK(L.value == doctest::Approx(length4_combination(L.a, E)).epsilon(1e-14));
    CHECK(L.value == doctest::Approx(fourth_chaos_length_expansion(re, E, D)).epsilon(1e-10));

    const auto N = fourth_chaos_count(re, im, E, D);
    REQUIRE(N.b.size() == 10);
    CHECK(N.value == doctest::Approx(count4_a_combination(N.a, E) + count4_a_combination(N.ahat, E) +
                                     count4_b_combination(N.b, E))
                         .epsilon(1e-13));
    CHECK(N.a_part == doctest::Approx(count4_a_combination(N.a, E)));
    CHECK(N.value == doctest::Approx(fourth_chaos_count_expansion(re, im, E, D)).epsilon(1e-9));
    // The a-part of the count depends on the real component only.
    const auto N2 = fourth_chaos_count(re, re, E, D);
    CHECK(N2.a == N.a);

    CHECK_THROWS_AS(check_resolution(1.0 / (7.0 * std::sqrt(E)), E), ResolutionError);
    const auto coarse = midpoint_grid({0, 0}, {1, 1}, 1.0 / (6.0 * std::sqrt(E)));
    CHECK_THROWS_AS(fourth_chaos_length(eval_grid(w.re, coarse, true), E, D), ResolutionError);
}

TEST_CASE("fourth chaos components are centred") {
    const double E = 100.0;
    const auto D = Domain::rectangle(0, 0, 1, 1);
    const auto g = midpoint_grid({0, 0}, {1, 1}, 1.0 / (16.0 * std::sqrt(E)));
    const int n = 400;
    double sl = 0, sll = 0, sn = 0, snn = 0;
    for (int i = 0; i < n; ++i) {
        WaveSpec s;
        s.E = E;
        s.seed = derive_seed(99, i);
        const auto w = sample_complex(s);
        const auto re = eval_grid(w.re, g, true), im = eval_grid(w.im, g, true);
        const double l = fourth_chaos_length(re, E, D).value, c = fourth_chaos_count(re, im, E, D).value;
        sl += l;
        sll += l * l;
        sn += c;
        snn += c * c;
    }
    const double ml = sl / n, mn = sn / n;
    CHECK(std::abs(ml) < 3.0 * std::sqrt((sll / n - ml * ml) / n));
    CHECK(std::abs(mn) < 3.0 * std::sqrt((snn / n - mn * mn) / n));
}

TEST_CASE("second chaos boundary integral") {
    const auto disk = Domain::disk(0.1, -0.2, 0.6);
    const auto constant = [](Vec2) { return std::array<double, 3>{1.5, 0.0, 0.0}; };
    CHECK(second_chaos_length(constant, 50.0, disk) == 0.0);
    CHECK(second_chaos_length(constant, 50.0, Domain::rectangle(0, 0, 1, 1)) == 0.0);

    // Divergence theorem: the boundary integral equals (1/(16 pi sqrt(2E))) int_D Laplacian(B^2),
    // with Laplacian(B^2) = 2 |grad B|^2 - 8 pi^2 E B^2.
    const double E = 20.0;
    WaveSpec s;
    s.E = E;
    s.seed = 5;
    const auto w = sample_wave(s);
    const auto gl = gauss_legendre(64);
    const int rings = 8, sectors = 256;
    double area_integral = 0.0;
    const auto& d = std::get<Disk>(disk.shape());
    for (int ring = 0; ring < rings; ++ring)
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double r = d.radius * (ring + 0.5 + 0.5 * gl.nodes[q]) / rings;
            const double wr = 0.5 * gl.weights[q] * d.radius / rings * r;
            for (int k = 0; k < sectors; ++k) {
                const double t = 2.0 * kPi * k / sectors;
                const auto vg = w.value_gradient({d.center[0] + r * std::cos(t), d.center[1] + r * std::sin(t)});
                const double lap = 2.0 * (vg[1] * vg[1] + vg[2] * vg[2]) - 8.0 * kPi * kPi * E * vg[0] * vg[0];
                area_integral += wr * 2.0 * kPi / sectors * lap;
            }
        }
    const double expect = area_integral / (16.0 * kPi * std::sqrt(2.0 * E));
    CHECK(second_chaos_length(w, disk) == doctest::Approx(expect).epsilon(0.01));
}
