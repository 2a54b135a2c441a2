#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "berry/geometry.hpp"
#include "berry/grid.hpp"
#include "berry/sampler.hpp"

namespace berry {

/// Probabilists' Hermite polynomial H_n(x).
double hermite(int n, double x);

/// gamma(z) H_l(z) / l!, the coefficients of the expansion of the delta at level z.
double beta_coeff(int l, double z);

/// Closed values where known (zero by parity, or the small tabulated cases).
std::optional<double> alpha_table(int n, int m);
std::optional<double> zeta_table(int a, int b, int c, int d);

/// Expansion coefficients of the Euclidean norm on R^2. Uses the table when possible.
double alpha_coeff(int n, int m);
/// Quadrature path: periodic trapezoid in angle, 64-node generalized Gauss-Laguerre in radius.
double alpha_coeff_quadrature(int n, int m);

struct QmcEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Expansion coefficients of |XW - YZ| for (X, Y, Z, W) = (d1 B, d2 B, d1 B^, d2 B^).
double zeta_coeff(int a, int b, int c, int d);
/// Randomly shifted Halton estimate over the standard 4D Gaussian; error from the spread across shifts.
QmcEstimate zeta_coeff_qmc(int a, int b, int c, int d, long points = 10'000'000, int shifts = 16,
                           std::uint64_t seed = 1);
/// Several coefficients from one shared point set.
std::vector<QmcEstimate> zeta_coeff_qmc_batch(const std::vector<std::array<int, 4>>& indices,
                                              long points = 10'000'000, int shifts = 16, std::uint64_t seed = 1);

/// Polynomial in cross-covariances C[k][l] = E[X_k Y_l]; exponent index k * ny + l.
struct CovariancePolynomial {
    int nx = 0;
    int ny = 0;
    struct Term {
        double coefficient;
        std::vector<int> exponents;
    };
    std::vector<Term> terms;

    double evaluate(const std::vector<std::vector<double>>& C) const;
};

/// E[prod_k H_{p_k}(X_k) prod_l H_{q_l}(Y_l)] where the X's (and the Y's) are independent
/// standard normals among themselves. Total degree on each side at most 4.
CovariancePolynomial hermite_product_polynomial(const std::vector<int>& p, const std::vector<int>& q);
double hermite_product_moment(const std::vector<int>& p, const std::vector<int>& q,
                              const std::vector<std::vector<double>>& C);

struct ChaosComponent {
    int order = 4;
    double value = 0.0;
    std::vector<double> a;    // a_1..a_6 of B
    std::vector<double> ahat; // a_1..a_6 of B^ (count only)
    std::vector<double> b;    // b_1..b_10 (count only)
    double a_part = 0.0, ahat_part = 0.0, b_part = 0.0;
};

/// sqrt(2 pi^2 E)/128 * (8a1 - a2 - a3 - 2a4 - 8a5 - 8a6).
double length4_combination(const std::vector<double>& a, double E);
/// pi E/64 * (8a1 - a2 - a3 - 2a4 - 8a5 - 8a6).
double count4_a_combination(const std::vector<double>& a, double E);
/// pi E/8 * (2b1 - b2 - b3 - b4 - b5 - b6/4 - b7/4 + 5b8/4 + 5b9/4 - 3b10).
double count4_b_combination(const std::vector<double>& b, double E);

/// Fields sampled at cell centres with gradients. The spacing must not exceed 1/(8 sqrt E).
ChaosComponent fourth_chaos_length(const GridField& f, double E, const Domain& D);
ChaosComponent fourth_chaos_length(const WaveRealization& w, const Domain& D, double delta);
ChaosComponent fourth_chaos_count(const GridField& re, const GridField& im, double E, const Domain& D);
ChaosComponent fourth_chaos_count(const ComplexRealization& w, const Domain& D, double delta);

/// Per-cell contribution to the fourth length chaos (cell area included).
std::vector<double> length4_cell_values(const GridField& f, double E);

/// Fourth chaos of the length from the general expansion sum (independent of the a-combination).
double fourth_chaos_length_expansion(const GridField& f, double E, const Domain& D);
/// Fourth chaos of the count from the general expansion sum with the zeta table.
double fourth_chaos_count_expansion(const GridField& re, const GridField& im, double E, const Domain& D);

/// Boundary integral 1/(8 pi sqrt(2E)) * int_{dD} B <grad B, n>; arclength steps at most 1/(16 sqrt E).
double second_chaos_length(const WaveRealization& w, const Domain& D);
/// Same integral for any field given as x -> (value, d1, d2).
using FieldSampler = std::function<std::array<double, 3>(Vec2)>;
double second_chaos_length(const FieldSampler& field, double E, const Domain& D);

/// Grid spacing check shared by the chaos functionals.
void check_resolution(double spacing, double E);

} // namespace berry
