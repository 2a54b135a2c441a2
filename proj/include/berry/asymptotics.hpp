#pragma once

#include <array>
#include <string>
#include <vector>

#include "berry/geometry.hpp"
#include "berry/specfun.hpp"

namespace berry {

/// Leading constants of the fourth-chaos covariances, in units of area(D1 ∩ D2) log E / (pi^3 E).
struct RateTable {
    SquareMatrix<6> a_rates;
    std::array<std::array<int, 10>, 10> n_table;
    /// Cov(b_i, b_j) constant is n_ij * b_scale.
    double b_scale = 1.0 / 16.0;

    double a_rate(int i, int j) const { return a_rates[i - 1][j - 1]; }
    double b_rate(int i, int j) const { return n_table[i - 1][j - 1] * b_scale; }
};

const RateTable& rate_table();

/// One of a_1..a_6 (kind 'a') or b_1..b_10 (kind 'b').
struct Functional {
    char kind = 'a';
    int index = 1;

    /// Hermite degrees on (B, d~1 B, d~2 B) for 'a', or on (B, d~1 B, d~2 B, B^, d~1 B^, d~2 B^) for 'b'.
    std::vector<int> degrees() const;
    std::string name() const;
};

Functional parse_functional(const std::string& name);

struct FunctionalPair {
    Functional first;
    Functional second;
};

/// "a1,a4" or "b2,b7".
FunctionalPair parse_pair(const std::string& text);
std::vector<FunctionalPair> all_a_pairs();
std::vector<FunctionalPair> all_b_pairs();

/// Exponents over the six distinct normalized kernels (r00, r01, r02, r11, r22, r12).
using KernelMonomial = std::array<int, 6>;

/// Covariance integrand of a pair as a polynomial in the normalized kernels.
struct KernelPolynomial {
    std::vector<std::pair<double, KernelMonomial>> terms;
    double evaluate(const SquareMatrix<3>& rt) const;
};

KernelPolynomial covariance_integrand(const FunctionalPair& pair);

/// Converts a 3x3 exponent matrix over rtilde[k][l] into a signed kernel monomial.
std::pair<double, KernelMonomial> monomial_from_exponents(const SquareMatrix<3>& q);

struct RadialOptions {
    bool leading_order = false;
    int angular_points = 256;
    int panels_per_unit = 4;   // panels per unit of psi
    int points_per_panel = 16; // Gauss-Legendre nodes
};

/// Integrals over all 126 degree-4 kernel monomials sharing one pass of the radial quadrature.
class MonomialIntegrals {
public:
    static const std::vector<KernelMonomial>& monomials();
    static std::size_t index_of(const KernelMonomial& m);

    double operator[](std::size_t i) const { return values_[i]; }
    double integrate(const KernelPolynomial& p) const;

    std::vector<double> values_;
};

/// int_0^{diam(D1∩D2)} area(D1 ∩ D2^{-phi}) int_0^{2pi} monomial(phi cos, phi sin) phi dtheta dphi,
/// for every monomial. With leading_order the kernels are replaced by their large-distance forms and
/// the radial integral starts at psi = sqrt(E) phi = 1.
MonomialIntegrals reduced_monomial_integrals(const Domain& D1, const Domain& D2, double E,
                                             const RadialOptions& opt = {});

/// int_{D1} int_{D2} monomial(x - y) dx dy for rectangles, via the exact covariogram.
MonomialIntegrals full_monomial_integrals(const Domain& D1, const Domain& D2, double E,
                                          const RadialOptions& opt = {});

/// Reduced integral of prod rtilde[k][l]^{q[k][l]}; the exponents must sum to 4.
double radial_reduction(const SquareMatrix<3>& q, const Domain& D1, const Domain& D2, double E,
                        const RadialOptions& opt = {});

struct RateCheck {
    std::string pair;
    double E = 0.0;
    double numeric = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
};

RateCheck covariance_rate_check(const FunctionalPair& pair, double E, const Domain& D1, const Domain& D2,
                                const RadialOptions& opt = {});
/// All requested pairs from one set of monomial integrals.
std::vector<RateCheck> covariance_rate_checks(const std::vector<FunctionalPair>& pairs, double E, const Domain& D1,
                                              const Domain& D2, const RadialOptions& opt = {});

double predicted_covariance(const FunctionalPair& pair, double E, double overlap_area);

struct OscillatoryRemainder {
    double cos8 = 0.0;     // channel with cos(8 pi psi - pi)
    double cos4 = 0.0;     // channel with cos(4 pi psi - pi/2)
    double constant = 0.0; // the 3/8 channel
    double unmodulated = 0.0;
    double magnitude = 0.0; // |cos8| + |cos4|
};

/// The cos^4 split of the leading Cov(a1, a1) integral on D x D, radial range [1, sqrt(E) diam D].
OscillatoryRemainder oscillatory_remainder_check(double E, const Domain& D);

struct Predictions {
    std::vector<double> mean_length;
    std::vector<double> mean_count;
    std::vector<double> var_length;
    std::vector<double> var_count;
    std::vector<std::vector<double>> C;
};

Predictions predictions(double E, const std::vector<Domain>& domains);

} // namespace berry
