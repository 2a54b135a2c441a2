#pragma once

#include <vector>

namespace berry {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2/2) (weights sum to sqrt(2 pi)).
QuadratureRule gauss_hermite(int n);

/// Generalized Gauss-Laguerre rule for the weight t^alpha exp(-t) on (0, inf).
QuadratureRule gauss_laguerre(int n, double alpha);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Standard normal quantile, accurate to rounding.
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

} // namespace berry
