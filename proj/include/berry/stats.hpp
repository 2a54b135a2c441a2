#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace berry {

/// Sample statistics of several jointly observed series (one column per domain).
struct SummaryStats {
    std::size_t n = 0;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> skewness;
    std::vector<double> excess_kurtosis;
    std::vector<double> ks_distance; // sample-standardized column vs the standard normal
    std::vector<double> mean_se;
    std::vector<double> variance_se;
    std::vector<std::vector<double>> covariance;
    std::vector<std::vector<double>> correlation;
};

/// columns[d][r] is replicate r of series d; every column needs the same length >= 2.
SummaryStats summarize(const std::vector<std::vector<double>>& columns);

/// Kolmogorov-Smirnov distance between the empirical distribution of x and N(0, 1).
double ks_normal(std::vector<double> x);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const std::vector<std::vector<double>>& m);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0; // from residuals
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
    double slope_se_mc = 0.0; // propagated from the per-point standard errors
};

/// Least-squares fit y = intercept + slope x with a 95% t-interval; y_se may be empty.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& y_se = {});

} // namespace berry
