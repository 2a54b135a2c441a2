#include "berry/stats.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/students_t.hpp>

#include "berry/errors.hpp"
#include "berry/quadrature.hpp"

namespace berry {

double ks_normal(std::vector<double> x) {
    if (x.empty())
        throw InvalidArgument("ks_normal: empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = normal_cdf(x[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

SummaryStats summarize(const std::vector<std::vector<double>>& columns) {
    if (columns.empty())
        throw InvalidArgument("summarize: no columns");
    const std::size_t n = columns.front().size();
    if (n < 2)
        throw InvalidArgument("summarize: need at least two replicates");
    for (const auto& c : columns)
        if (c.size() != n)
            throw InvalidArgument("summarize: ragged columns");
    const std::size_t m = columns.size();
    SummaryStats s;
    s.n = n;
    const double dn = static_cast<double>(n);
    std::vector<std::vector<double>> centred(m, std::vector<double>(n));
    for (std::size_t d = 0; d < m; ++d) {
        const auto& x = columns[d];
        double mean = 0.0;
        for (double v : x)
            mean += v;
        mean /= dn;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double c = x[r] - mean;
            centred[d][r] = c;
            m2 += c * c;
            m3 += c * c * c;
            m4 += c * c * c * c;
        }
        m2 /= dn;
        m3 /= dn;
        m4 /= dn;
        const double var = m2 * dn / (dn - 1.0);
        s.mean.push_back(mean);
        s.variance.push_back(var);
        s.skewness.push_back(m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0);
        s.excess_kurtosis.push_back(m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0);
        std::vector<double> z(n);
        const double sd = std::sqrt(var);
        for (std::size_t r = 0; r < n; ++r)
            z[r] = sd > 0.0 ? centred[d][r] / sd : 0.0;
        s.ks_distance.push_back(ks_normal(std::move(z)));
        s.mean_se.push_back(std::sqrt(var / dn));
        // Var of the sample variance, (m4 - m2^2 (n-3)/(n-1)) / n.
        s.variance_se.push_back(std::sqrt(std::max(0.0, (m4 - m2 * m2 * (dn - 3.0) / (dn - 1.0)) / dn)));
    }
    s.covariance.assign(m, std::vector<double>(m));
    s.correlation.assign(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double c = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                c += centred[i][r] * centred[j][r];
            c /= dn - 1.0;
            s.covariance[i][j] = s.covariance[j][i] = c;
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double den = std::sqrt(s.covariance[i][i] * s.covariance[j][j]);
            double c = i == j ? 1.0 : (den > 0.0 ? s.covariance[i][j] / den : 0.0);
            s.correlation[i][j] = std::clamp(c, -1.0, 1.0);
        }
    return s;
}

double min_eigenvalue(const std::vector<std::vector<double>>& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    if (n == 0)
        return 0.0;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = m[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& y_se) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n || (!y_se.empty() && y_se.size() != n))
        throw InvalidArgument("linear_fit: need at least three matching points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw InvalidArgument("linear_fit: x values must differ");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        rss += e * e;
    }
    const double dof = static_cast<double>(n - 2);
    f.slope_se = std::sqrt(rss / dof / sxx);
    if (!y_se.empty()) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            v += (x[i] - mx) * (x[i] - mx) * y_se[i] * y_se[i];
        f.slope_se_mc = std::sqrt(v) / sxx;
    }
    const double t = boost::math::quantile(boost::math::complement(boost::math::students_t(dof), 0.025));
    const double half = t * std::max(f.slope_se, f.slope_se_mc);
    f.slope_ci_low = f.slope - half;
    f.slope_ci_high = f.slope + half;
    return f;
}

} // namespace berry
