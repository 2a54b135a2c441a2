#include "berry/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "berry/errors.hpp"

namespace berry {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 * v0^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        T(i, i) = diag(i);
        if (i + 1 < n)
            T(i, i + 1) = T(i + 1, i) = off(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        q.weights[i] = mu0 * v * v;
    }
    return q;
}

} // namespace

QuadratureRule gauss_hermite(int n) {
    if (n < 1)
        throw InvalidArgument("gauss_hermite: need at least one node");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n), o(std::max(n - 1, 0));
    for (int i = 1; i < n; ++i)
        o(i - 1) = std::sqrt(double(i));
    return golub_welsch(d, o, std::sqrt(2.0 * std::numbers::pi));
}

QuadratureRule gauss_laguerre(int n, double alpha) {
    if (n < 1 || !(alpha > -1.0))
        throw InvalidArgument("gauss_laguerre: need n >= 1 and alpha > -1");
    Eigen::VectorXd d(n), o(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i)
        d(i) = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < n; ++i)
        o(i - 1) = std::sqrt(i * (i + alpha));
    return golub_welsch(d, o, std::tgamma(alpha + 1.0));
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1)
        throw InvalidArgument("gauss_legendre: need at least one node");
    // Newton on P_n from the Chebyshev initial guess; more accurate than the eigen route.
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        q.nodes[n - 1 - i] = x;
        q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidArgument("normal_quantile: p must lie in (0, 1)");
    // Acklam's rational approximation followed by one Halley step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double lo = 0.02425, hi = 1.0 - lo;
    double x;
    if (p < lo) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= hi) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

} // namespace berry
