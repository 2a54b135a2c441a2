#include "berry/specfun.hpp"

#include <cmath>
#include <numbers>

#include "berry/errors.hpp"

namespace berry {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 12.0;
constexpr double kZeroDisplacement = 1e-14;

double series_j(int n, double u) {
    const double h = 0.5 * u;
    const double h2 = h * h;
    double term = 1.0;
    for (int i = 1; i <= n; ++i)
        term *= h / i;
    double sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= -h2 / (double(m) * double(m + n));
        sum += term;
        if (std::abs(term) < 1e-18 && m > h)
            break;
    }
    return sum;
}

// Hankel expansion, summed until the terms stop decreasing or drop below rounding.
double hankel_j(int n, double u) {
    const double mu = 4.0 * n * n;
    double p = 1.0, q = 0.0;
    double t = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        t *= (mu - odd * odd) / (k * 8.0 * u);
        if (std::abs(t) > std::abs(prev) || std::abs(t) < 1e-17)
            break;
        switch (k % 4) {
        case 1: q += t; break;
        case 2: p -= t; break;
        case 3: q -= t; break;
        default: p += t; break;
        }
        prev = t;
    }
    const double chi = u - (0.5 * n + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * u)) * (p * std::cos(chi) - q * std::sin(chi));
}

void check_energy(double E) {
    if (!(E > 0.0) || !std::isfinite(E))
        throw InvalidArgument("energy must be positive and finite");
}

} // namespace

double bessel_j(int order, double u) {
    if (order < 0 || order > 2)
        throw InvalidArgument("bessel_j: order must be 0, 1 or 2");
    if (!std::isfinite(u))
        throw InvalidArgument("bessel_j: argument must be finite");
    const double sign = (u < 0.0 && order == 1) ? -1.0 : 1.0;
    const double a = std::abs(u);
    return sign * (a <= kSeriesLimit ? series_j(order, a) : hankel_j(order, a));
}

std::vector<double> bessel_j_sequence(int nmax, double u) {
    if (nmax < 0)
        throw InvalidArgument("bessel_j_sequence: negative order");
    if (!std::isfinite(u))
        throw InvalidArgument("bessel_j_sequence: argument must be finite");
    std::vector<double> out(nmax + 1, 0.0);
    const double a = std::abs(u);
    if (a < 1e-300) {
        out[0] = 1.0;
        return out;
    }
    const double top = std::max<double>(nmax, a);
    int start = static_cast<int>(top + 30.0 + 10.0 * std::cbrt(top));
    start += start % 2;
    // Backward recurrence J_{n-1} = (2n/u) J_n - J_{n+1}, normalized by J_0 + 2 sum J_{2k} = 1.
    double jp = 0.0, j = 1e-30, norm = 0.0;
    for (int n = start; n >= 1; --n) {
        const double jm = (2.0 * n / a) * j - jp;
        jp = j;
        j = jm;
        if (n - 1 <= nmax)
            out[n - 1] = jm;
        if ((n - 1) % 2 == 0 && n - 1 > 0)
            norm += 2.0 * jm;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (int i = n - 1; i <= nmax; ++i)
                out[i] *= 1e-250;
        }
    }
    norm += j;
    for (double& v : out)
        v /= norm;
    if (u < 0.0)
        for (int n = 1; n <= nmax; n += 2)
            out[n] = -out[n];
    return out;
}

double kernel_r(double E, Vec2 dx) {
    check_energy(E);
    return bessel_j(0, wavenumber(E) * std::hypot(dx[0], dx[1]));
}

SquareMatrix<3> rtilde_from_bessel(double j0, double j1, double j2, double c, double s) {
    SquareMatrix<3> t{};
    t[0][0] = j0;
    t[0][1] = std::numbers::sqrt2 * c * j1;
    t[0][2] = std::numbers::sqrt2 * s * j1;
    t[1][0] = -t[0][1];
    t[2][0] = -t[0][2];
    t[1][1] = j0 + (1.0 - 2.0 * c * c) * j2;
    t[2][2] = j0 + (1.0 - 2.0 * s * s) * j2;
    t[1][2] = t[2][1] = -2.0 * c * s * j2;
    return t;
}

KernelSet kernel_set(double E, Vec2 dx) {
    check_energy(E);
    const double k = wavenumber(E);
    const double scale = 2.0 * kPi * kPi * E;
    const double rho = std::hypot(dx[0], dx[1]);
    KernelSet ks;
    if (rho < kZeroDisplacement) {
        ks.r = 1.0;
        ks.r0i = {0.0, 0.0};
        ks.rij = {{{scale, 0.0}, {0.0, scale}}};
        ks.rtilde = rtilde_from_bessel(1.0, 0.0, 0.0, 1.0, 0.0);
    } else {
        const double u = k * rho;
        const double j0 = bessel_j(0, u), j1 = bessel_j(1, u), j2 = bessel_j(2, u);
        const double c = dx[0] / rho, s = dx[1] / rho;
        ks.r = j0;
        ks.r0i = {k * c * j1, k * s * j1};
        ks.rij[0][0] = scale * (j0 + (1.0 - 2.0 * c * c) * j2);
        ks.rij[1][1] = scale * (j0 + (1.0 - 2.0 * s * s) * j2);
        ks.rij[0][1] = ks.rij[1][0] = -2.0 * scale * c * s * j2;
        ks.rtilde = rtilde_from_bessel(j0, j1, j2, c, s);
    }
    // Order: B(x), B(y), d1B(x), d2B(x), d1B(y), d2B(y).
    auto& S = ks.sigma;
    S = {};
    S[0][0] = S[1][1] = 1.0;
    S[0][1] = S[1][0] = ks.r;
    for (int i = 0; i < 2; ++i) {
        S[0][4 + i] = S[4 + i][0] = ks.r0i[i];
        S[1][2 + i] = S[2 + i][1] = -ks.r0i[i];
        S[2 + i][2 + i] = S[4 + i][4 + i] = scale;
        for (int j = 0; j < 2; ++j)
            S[2 + i][4 + j] = S[4 + j][2 + i] = ks.rij[i][j];
    }
    return ks;
}

const char* kernel_name(KernelKind kind) {
    switch (kind) {
    case KernelKind::r: return "r";
    case KernelKind::r01: return "r01";
    case KernelKind::r02: return "r02";
    case KernelKind::r11: return "r11";
    case KernelKind::r22: return "r22";
    case KernelKind::r12: return "r12";
    }
    return "?";
}

double AsymptoticForm::h(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    switch (kind) {
    case KernelKind::r: return 1.0;
    case KernelKind::r01: return std::numbers::sqrt2 * c;
    case KernelKind::r02: return std::numbers::sqrt2 * s;
    case KernelKind::r11: return 2.0 * c * c;
    case KernelKind::r22: return 2.0 * s * s;
    case KernelKind::r12: return 2.0 * c * s;
    }
    return 0.0;
}

double AsymptoticForm::g(double E, double phi) const {
    const double psi = std::sqrt(E) * phi;
    const double arg = 2.0 * kPi * psi - 0.25 * kPi;
    const bool odd = kind == KernelKind::r01 || kind == KernelKind::r02;
    return (odd ? std::sin(arg) : std::cos(arg)) / (kPi * std::sqrt(psi));
}

double asymptotic_leading(KernelKind kind, double E, double phi, double theta) {
    check_energy(E);
    if (!(phi > 0.0))
        throw InvalidArgument("asymptotic_leading: phi must be positive");
    return AsymptoticForm{kind}(E, phi, theta);
}

double normalized_kernel(KernelKind kind, double E, double phi, double theta) {
    const auto ks = kernel_set(E, {phi * std::cos(theta), phi * std::sin(theta)});
    switch (kind) {
    case KernelKind::r: return ks.rtilde[0][0];
    case KernelKind::r01: return ks.rtilde[0][1];
    case KernelKind::r02: return ks.rtilde[0][2];
    case KernelKind::r11: return ks.rtilde[1][1];
    case KernelKind::r22: return ks.rtilde[2][2];
    case KernelKind::r12: return ks.rtilde[1][2];
    }
    return 0.0;
}

} // namespace berry
