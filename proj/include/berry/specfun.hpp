#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace berry {

using Vec2 = std::array<double, 2>;
template <std::size_t N>
using SquareMatrix = std::array<std::array<double, N>, N>;

/// J_order(u) for order in {0, 1, 2}.
/// Power series for |u| <= 12, Hankel expansion beyond.
double bessel_j(int order, double u);

/// J_0(u) .. J_nmax(u) by Miller's backward recurrence; used by the series sampler.
std::vector<double> bessel_j_sequence(int nmax, double u);

inline double wavenumber(double E) { return 2.0 * 3.14159265358979323846 * std::sqrt(E); }

double kernel_r(double E, Vec2 dx);

struct KernelSet {
    double r = 1.0;
    Vec2 r0i{0.0, 0.0};
    SquareMatrix<2> rij{};
    // rtilde[k][l] = E[d~_k B(x) d~_l B(y)], so rtilde[k][0] = -rtilde[0][k].
    SquareMatrix<3> rtilde{};
    // Covariance of (B(x), B(y), grad B(x), grad B(y)).
    SquareMatrix<6> sigma{};
};

KernelSet kernel_set(double E, Vec2 dx);

/// Normalized kernels from precomputed J0, J1, J2 at k|dx| and the unit direction (c, s).
SquareMatrix<3> rtilde_from_bessel(double j0, double j1, double j2, double c, double s);

enum class KernelKind { r, r01, r02, r11, r22, r12 };

const char* kernel_name(KernelKind kind);

/// Leading large-distance form h(theta) g(phi) of a normalized kernel.
struct AsymptoticForm {
    KernelKind kind;
    double h(double theta) const;
    double g(double E, double phi) const;
    double operator()(double E, double phi, double theta) const { return h(theta) * g(E, phi); }
};

double asymptotic_leading(KernelKind kind, double E, double phi, double theta);

/// The exact normalized kernel selected by kind at (phi cos theta, phi sin theta).
double normalized_kernel(KernelKind kind, double E, double phi, double theta);

} // namespace berry
