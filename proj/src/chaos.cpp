#include "berry/chaos.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "berry/errors.hpp"
#include "berry/quadrature.hpp"

namespace berry {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

double h2(double x) { return x * x - 1.0; }
double h4(double x) {
    const double x2 = x * x;
    return x2 * x2 - 6.0 * x2 + 3.0;
}

} // namespace

double hermite(int n, double x) {
    if (n < 0)
        throw InvalidArgument("hermite: negative degree");
    if (n == 0)
        return 1.0;
    double hm = 1.0, h = x;
    for (int k = 1; k < n; ++k) {
        const double hp = x * h - k * hm;
        hm = h;
        h = hp;
    }
    return h;
}

double beta_coeff(int l, double z) {
    if (l < 0)
        throw InvalidArgument("beta_coeff: negative index");
    return std::exp(-0.5 * z * z) / kSqrt2Pi * hermite(l, z) / factorial(l);
}

std::optional<double> alpha_table(int n, int m) {
    if (n < 0 || m < 0)
        return std::nullopt;
    if (n % 2 || m % 2)
        return 0.0;
    if (n == 0 && m == 0)
        return kSqrt2Pi / 2.0;
    if ((n == 2 && m == 0) || (n == 0 && m == 2))
        return kSqrt2Pi / 8.0;
    if ((n == 4 && m == 0) || (n == 0 && m == 4))
        return -kSqrt2Pi / 128.0;
    if (n == 2 && m == 2)
        return -kSqrt2Pi / 64.0;
    return std::nullopt;
}

double alpha_coeff_quadrature(int n, int m) {
    if (n < 0 || m < 0)
        throw InvalidArgument("alpha_coeff: negative index");
    // In polar form the angular integral is a trigonometric polynomial in phi (trapezoid is exact)
    // and the radial integral is int_0^inf rho^2 exp(-rho^2/2) P(rho) d rho = sqrt(2) int t^{1/2} e^{-t} P(sqrt(2t)) dt.
    const int nphi = 64;
    const auto lag = gauss_laguerre(64, 0.5);
    double total = 0.0;
    for (std::size_t r = 0; r < lag.nodes.size(); ++r) {
        const double rho = std::sqrt(2.0 * lag.nodes[r]);
        double ang = 0.0;
        for (int k = 0; k < nphi; ++k) {
            const double phi = 2.0 * kPi * k / nphi;
            ang += hermite(n, rho * std::cos(phi)) * hermite(m, rho * std::sin(phi));
        }
        ang *= 2.0 * kPi / nphi;
        total += lag.weights[r] * std::numbers::sqrt2 * ang;
    }
    return total / (2.0 * kPi * factorial(n) * factorial(m));
}

double alpha_coeff(int n, int m) {
    if (auto v = alpha_table(n, m))
        return *v;
    return alpha_coeff_quadrature(n, m);
}

std::optional<double> zeta_table(int a, int b, int c, int d) {
    if (a < 0 || b < 0 || c < 0 || d < 0)
        return std::nullopt;
    const int par = a % 2;
    if (b % 2 != par || c % 2 != par || d % 2 != par)
        return 0.0;
    const std::array<int, 4> k{a, b, c, d};
    const int deg = a + b + c + d;
    auto is = [&](int x0, int x1, int x2, int x3) { return k == std::array<int, 4>{x0, x1, x2, x3}; };
    if (deg == 0)
        return 1.0;
    if (deg == 2 && (a == 2 || b == 2 || c == 2 || d == 2))
        return 0.25;
    if (deg == 4) {
        if (is(1, 1, 1, 1))
            return -3.0 / 8.0;
        if (a == 4 || b == 4 || c == 4 || d == 4)
            return -3.0 / 192.0;
        if (is(2, 2, 0, 0) || is(0, 0, 2, 2) || is(2, 0, 2, 0) || is(0, 2, 0, 2))
            return -1.0 / 32.0;
        if (is(2, 0, 0, 2) || is(0, 2, 2, 0))
            return 5.0 / 32.0;
    }
    return std::nullopt;
}

std::vector<QmcEstimate> zeta_coeff_qmc_batch(const std::vector<std::array<int, 4>>& indices, long points, int shifts,
                                              std::uint64_t seed) {
    for (const auto& k : indices)
        for (int v : k)
            if (v < 0)
                throw InvalidArgument("zeta_coeff: negative index");
    if (points < shifts || shifts < 2)
        throw InvalidArgument("zeta_coeff_qmc: need at least two shifts and one point per shift");
    const long per = points / shifts;
    const std::size_t n = indices.size();
    const int bases[4] = {2, 3, 5, 7};
    int maxdeg = 0;
    for (const auto& k : indices)
        for (int v : k)
            maxdeg = std::max(maxdeg, v);
    std::vector<double> norm(n);
    for (std::size_t e = 0; e < n; ++e)
        norm[e] = factorial(indices[e][0]) * factorial(indices[e][1]) * factorial(indices[e][2]) *
                  factorial(indices[e][3]);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<double>> means(n, std::vector<double>(shifts));
    std::vector<double> sum(n);
    std::vector<std::array<double, 4>> herm(maxdeg + 1);
    for (int s = 0; s < shifts; ++s) {
        double shift[4];
        for (double& v : shift)
            v = unif(rng);
        std::fill(sum.begin(), sum.end(), 0.0);
        for (long i = 1; i <= per; ++i) {
            double g[4];
            for (int dim = 0; dim < 4; ++dim) {
                // Radical inverse of i in the given base.
                double f = 1.0, r = 0.0;
                long m = i;
                const int base = bases[dim];
                while (m > 0) {
                    f /= base;
                    r += f * (m % base);
                    m /= base;
                }
                double u = r + shift[dim];
                if (u >= 1.0)
                    u -= 1.0;
                if (u <= 0.0)
                    u = 0.5 / per;
                g[dim] = normal_quantile(u);
            }
            const double jac = std::abs(g[0] * g[3] - g[1] * g[2]);
            for (int dim = 0; dim < 4; ++dim) {
                herm[0][dim] = 1.0;
                if (maxdeg >= 1)
                    herm[1][dim] = g[dim];
                for (int d = 2; d <= maxdeg; ++d)
                    herm[d][dim] = g[dim] * herm[d - 1][dim] - (d - 1) * herm[d - 2][dim];
            }
            for (std::size_t e = 0; e < n; ++e) {
                const auto& k = indices[e];
                sum[e] += jac * herm[k[0]][0] * herm[k[1]][1] * herm[k[2]][2] * herm[k[3]][3];
            }
        }
        for (std::size_t e = 0; e < n; ++e)
            means[e][s] = sum[e] / per / norm[e];
    }
    std::vector<QmcEstimate> out(n);
    for (std::size_t e = 0; e < n; ++e) {
        double mean = 0.0;
        for (double m : means[e])
            mean += m;
        mean /= shifts;
        double var = 0.0;
        for (double m : means[e])
            var += (m - mean) * (m - mean);
        var /= (shifts - 1);
        out[e] = {mean, std::sqrt(var / shifts)};
    }
    return out;
}

QmcEstimate zeta_coeff_qmc(int a, int b, int c, int d, long points, int shifts, std::uint64_t seed) {
    return zeta_coeff_qmc_batch({{a, b, c, d}}, points, shifts, seed).front();
}

double zeta_coeff(int a, int b, int c, int d) {
    if (auto v = zeta_table(a, b, c, d))
        return *v;
    return zeta_coeff_qmc(a, b, c, d).value;
}

double CovariancePolynomial::evaluate(const std::vector<std::vector<double>>& C) const {
    if (static_cast<int>(C.size()) < nx)
        throw InvalidArgument("covariance matrix has too few rows");
    double total = 0.0;
    for (const auto& t : terms) {
        double v = t.coefficient;
        for (int k = 0; k < nx; ++k)
            for (int l = 0; l < ny; ++l) {
                const int e = t.exponents[k * ny + l];
                for (int i = 0; i < e; ++i)
                    v *= C[k][l];
            }
        total += v;
    }
    return total;
}

CovariancePolynomial hermite_product_polynomial(const std::vector<int>& p, const std::vector<int>& q) {
    int dp = 0, dq = 0;
    for (int v : p) {
        if (v < 0)
            throw InvalidArgument("hermite_product_moment: negative degree");
        dp += v;
    }
    for (int v : q) {
        if (v < 0)
            throw InvalidArgument("hermite_product_moment: negative degree");
        dq += v;
    }
    if (dp > 4 || dq > 4)
        throw UnsupportedCase("hermite_product_moment: total degree above 4 on one side");
    CovariancePolynomial poly;
    poly.nx = static_cast<int>(p.size());
    poly.ny = static_cast<int>(q.size());
    if (dp != dq)
        return poly;
    const int nx = poly.nx, ny = poly.ny;
    double pref = 1.0;
    for (int v : p)
        pref *= factorial(v);
    for (int v : q)
        pref *= factorial(v);
    // Enumerate non-negative integer matrices with row sums p and column sums q.
    std::vector<int> m(nx * ny, 0), rows(p), cols(q);
    std::function<void(int)> fill = [&](int cell) {
        if (cell == nx * ny) {
            for (int v : rows)
                if (v) return;
            for (int v : cols)
                if (v) return;
            double denom = 1.0;
            for (int v : m)
                denom *= factorial(v);
            poly.terms.push_back({pref / denom, m});
            return;
        }
        const int k = cell / ny, l = cell % ny;
        const int top = std::min(rows[k], cols[l]);
        for (int v = 0; v <= top; ++v) {
            if (l == ny - 1 && v != rows[k])
                continue;
            m[cell] = v;
            rows[k] -= v;
            cols[l] -= v;
            fill(cell + 1);
            rows[k] += v;
            cols[l] += v;
        }
        m[cell] = 0;
    };
    fill(0);
    return poly;
}

double hermite_product_moment(const std::vector<int>& p, const std::vector<int>& q,
                              const std::vector<std::vector<double>>& C) {
    return hermite_product_polynomial(p, q).evaluate(C);
}

double length4_combination(const std::vector<double>& a, double E) {
    if (a.size() != 6)
        throw InvalidArgument("length4_combination: need a_1..a_6");
    return std::sqrt(2.0 * kPi * kPi * E) / 128.0 *
           (8.0 * a[0] - a[1] - a[2] - 2.0 * a[3] - 8.0 * a[4] - 8.0 * a[5]);
}

double count4_a_combination(const std::vector<double>& a, double E) {
    if (a.size() != 6)
        throw InvalidArgument("count4_a_combination: need a_1..a_6");
    return kPi * E / 64.0 * (8.0 * a[0] - a[1] - a[2] - 2.0 * a[3] - 8.0 * a[4] - 8.0 * a[5]);
}

double count4_b_combination(const std::vector<double>& b, double E) {
    if (b.size() != 10)
        throw InvalidArgument("count4_b_combination: need b_1..b_10");
    return kPi * E / 8.0 *
           (2.0 * b[0] - b[1] - b[2] - b[3] - b[4] - 0.25 * b[5] - 0.25 * b[6] + 1.25 * b[7] + 1.25 * b[8] -
            3.0 * b[9]);
}

void check_resolution(double spacing, double E) {
    if (spacing > (1.0 + 1e-12) / (8.0 * std::sqrt(E)))
        throw ResolutionError("grid spacing exceeds 1/(8 sqrt E)");
}

namespace {

void check_field(const GridField& f, double E) {
    if (!f.has_gradient())
        throw InvalidArgument("chaos functional needs gradient samples");
    if (!(E > 0.0))
        throw InvalidArgument("energy must be positive");
    check_resolution(f.grid.spacing, E);
}

// Calls fn(index) for every cell centre inside D.
template <class Fn>
void for_cells_in(const GridField& f, const Domain& D, Fn fn) {
    const Grid& g = f.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (D.contains(g.point(i, j)))
                fn(g.index(i, j));
}

std::array<double, 6> a_terms(double x0, double x1, double x2) {
    return {h4(x0), h4(x1), h4(x2), h2(x1) * h2(x2), h2(x0) * h2(x1), h2(x0) * h2(x2)};
}

Grid domain_midpoint_grid(const Domain& D, double delta) {
    const auto [lo, hi] = D.bounds();
    return midpoint_grid(lo, hi, delta);
}

} // namespace

ChaosComponent fourth_chaos_length(const GridField& f, double E, const Domain& D) {
    check_field(f, E);
    const double s = 1.0 / std::sqrt(2.0 * kPi * kPi * E);
    std::array<double, 6> acc{};
    for_cells_in(f, D, [&](std::size_t idx) {
        const auto t = a_terms(f.value[idx], s * f.d1[idx], s * f.d2[idx]);
        for (int k = 0; k < 6; ++k)
            acc[k] += t[k];
    });
    const double w = f.grid.spacing * f.grid.spacing;
    ChaosComponent out;
    out.order = 4;
    out.a.resize(6);
    for (int k = 0; k < 6; ++k)
        out.a[k] = acc[k] * w;
    out.value = length4_combination(out.a, E);
    return out;
}

ChaosComponent fourth_chaos_length(const WaveRealization& w, const Domain& D, double delta) {
    check_resolution(delta, w.energy());
    return fourth_chaos_length(eval_grid(w, domain_midpoint_grid(D, delta), true), w.energy(), D);
}

ChaosComponent fourth_chaos_count(const GridField& re, const GridField& im, double E, const Domain& D) {
    check_field(re, E);
    check_field(im, E);
    if (re.grid.nx != im.grid.nx || re.grid.ny != im.grid.ny)
        throw InvalidArgument("fourth_chaos_count: grid shapes differ");
    const double s = 1.0 / std::sqrt(2.0 * kPi * kPi * E);
    std::array<double, 6> aa{}, ah{};
    std::array<double, 10> bb{};
    for_cells_in(re, D, [&](std::size_t idx) {
        const double x0 = re.value[idx], x1 = s * re.d1[idx], x2 = s * re.d2[idx];
        const double y0 = im.value[idx], y1 = s * im.d1[idx], y2 = s * im.d2[idx];
        const auto ta = a_terms(x0, x1, x2), tb = a_terms(y0, y1, y2);
        for (int k = 0; k < 6; ++k) {
            aa[k] += ta[k];
            ah[k] += tb[k];
        }
        const double hx0 = h2(x0), hx1 = h2(x1), hx2 = h2(x2);
        const double hy0 = h2(y0), hy1 = h2(y1), hy2 = h2(y2);
        bb[0] += hx0 * hy0;
        bb[1] += hx0 * hy1;
        bb[2] += hx0 * hy2;
        bb[3] += hx1 * hy0;
        bb[4] += hx2 * hy0;
        bb[5] += hx1 * hy1;
        bb[6] += hx2 * hy2;
        bb[7] += hx1 * hy2;
        bb[8] += hx2 * hy1;
        bb[9] += x1 * x2 * y1 * y2;
    });
    const double w = re.grid.spacing * re.grid.spacing;
    ChaosComponent out;
    out.order = 4;
    out.a.resize(6);
    out.ahat.resize(6);
    out.b.resize(10);
    for (int k = 0; k < 6; ++k) {
        out.a[k] = aa[k] * w;
        out.ahat[k] = ah[k] * w;
    }
    for (int k = 0; k < 10; ++k)
        out.b[k] = bb[k] * w;
    out.a_part = count4_a_combination(out.a, E);
    out.ahat_part = count4_a_combination(out.ahat, E);
    out.b_part = count4_b_combination(out.b, E);
    out.value = out.a_part + out.ahat_part + out.b_part;
    return out;
}

ChaosComponent fourth_chaos_count(const ComplexRealization& w, const Domain& D, double delta) {
    check_resolution(delta, w.re.energy());
    const auto fields = eval_grid(w, domain_midpoint_grid(D, delta), true);
    return fourth_chaos_count(fields.first, fields.second, w.re.energy(), D);
}

std::vector<double> length4_cell_values(const GridField& f, double E) {
    check_field(f, E);
    const double s = 1.0 / std::sqrt(2.0 * kPi * kPi * E);
    const double w = f.grid.spacing * f.grid.spacing;
    const double pref = std::sqrt(2.0 * kPi * kPi * E) / 128.0 * w;
    std::vector<double> out(f.grid.size());
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        const auto t = a_terms(f.value[idx], s * f.d1[idx], s * f.d2[idx]);
        out[idx] = pref * (8.0 * t[0] - t[1] - t[2] - 2.0 * t[3] - 8.0 * t[4] - 8.0 * t[5]);
    }
    return out;
}

double fourth_chaos_length_expansion(const GridField& f, double E, const Domain& D) {
    check_field(f, E);
    const double s = 1.0 / std::sqrt(2.0 * kPi * kPi * E);
    double total = 0.0;
    for (int u = 0; u <= 4; ++u)
        for (int m = 0; m <= u; ++m) {
            const double coef = beta_coeff(4 - u, 0.0) * alpha_coeff(m, u - m);
            if (coef == 0.0)
                continue;
            double acc = 0.0;
            for_cells_in(f, D, [&](std::size_t idx) {
                acc += hermite(4 - u, f.value[idx]) * hermite(m, s * f.d1[idx]) * hermite(u - m, s * f.d2[idx]);
            });
            total += coef * acc;
        }
    return std::sqrt(2.0 * kPi * kPi * E) * total * f.grid.spacing * f.grid.spacing;
}

double fourth_chaos_count_expansion(const GridField& re, const GridField& im, double E, const Domain& D) {
    check_field(re, E);
    check_field(im, E);
    const double s = 1.0 / std::sqrt(2.0 * kPi * kPi * E);
    double total = 0.0;
    for (int i1 = 0; i1 <= 4; ++i1)
        for (int j1 = 0; i1 + j1 <= 4; ++j1)
            for (int i2 = 0; i1 + j1 + i2 <= 4; ++i2)
                for (int i3 = 0; i1 + j1 + i2 + i3 <= 4; ++i3)
                    for (int j2 = 0; i1 + j1 + i2 + i3 + j2 <= 4; ++j2) {
                        const int j3 = 4 - i1 - j1 - i2 - i3 - j2;
                        const double coef = beta_coeff(i1, 0.0) * beta_coeff(j1, 0.0) * zeta_coeff(i2, i3, j2, j3);
                        if (coef == 0.0)
                            continue;
                        double acc = 0.0;
                        for_cells_in(re, D, [&](std::size_t idx) {
                            acc += hermite(i1, re.value[idx]) * hermite(j1, im.value[idx]) *
                                   hermite(i2, s * re.d1[idx]) * hermite(i3, s * re.d2[idx]) *
                                   hermite(j2, s * im.d1[idx]) * hermite(j3, s * im.d2[idx]);
                        });
                        total += coef * acc;
                    }
    return 2.0 * kPi * kPi * E * total * re.grid.spacing * re.grid.spacing;
}

double second_chaos_length(const WaveRealization& w, const Domain& D) {
    return second_chaos_length([&w](Vec2 x) { return w.value_gradient(x); }, w.energy(), D);
}

double second_chaos_length(const FieldSampler& w, double E, const Domain& D) {
    if (!(E > 0.0))
        throw InvalidArgument("energy must be positive");
    const double step = 1.0 / (16.0 * std::sqrt(E));
    double total = 0.0;
    if (const auto* d = std::get_if<Disk>(&D.shape())) {
        // Periodic trapezoid in the angle.
        const long n = std::max<long>(16, static_cast<long>(std::ceil(2.0 * kPi * d->radius / step)));
        for (long i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * i / n;
            const double c = std::cos(t), s = std::sin(t);
            const auto vg = w({d->center[0] + d->radius * c, d->center[1] + d->radius * s});
            total += vg[0] * (vg[1] * c + vg[2] * s);
        }
        total *= 2.0 * kPi * d->radius / n;
    } else {
        const auto gl = gauss_legendre(3);
        const auto v = D.outline();
        for (std::size_t e = 0; e < v.size(); ++e) {
            const Vec2 a = v[e], b = v[(e + 1) % v.size()];
            const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
            // Counterclockwise boundary: the outward normal is the edge direction turned clockwise.
            const double nx = (b[1] - a[1]) / len, ny = -(b[0] - a[0]) / len;
            const long n = std::max<long>(1, static_cast<long>(std::ceil(len / step)));
            const double h = 1.0 / n;
            for (long i = 0; i < n; ++i)
                for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                    const double t = (i + 0.5 + 0.5 * gl.nodes[q]) * h;
                    const auto vg = w({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
                    total += 0.5 * h * len * gl.weights[q] * vg[0] * (vg[1] * nx + vg[2] * ny);
                }
        }
    }
    return total / (8.0 * kPi * std::sqrt(2.0 * E));
}

} // namespace berry
