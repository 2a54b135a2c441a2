#include "berry/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "berry/chaos.hpp"
#include "berry/errors.hpp"
#include "berry/quadrature.hpp"

namespace berry {

namespace {

constexpr double kPi = std::numbers::pi;

RateTable make_rate_table() {
    RateTable t{};
    const double a[6][6] = {
        {9.0, 27.0 / 2, 27.0 / 2, 9.0 / 2, 3.0, 3.0},
        {27.0 / 2, 315.0 / 8, 27.0 / 8, 45.0 / 8, 15.0 / 2, 3.0 / 2},
        {27.0 / 2, 27.0 / 8, 315.0 / 8, 45.0 / 8, 3.0 / 2, 15.0 / 2},
        {9.0 / 2, 45.0 / 8, 45.0 / 8, 27.0 / 8, 3.0 / 2, 3.0 / 2},
        {3.0, 15.0 / 2, 3.0 / 2, 3.0 / 2, 3.0 / 2, 1.0 / 2},
        {3.0, 3.0 / 2, 15.0 / 2, 3.0 / 2, 1.0 / 2, 3.0 / 2},
    };
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            t.a_rates[i][j] = a[i][j];
    auto set = [&](int v, std::initializer_list<std::pair<int, int>> pairs) {
        for (auto [i, j] : pairs)
            t.n_table[i - 1][j - 1] = t.n_table[j - 1][i - 1] = v;
    };
    set(4, {{2, 7}, {2, 8}, {2, 9}, {2, 10}, {3, 6}, {3, 8}, {3, 9}, {3, 10},
            {4, 7}, {4, 8}, {4, 9}, {4, 10}, {5, 6}, {5, 8}, {5, 9}, {5, 10}});
    set(8, {{1, 2}, {1, 3}, {1, 4}, {1, 5}});
    set(9, {{6, 7}, {8, 8}, {8, 9}, {8, 10}, {9, 9}, {9, 10}, {10, 10}});
    set(12, {{1, 8}, {1, 9}, {1, 10}, {2, 3}, {2, 5}, {3, 4}, {4, 5}});
    set(15, {{6, 8}, {6, 9}, {6, 10}, {7, 8}, {7, 9}, {7, 10}});
    set(20, {{2, 6}, {3, 7}, {4, 6}, {5, 7}});
    set(24, {{1, 1}});
    set(36, {{1, 6}, {1, 7}, {2, 2}, {2, 4}, {3, 3}, {3, 5}, {4, 4}, {5, 5}});
    set(105, {{6, 6}, {7, 7}});
    return t;
}

// rtilde[k][l] -> (kernel slot, sign); slots r00, r01, r02, r11, r22, r12.
std::pair<int, double> slot_of(int k, int l) {
    static const int slot[3][3] = {{0, 1, 2}, {1, 3, 5}, {2, 5, 4}};
    const double sign = (l == 0 && k > 0) ? -1.0 : 1.0;
    return {slot[k][l], sign};
}

void kernel_entries(double j0, double j1, double j2, double c, double s, double e[6]) {
    e[0] = j0;
    e[1] = std::numbers::sqrt2 * c * j1;
    e[2] = std::numbers::sqrt2 * s * j1;
    e[3] = j0 + (1.0 - 2.0 * c * c) * j2;
    e[4] = j0 + (1.0 - 2.0 * s * s) * j2;
    e[5] = -2.0 * c * s * j2;
}

// All 126 degree-4 monomials of six entries, in nested-loop order v1 <= v2 <= v3 <= v4.
void all_monomials(const double e[6], double* out) {
    std::size_t n = 0;
    for (int a = 0; a < 6; ++a) {
        const double pa = e[a];
        for (int b = a; b < 6; ++b) {
            const double pb = pa * e[b];
            for (int c = b; c < 6; ++c) {
                const double pc = pb * e[c];
                for (int d = c; d < 6; ++d)
                    out[n++] = pc * e[d];
            }
        }
    }
}

constexpr std::size_t kMonomials = 126;

struct Panel {
    double a, b;
};

std::vector<Panel> make_panels(double lo, double hi, std::vector<double> breaks, int per_unit) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    std::vector<Panel> out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = std::max(lo, breaks[i]), b = std::min(hi, breaks[i + 1]);
        if (!(b > a + 1e-14))
            continue;
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) * per_unit)));
        for (int k = 0; k < n; ++k)
            out.push_back({a + (b - a) * k / n, a + (b - a) * (k + 1) / n});
    }
    return out;
}

// Breakpoints (in phi) of area(A ∩ B^{-phi}) for axis-aligned rectangles.
std::vector<double> rect_erosion_breaks(const Domain& A, const Domain& B) {
    std::vector<double> out;
    if (!A.is_rectangle() || !B.is_rectangle())
        return out;
    const auto [alo, ahi] = A.bounds();
    const auto [blo, bhi] = B.bounds();
    for (int k = 0; k < 2; ++k)
        for (double v : {bhi[k] - ahi[k], alo[k] - blo[k], 0.5 * (bhi[k] - blo[k]), bhi[k] - alo[k], ahi[k] - blo[k]})
            if (v > 0.0)
                out.push_back(v);
    return out;
}

bool cheap_erosion(const Domain& A, const Domain& B) { return !A.is_polygon() && !B.is_polygon(); }

// Angular integrals over [0, 2 pi) of the 126 monomials, as polynomials in (J0, J1, J2);
// coefficient of J0^i J1^j J2^k stored at [m][jindex(i, j, k)].
struct AngularTable {
    std::vector<std::array<double, 15>> coef;
    static int jindex(int i, int j, int k) {
        static const auto table = [] {
            std::array<std::array<std::array<int, 5>, 5>, 5> t{};
            int n = 0;
            for (int a = 0; a <= 4; ++a)
                for (int b = 0; a + b <= 4; ++b)
                    t[a][b][4 - a - b] = n++;
            return t;
        }();
        return table[i][j][k];
    }
};

AngularTable angular_table(int N) {
    AngularTable t;
    t.coef.assign(kMonomials, {});
    // Each entry is a linear form in (J0, J1, J2).
    for (int q = 0; q < N; ++q) {
        const double th = 2.0 * kPi * q / N;
        const double c = std::cos(th), s = std::sin(th);
        const double L[6][3] = {{1, 0, 0},
                                {0, std::numbers::sqrt2 * c, 0},
                                {0, std::numbers::sqrt2 * s, 0},
                                {1, 0, 1 - 2 * c * c},
                                {1, 0, 1 - 2 * s * s},
                                {0, 0, -2 * c * s}};
        std::size_t m = 0;
        for (int a = 0; a < 6; ++a)
            for (int b = a; b < 6; ++b)
                for (int cc = b; cc < 6; ++cc)
                    for (int d = cc; d < 6; ++d, ++m) {
                        const int v[4] = {a, b, cc, d};
                        // Expand the product of four linear forms.
                        for (int x0 = 0; x0 < 3; ++x0)
                            for (int x1 = 0; x1 < 3; ++x1)
                                for (int x2 = 0; x2 < 3; ++x2)
                                    for (int x3 = 0; x3 < 3; ++x3) {
                                        const double w = L[v[0]][x0] * L[v[1]][x1] * L[v[2]][x2] * L[v[3]][x3];
                                        if (w == 0.0)
                                            continue;
                                        int cnt[3] = {0, 0, 0};
                                        ++cnt[x0];
                                        ++cnt[x1];
                                        ++cnt[x2];
                                        ++cnt[x3];
                                        t.coef[m][AngularTable::jindex(cnt[0], cnt[1], cnt[2])] += w * 2.0 * kPi / N;
                                    }
                    }
    }
    return t;
}

double beta_fn(double x, double y) { return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y)); }

// int_0^{2 pi} cos^A sin^B.
double trig_moment(int A, int B) {
    if (A % 2 || B % 2)
        return 0.0;
    return 2.0 * beta_fn((A + 1) / 2.0, (B + 1) / 2.0);
}

// Leading forms: each entry is h(theta) * g(psi) with g = cos(.)/(pi sqrt psi) or sin(.)/(pi sqrt psi).
// Returns, per monomial, the closed-form angular factor and the number of sine-type factors.
struct LeadingTable {
    std::vector<double> angular;
    std::vector<int> sines;
};

LeadingTable leading_table() {
    LeadingTable t;
    // h = coef * cos^ca * sin^sa ; sine-type flag.
    const double hc[6] = {1.0, std::numbers::sqrt2, std::numbers::sqrt2, 2.0, 2.0, 2.0};
    const int ca[6] = {0, 1, 0, 2, 0, 1};
    const int sa[6] = {0, 0, 1, 0, 2, 1};
    const int sine[6] = {0, 1, 1, 0, 0, 0};
    for (int a = 0; a < 6; ++a)
        for (int b = a; b < 6; ++b)
            for (int c = b; c < 6; ++c)
                for (int d = c; d < 6; ++d) {
                    const int v[4] = {a, b, c, d};
                    double coef = 1.0;
                    int A = 0, B = 0, S = 0;
                    for (int x : v) {
                        coef *= hc[x];
                        A += ca[x];
                        B += sa[x];
                        S += sine[x];
                    }
                    t.angular.push_back(coef * trig_moment(A, B));
                    t.sines.push_back(S);
                }
    return t;
}

} // namespace

const RateTable& rate_table() {
    static const RateTable t = make_rate_table();
    return t;
}

std::vector<int> Functional::degrees() const {
    if (kind == 'a') {
        static const int d[6][3] = {{4, 0, 0}, {0, 4, 0}, {0, 0, 4}, {0, 2, 2}, {2, 2, 0}, {2, 0, 2}};
        return {d[index - 1], d[index - 1] + 3};
    }
    static const int d[10][6] = {{2, 0, 0, 2, 0, 0}, {2, 0, 0, 0, 2, 0}, {2, 0, 0, 0, 0, 2}, {0, 2, 0, 2, 0, 0},
                                 {0, 0, 2, 2, 0, 0}, {0, 2, 0, 0, 2, 0}, {0, 0, 2, 0, 0, 2}, {0, 2, 0, 0, 0, 2},
                                 {0, 0, 2, 0, 2, 0}, {0, 1, 1, 0, 1, 1}};
    return {d[index - 1], d[index - 1] + 6};
}

std::string Functional::name() const { return std::string(1, kind) + std::to_string(index); }

Functional parse_functional(const std::string& name) {
    if (name.size() < 2 || (name[0] != 'a' && name[0] != 'b'))
        throw InvalidArgument("unknown functional '" + name + "'");
    int idx = 0;
    try {
        std::size_t used = 0;
        idx = std::stoi(name.substr(1), &used);
        if (used != name.size() - 1)
            throw InvalidArgument("");
    } catch (const std::exception&) {
        throw InvalidArgument("unknown functional '" + name + "'");
    }
    const int top = name[0] == 'a' ? 6 : 10;
    if (idx < 1 || idx > top)
        throw InvalidArgument("unknown functional '" + name + "'");
    return {name[0], idx};
}

FunctionalPair parse_pair(const std::string& text) {
    const auto sep = text.find_first_of(",:");
    if (sep == std::string::npos)
        throw InvalidArgument("pair must look like 'a1,a4'");
    FunctionalPair p{parse_functional(text.substr(0, sep)), parse_functional(text.substr(sep + 1))};
    if (p.first.kind != p.second.kind)
        throw InvalidArgument("pair must combine two a's or two b's");
    return p;
}

std::vector<FunctionalPair> all_a_pairs() {
    std::vector<FunctionalPair> out;
    for (int i = 1; i <= 6; ++i)
        for (int j = i; j <= 6; ++j)
            out.push_back({{'a', i}, {'a', j}});
    return out;
}

std::vector<FunctionalPair> all_b_pairs() {
    std::vector<FunctionalPair> out;
    for (int i = 1; i <= 10; ++i)
        for (int j = i; j <= 10; ++j)
            out.push_back({{'b', i}, {'b', j}});
    return out;
}

const std::vector<KernelMonomial>& MonomialIntegrals::monomials() {
    static const std::vector<KernelMonomial> list = [] {
        std::vector<KernelMonomial> out;
        for (int a = 0; a < 6; ++a)
            for (int b = a; b < 6; ++b)
                for (int c = b; c < 6; ++c)
                    for (int d = c; d < 6; ++d) {
                        KernelMonomial m{};
                        ++m[a];
                        ++m[b];
                        ++m[c];
                        ++m[d];
                        out.push_back(m);
                    }
        return out;
    }();
    return list;
}

std::size_t MonomialIntegrals::index_of(const KernelMonomial& m) {
    static const std::map<KernelMonomial, std::size_t> lookup = [] {
        std::map<KernelMonomial, std::size_t> out;
        const auto& list = monomials();
        for (std::size_t i = 0; i < list.size(); ++i)
            out[list[i]] = i;
        return out;
    }();
    auto it = lookup.find(m);
    if (it == lookup.end())
        throw InvalidArgument("kernel monomial must have degree 4");
    return it->second;
}

double MonomialIntegrals::integrate(const KernelPolynomial& p) const {
    double s = 0.0;
    for (const auto& [c, m] : p.terms)
        s += c * values_[index_of(m)];
    return s;
}

double KernelPolynomial::evaluate(const SquareMatrix<3>& rt) const {
    const double e[6] = {rt[0][0], rt[0][1], rt[0][2], rt[1][1], rt[2][2], rt[1][2]};
    double s = 0.0;
    for (const auto& [c, m] : terms) {
        double v = c;
        for (int k = 0; k < 6; ++k)
            for (int i = 0; i < m[k]; ++i)
                v *= e[k];
        s += v;
    }
    return s;
}

KernelPolynomial covariance_integrand(const FunctionalPair& pair) {
    if (pair.first.kind != pair.second.kind)
        throw InvalidArgument("covariance_integrand: mixed a/b pair");
    const auto p = pair.first.degrees(), q = pair.second.degrees();
    const auto poly = hermite_product_polynomial(p, q);
    const int n = static_cast<int>(p.size());
    std::map<KernelMonomial, double> acc;
    for (const auto& t : poly.terms) {
        KernelMonomial m{};
        double coef = t.coefficient;
        bool zero = false;
        for (int k = 0; k < n && !zero; ++k)
            for (int l = 0; l < n; ++l) {
                const int e = t.exponents[k * n + l];
                if (!e)
                    continue;
                // The two independent copies of the b-functionals are uncorrelated.
                if (k / 3 != l / 3) {
                    zero = true;
                    break;
                }
                const auto [slot, sign] = slot_of(k % 3, l % 3);
                m[slot] += e;
                if (sign < 0.0 && e % 2)
                    coef = -coef;
            }
        if (!zero)
            acc[m] += coef;
    }
    KernelPolynomial out;
    for (const auto& [m, c] : acc)
        if (c != 0.0)
            out.terms.push_back({c, m});
    return out;
}

std::pair<double, KernelMonomial> monomial_from_exponents(const SquareMatrix<3>& q) {
    KernelMonomial m{};
    double sign = 1.0;
    int total = 0;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            const double e = q[k][l];
            if (e < 0.0 || e != std::floor(e))
                throw InvalidArgument("radial_reduction: exponents must be non-negative integers");
            const int ei = static_cast<int>(e);
            total += ei;
            if (!ei)
                continue;
            const auto [slot, s] = slot_of(k, l);
            m[slot] += ei;
            if (s < 0.0 && ei % 2)
                sign = -sign;
        }
    if (total != 4)
        throw InvalidArgument("radial_reduction: exponents must sum to 4");
    return {sign, m};
}

MonomialIntegrals reduced_monomial_integrals(const Domain& D1, const Domain& D2, double E, const RadialOptions& opt) {
    if (!(E > 1.0))
        throw InvalidArgument("radial reduction needs E > 1");
    MonomialIntegrals out;
    out.values_.assign(kMonomials, 0.0);
    const double rootE = std::sqrt(E);
    const double dmax = intersection_diam(D1, D2);
    const double psi_max = rootE * dmax;
    const double psi_min = opt.leading_order ? 1.0 : 0.0;
    if (!(psi_max > psi_min))
        return out;

    // Erosion-area factor; tabulated when it needs polygon clipping.
    std::vector<double> tab;
    const int ntab = 4096;
    const bool cheap = cheap_erosion(D1, D2);
    if (!cheap) {
        tab.resize(ntab + 1);
        for (int i = 0; i <= ntab; ++i)
            tab[i] = intersection_eroded_area(D1, D2, dmax * i / ntab);
    }
    auto area_at = [&](double phi) {
        if (cheap)
            return intersection_eroded_area(D1, D2, phi);
        const double x = std::clamp(phi / dmax * ntab, 0.0, double(ntab));
        const int i = std::min(ntab - 1, static_cast<int>(x));
        const double f = x - i;
        return (1.0 - f) * tab[i] + f * tab[i + 1];
    };

    std::vector<double> breaks;
    for (double b : rect_erosion_breaks(D1, D2))
        breaks.push_back(b * rootE);
    const auto panels = make_panels(psi_min, psi_max, breaks, opt.panels_per_unit);
    const auto gl = gauss_legendre(opt.points_per_panel);

    if (opt.leading_order) {
        static const LeadingTable lt = leading_table();
        // Radial integrals of psi * area * g_c^{4-S} g_s^S for S = 0..4.
        double radial[5] = {0, 0, 0, 0, 0};
        for (const auto& p : panels) {
            const double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double psi = mid + half * gl.nodes[q];
                const double w = half * gl.weights[q] * psi * area_at(psi / rootE) / E;
                const double amp = 1.0 / (kPi * std::sqrt(psi));
                const double arg = 2.0 * kPi * psi - 0.25 * kPi;
                const double gc = amp * std::cos(arg), gs = amp * std::sin(arg);
                double pc = 1.0;
                for (int S = 4; S >= 0; --S) {
                    radial[S] += w * pc * std::pow(gs, S);
                    pc *= gc;
                }
            }
        }
        for (std::size_t m = 0; m < kMonomials; ++m)
            out.values_[m] = lt.angular[m] * radial[lt.sines[m]];
        return out;
    }

    const AngularTable at = angular_table(opt.angular_points);
    // Radial integrals of psi * area * J0^i J1^j J2^k.
    std::array<double, 15> radial{};
    for (const auto& p : panels) {
        const double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double psi = mid + half * gl.nodes[q];
            const double w = half * gl.weights[q] * psi * area_at(psi / rootE) / E;
            const double u = 2.0 * kPi * psi;
            const double j[3] = {bessel_j(0, u), bessel_j(1, u), bessel_j(2, u)};
            for (int a = 0; a <= 4; ++a)
                for (int b = 0; a + b <= 4; ++b) {
                    const int c = 4 - a - b;
                    radial[AngularTable::jindex(a, b, c)] += w * std::pow(j[0], a) * std::pow(j[1], b) * std::pow(j[2], c);
                }
        }
    }
    for (std::size_t m = 0; m < kMonomials; ++m) {
        double s = 0.0;
        for (int t = 0; t < 15; ++t)
            s += at.coef[m][t] * radial[t];
        out.values_[m] = s;
    }
    return out;
}

MonomialIntegrals full_monomial_integrals(const Domain& D1, const Domain& D2, double E, const RadialOptions& opt) {
    if (!D1.is_rectangle() || !D2.is_rectangle())
        throw UnsupportedCase("full double integral is implemented for rectangles only");
    if (!(E > 0.0))
        throw InvalidArgument("energy must be positive");
    const double rootE = std::sqrt(E);
    const auto [alo, ahi] = D1.bounds();
    const auto [blo, bhi] = D2.bounds();
    // Covariogram g(d) = |A ∩ (B + d)|, a product of piecewise linear overlaps.
    auto overlap = [](double t, double a0, double a1, double b0, double b1) {
        return std::max(0.0, std::min(a1, b1 + t) - std::max(a0, b0 + t));
    };
    std::vector<double> tb[2];
    double reach[2];
    for (int k = 0; k < 2; ++k) {
        tb[k] = {ahi[k] - bhi[k], alo[k] - blo[k], alo[k] - bhi[k], ahi[k] - blo[k]};
        reach[k] = std::max(std::abs(alo[k] - bhi[k]), std::abs(ahi[k] - blo[k]));
    }
    const double phi_max = std::hypot(reach[0], reach[1]);
    std::vector<double> rbreaks;
    for (double x : tb[0])
        for (double y : tb[1]) {
            rbreaks.push_back(std::abs(x) * rootE);
            rbreaks.push_back(std::abs(y) * rootE);
            rbreaks.push_back(std::hypot(x, y) * rootE);
        }
    const auto panels = make_panels(0.0, phi_max * rootE, rbreaks, opt.panels_per_unit);
    const auto gl = gauss_legendre(opt.points_per_panel);
    const auto gla = gauss_legendre(16);

    MonomialIntegrals out;
    out.values_.assign(kMonomials, 0.0);
    std::vector<double> mono(kMonomials);
    for (const auto& p : panels) {
        const double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double psi = mid + half * gl.nodes[q];
            const double phi = psi / rootE;
            const double wr = half * gl.weights[q] * psi / E;
            const double u = 2.0 * kPi * psi;
            const double j0 = bessel_j(0, u), j1 = bessel_j(1, u), j2 = bessel_j(2, u);
            std::vector<double> th{0.0, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi};
            for (double t : tb[0])
                if (std::abs(t) < phi) {
                    const double a = std::acos(t / phi);
                    th.push_back(a);
                    th.push_back(2.0 * kPi - a);
                }
            for (double t : tb[1])
                if (std::abs(t) < phi) {
                    double a = std::asin(t / phi);
                    if (a < 0.0)
                        a += 2.0 * kPi;
                    th.push_back(a);
                    th.push_back(std::fmod(3.0 * kPi - a, 2.0 * kPi));
                }
            std::sort(th.begin(), th.end());
            for (std::size_t s = 0; s + 1 < th.size(); ++s) {
                const double t0 = th[s], t1 = th[s + 1];
                if (!(t1 > t0 + 1e-15))
                    continue;
                const int sub = std::max(1, static_cast<int>(std::ceil((t1 - t0) / (kPi / 8.0))));
                for (int k = 0; k < sub; ++k) {
                    const double a = t0 + (t1 - t0) * k / sub, b = t0 + (t1 - t0) * (k + 1) / sub;
                    const double ha = 0.5 * (b - a), ma = 0.5 * (a + b);
                    for (std::size_t r = 0; r < gla.nodes.size(); ++r) {
                        const double theta = ma + ha * gla.nodes[r];
                        const double c = std::cos(theta), sn = std::sin(theta);
                        const double g = overlap(phi * c, alo[0], ahi[0], blo[0], bhi[0]) *
                                         overlap(phi * sn, alo[1], ahi[1], blo[1], bhi[1]);
                        if (g == 0.0)
                            continue;
                        double e[6];
                        kernel_entries(j0, j1, j2, c, sn, e);
                        all_monomials(e, mono.data());
                        const double w = wr * ha * gla.weights[r] * g;
                        for (std::size_t m = 0; m < kMonomials; ++m)
                            out.values_[m] += w * mono[m];
                    }
                }
            }
        }
    }
    return out;
}

double radial_reduction(const SquareMatrix<3>& q, const Domain& D1, const Domain& D2, double E,
                        const RadialOptions& opt) {
    const auto [sign, m] = monomial_from_exponents(q);
    return sign * reduced_monomial_integrals(D1, D2, E, opt)[MonomialIntegrals::index_of(m)];
}

double predicted_covariance(const FunctionalPair& pair, double E, double overlap_area) {
    const auto& t = rate_table();
    const double c = pair.first.kind == 'a' ? t.a_rate(pair.first.index, pair.second.index)
                                            : t.b_rate(pair.first.index, pair.second.index);
    return c * overlap_area * std::log(E) / (kPi * kPi * kPi * E);
}

std::vector<RateCheck> covariance_rate_checks(const std::vector<FunctionalPair>& pairs, double E, const Domain& D1,
                                              const Domain& D2, const RadialOptions& opt) {
    for (const auto& p : pairs)
        if (p.first.kind != p.second.kind)
            throw InvalidArgument("covariance_rate_check: mixed a/b pair");
    const auto I = reduced_monomial_integrals(D1, D2, E, opt);
    const double ov = intersection_area(D1, D2);
    std::vector<RateCheck> out;
    for (const auto& p : pairs) {
        RateCheck rc;
        rc.pair = p.first.name() + "," + p.second.name();
        rc.E = E;
        rc.numeric = I.integrate(covariance_integrand(p));
        rc.predicted = predicted_covariance(p, E, ov);
        rc.ratio = rc.predicted != 0.0 ? rc.numeric / rc.predicted : NAN;
        out.push_back(rc);
    }
    return out;
}

RateCheck covariance_rate_check(const FunctionalPair& pair, double E, const Domain& D1, const Domain& D2,
                                const RadialOptions& opt) {
    return covariance_rate_checks({pair}, E, D1, D2, opt).front();
}

OscillatoryRemainder oscillatory_remainder_check(double E, const Domain& D) {
    if (!(E > 1.0))
        throw InvalidArgument("oscillatory_remainder_check needs E > 1");
    const double rootE = std::sqrt(E);
    const double psi_max = rootE * diam(D);
    const RadialOptions opt;
    const auto panels = make_panels(1.0, psi_max, {}, 8);
    const auto gl = gauss_legendre(opt.points_per_panel);
    double i8 = 0.0, i4 = 0.0, i0 = 0.0;
    for (const auto& p : panels) {
        const double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double psi = mid + half * gl.nodes[q];
            const double w = half * gl.weights[q] * erosion_area(D, psi / rootE) / psi;
            i0 += w;
            i8 += w * std::cos(8.0 * kPi * psi - kPi);
            i4 += w * std::cos(4.0 * kPi * psi - 0.5 * kPi);
        }
    }
    // cos^4 x = 3/8 + cos(4x)/8 + cos(2x)/2 with x = 2 pi psi - pi/4, total prefactor 48 pi / E.
    OscillatoryRemainder r;
    r.unmodulated = 48.0 * kPi / E * i0;
    r.constant = 18.0 * kPi / E * i0;
    r.cos8 = 6.0 * kPi / E * i8;
    r.cos4 = 24.0 * kPi / E * i4;
    r.magnitude = std::abs(r.cos8) + std::abs(r.cos4);
    return r;
}

Predictions predictions(double E, const std::vector<Domain>& domains) {
    if (!(E > 1.0))
        throw InvalidArgument("predictions need E > 1");
    Predictions p;
    const double logE = std::log(E);
    for (const auto& D : domains) {
        const double a = area(D);
        p.mean_length.push_back(a * kPi / std::numbers::sqrt2 * std::sqrt(E));
        p.mean_count.push_back(a * kPi * E);
        p.var_length.push_back(a * logE / (512.0 * kPi));
        p.var_count.push_back(11.0 * a * E * logE / (32.0 * kPi));
    }
    const std::size_t n = domains.size();
    p.C.assign(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p.C[i][j] = intersection_area(domains[i], domains[j]) / std::sqrt(area(domains[i]) * area(domains[j]));
    return p;
}

} // namespace berry
