#include "berry/sampler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "berry/errors.hpp"
#include "berry/rng.hpp"

namespace berry {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

} // namespace

WaveModel parse_wave_model(const std::string& name) {
    if (name == "gaussian-spectral") return WaveModel::gaussian_spectral;
    if (name == "berry-phase") return WaveModel::berry_phase;
    if (name == "bessel-series") return WaveModel::bessel_series;
    throw InvalidArgument("unknown sampler model '" + name + "'");
}

DirectionRule parse_direction_rule(const std::string& name) {
    if (name == "equispaced") return DirectionRule::equispaced;
    if (name == "uniform-random") return DirectionRule::uniform_random;
    throw InvalidArgument("unknown direction rule '" + name + "'");
}

const char* to_string(WaveModel model) {
    switch (model) {
    case WaveModel::gaussian_spectral: return "gaussian-spectral";
    case WaveModel::berry_phase: return "berry-phase";
    case WaveModel::bessel_series: return "bessel-series";
    }
    return "?";
}

const char* to_string(DirectionRule rule) {
    return rule == DirectionRule::equispaced ? "equispaced" : "uniform-random";
}

void WaveSpec::validate() const {
    if (!(E > 0.0) || !std::isfinite(E))
        throw InvalidArgument("WaveSpec: energy must be positive");
    if (model == WaveModel::bessel_series) {
        if (M < 0)
            throw InvalidArgument("WaveSpec: negative series truncation");
        if (!(disk_radius > 0.0))
            throw InvalidArgument("WaveSpec: disk radius must be positive");
    } else if (J < 1) {
        throw InvalidArgument("WaveSpec: J must be at least 1");
    }
}

WaveRealization sample_wave(const WaveSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    if (spec.model == WaveModel::bessel_series) {
        const int M = spec.M > 0 ? spec.M : minimal_series_order(spec.E, spec.disk_radius);
        return sample_bessel_series(spec.E, M, rng, spec.disk_radius);
    }
    WaveRealization w;
    w.E_ = spec.E;
    w.k_ = wavenumber(spec.E);
    w.model_ = spec.model;
    const int J = spec.J;
    w.cos_.resize(J);
    w.sin_.resize(J);
    w.w_.resize(J);
    const bool gaussian = spec.model == WaveModel::gaussian_spectral;
    // Gaussian pairs need only the half circle since cos is even in the direction.
    const double arc = gaussian ? kPi : 2.0 * kPi;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < J; ++j) {
        const double theta = spec.direction_rule == DirectionRule::equispaced ? arc * (j + 0.5) / J
                                                                              : arc * unif(rng);
        w.cos_[j] = std::cos(theta);
        w.sin_[j] = std::sin(theta);
    }
    if (gaussian) {
        const double sigma = 1.0 / std::sqrt(double(J));
        for (int j = 0; j < J; ++j) {
            const double xi = normal(rng);
            const double eta = normal(rng);
            w.w_[j] = {sigma * xi, -sigma * eta};
        }
    } else {
        const double amp = std::sqrt(2.0 / J);
        for (int j = 0; j < J; ++j)
            w.w_[j] = std::polar(amp, 2.0 * kPi * unif(rng));
    }
    return w;
}

WaveRealization sample_wave(const WaveSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    return sample_wave(spec, rng);
}

ComplexRealization sample_complex(const WaveSpec& spec, std::mt19937_64& rng_re, std::mt19937_64& rng_im) {
    return {sample_wave(spec, rng_re), sample_wave(spec, rng_im)};
}

ComplexRealization sample_complex(const WaveSpec& spec) {
    std::mt19937_64 a(spec.seed), b(spec.seed ^ kComplexSeedXor);
    return sample_complex(spec, a, b);
}

int minimal_series_order(double E, double disk_radius) {
    const double x = wavenumber(E) * disk_radius;
    const int top = static_cast<int>(x + 40.0 + 20.0 * std::cbrt(x));
    const auto J = bessel_j_sequence(top, x);
    for (int M = static_cast<int>(std::ceil(x)) + 1; M <= top; ++M)
        if (std::abs(J[M]) < 1e-12)
            return M;
    return top;
}

WaveRealization sample_bessel_series(double E, int M, std::mt19937_64& rng, double disk_radius) {
    if (!(E > 0.0) || !std::isfinite(E))
        throw InvalidArgument("sample_bessel_series: energy must be positive");
    if (M < 1 || !(disk_radius > 0.0))
        throw InvalidArgument("sample_bessel_series: need M >= 1 and a positive radius");
    const double x = wavenumber(E) * disk_radius;
    const auto J = bessel_j_sequence(M, x);
    if (M <= x || std::abs(J[M]) >= 1e-12)
        throw InvalidArgument("sample_bessel_series: truncation order too small for the disk radius");
    WaveRealization w;
    w.E_ = E;
    w.k_ = wavenumber(E);
    w.model_ = WaveModel::bessel_series;
    w.M_ = M;
    w.radius_ = disk_radius;
    w.coef_.resize(2 * M + 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int m = -M; m <= M; ++m) {
        const double a = normal(rng);
        const double b = normal(rng);
        // J_{|m|} = (-1)^m J_m for negative m.
        const double sign = (m < 0 && (-m) % 2 == 1) ? -1.0 : 1.0;
        w.coef_[m + M] = sign * cplx(a, b);
    }
    return w;
}

// F[n + M + 2] = J_n(k r) exp(i n theta) for |n| <= M + 2.
void WaveRealization::series_terms(Vec2 x, std::vector<cplx>& F) const {
    const double r = std::hypot(x[0], x[1]);
    if (r > radius_ * (1.0 + 1e-12))
        throw OutOfDomain("series realization evaluated outside its validity disk");
    const int N = M_ + 2;
    const auto J = bessel_j_sequence(N, k_ * r);
    const cplx step = r > 0.0 ? cplx(x[0] / r, x[1] / r) : cplx(1.0, 0.0);
    F.assign(2 * N + 1, cplx(0.0));
    cplx e(1.0, 0.0);
    for (int n = 0; n <= N; ++n) {
        F[N + n] = J[n] * e;
        // J_{-n} e^{-in theta} = (-1)^n J_n conj(e).
        F[N - n] = ((n % 2) ? -J[n] : J[n]) * std::conj(e);
        e *= step;
    }
}

double WaveRealization::value(Vec2 x) const {
    if (plane_wave()) {
        double s = 0.0;
        for (std::size_t j = 0; j < w_.size(); ++j) {
            const double ph = k_ * (x[0] * cos_[j] + x[1] * sin_[j]);
            s += w_[j].real() * std::cos(ph) - w_[j].imag() * std::sin(ph);
        }
        return s;
    }
    std::vector<cplx> F;
    series_terms(x, F);
    const int N = M_ + 2;
    cplx s = 0.0;
    for (int m = -M_; m <= M_; ++m)
        s += coef_[m + M_] * F[m + N];
    return s.real();
}

Vec2 WaveRealization::gradient(Vec2 x) const {
    if (plane_wave()) {
        double g1 = 0.0, g2 = 0.0;
        for (std::size_t j = 0; j < w_.size(); ++j) {
            const double ph = k_ * (x[0] * cos_[j] + x[1] * sin_[j]);
            const double im = w_[j].real() * std::sin(ph) + w_[j].imag() * std::cos(ph);
            g1 -= k_ * cos_[j] * im;
            g2 -= k_ * sin_[j] * im;
        }
        return {g1, g2};
    }
    std::vector<cplx> F;
    series_terms(x, F);
    const int N = M_ + 2;
    cplx g1 = 0.0, g2 = 0.0;
    for (int m = -M_; m <= M_; ++m) {
        const cplx c = coef_[m + M_];
        g1 += c * (0.5 * k_) * (F[m - 1 + N] - F[m + 1 + N]);
        g2 += c * cplx(0.0, 0.5 * k_) * (F[m + 1 + N] + F[m - 1 + N]);
    }
    return {g1.real(), g2.real()};
}

std::array<double, 3> WaveRealization::value_gradient(Vec2 x) const {
    if (!plane_wave()) {
        const auto g = gradient(x);
        return {value(x), g[0], g[1]};
    }
    double v = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t j = 0; j < w_.size(); ++j) {
        const double ph = k_ * (x[0] * cos_[j] + x[1] * sin_[j]);
        const double c = std::cos(ph), s = std::sin(ph);
        v += w_[j].real() * c - w_[j].imag() * s;
        const double im = w_[j].real() * s + w_[j].imag() * c;
        g1 -= cos_[j] * im;
        g2 -= sin_[j] * im;
    }
    return {v, k_ * g1, k_ * g2};
}

SquareMatrix<2> WaveRealization::hessian(Vec2 x) const {
    SquareMatrix<2> H{};
    if (plane_wave()) {
        for (std::size_t j = 0; j < w_.size(); ++j) {
            const double ph = k_ * (x[0] * cos_[j] + x[1] * sin_[j]);
            const double re = w_[j].real() * std::cos(ph) - w_[j].imag() * std::sin(ph);
            const double kk = k_ * k_ * re;
            H[0][0] -= kk * cos_[j] * cos_[j];
            H[1][1] -= kk * sin_[j] * sin_[j];
            H[0][1] -= kk * cos_[j] * sin_[j];
        }
        H[1][0] = H[0][1];
        return H;
    }
    std::vector<cplx> F;
    series_terms(x, F);
    const int N = M_ + 2;
    const double q = 0.25 * k_ * k_;
    cplx hxx = 0.0, hyy = 0.0, hxy = 0.0;
    for (int m = -M_; m <= M_; ++m) {
        const cplx c = coef_[m + M_];
        const cplx fm2 = F[m - 2 + N], f = F[m + N], fp2 = F[m + 2 + N];
        hxx += c * q * (fm2 - 2.0 * f + fp2);
        hyy -= c * q * (fp2 + 2.0 * f + fm2);
        hxy += c * cplx(0.0, q) * (fm2 - fp2);
    }
    H[0][0] = hxx.real();
    H[1][1] = hyy.real();
    H[0][1] = H[1][0] = hxy.real();
    return H;
}

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

// Row i holds exp(i k t_i a_j) split as [real | imag].
Mat axis_phasors(const std::vector<double>& a, double k, double t0, double dt, int n) {
    const int J = static_cast<int>(a.size());
    Mat P(n, 2 * J);
    for (int j = 0; j < J; ++j)
        for (int i = 0; i < n; ++i) {
            const double ph = k * (t0 + i * dt) * a[j];
            P(i, j) = std::cos(ph);
            P(i, J + j) = std::sin(ph);
        }
    return P;
}

void store(const Mat& M, std::vector<double>& out) {
    out.assign(M.data(), M.data() + M.size());
}

} // namespace

GridField eval_grid(const WaveRealization& w, const Grid& grid, bool gradients) {
    if (grid.empty())
        throw InvalidArgument("eval_grid: empty grid");
    if (!(grid.spacing > 0.0))
        throw InvalidArgument("eval_grid: grid spacing must be positive");
    GridField out;
    out.grid = grid;
    if (!w.plane_wave()) {
        out.value.resize(grid.size());
        if (gradients) {
            out.d1.resize(grid.size());
            out.d2.resize(grid.size());
        }
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const auto x = grid.point(i, j);
                const auto idx = grid.index(i, j);
                out.value[idx] = w.value(x);
                if (gradients) {
                    const auto g = w.gradient(x);
                    out.d1[idx] = g[0];
                    out.d2[idx] = g[1];
                }
            }
        return out;
    }

    // B(x_i, y_l) = Re sum_j (w_j e^{i k x_i c_j}) (e^{i k y_l s_j}), one real GEMM per output.
    const int J = static_cast<int>(w.weights().size());
    const double k = w.wavenumber();
    const Mat X = axis_phasors(w.dir_cos(), k, grid.origin[0], grid.spacing, grid.nx);
    const Mat Y = axis_phasors(w.dir_sin(), k, grid.origin[1], grid.spacing, grid.ny);
    Mat A(grid.nx, 2 * J);
    for (int j = 0; j < J; ++j) {
        const double wr = w.weights()[j].real(), wi = w.weights()[j].imag();
        for (int i = 0; i < grid.nx; ++i) {
            const double pr = wr * X(i, j) - wi * X(i, J + j);
            const double pi = wr * X(i, J + j) + wi * X(i, j);
            A(i, j) = pr;
            A(i, J + j) = -pi;
        }
    }
    Mat V(grid.nx, grid.ny);
    V.noalias() = A * Y.transpose();
    store(V, out.value);
    if (gradients) {
        // d1: multiply the x-factor by i k c_j; d2: the y-factor by i k s_j.
        Mat A1(grid.nx, 2 * J);
        for (int j = 0; j < J; ++j) {
            const double kc = k * w.dir_cos()[j];
            for (int i = 0; i < grid.nx; ++i) {
                const double pr = A(i, j), pi = -A(i, J + j);
                A1(i, j) = -kc * pi;
                A1(i, J + j) = -kc * pr;
            }
        }
        V.noalias() = A1 * Y.transpose();
        store(V, out.d1);
        Mat Y2(grid.ny, 2 * J);
        for (int j = 0; j < J; ++j) {
            const double ks = k * w.dir_sin()[j];
            for (int l = 0; l < grid.ny; ++l) {
                Y2(l, j) = -ks * Y(l, J + j);
                Y2(l, J + j) = ks * Y(l, j);
            }
        }
        V.noalias() = A * Y2.transpose();
        store(V, out.d2);
    }
    return out;
}

std::pair<GridField, GridField> eval_grid(const ComplexRealization& w, const Grid& grid, bool gradients) {
    return {eval_grid(w.re, grid, gradients), eval_grid(w.im, grid, gradients)};
}

} // namespace berry
