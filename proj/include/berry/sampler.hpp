#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "berry/grid.hpp"
#include "berry/specfun.hpp"

namespace berry {

enum class WaveModel { gaussian_spectral, berry_phase, bessel_series };
enum class DirectionRule { equispaced, uniform_random };

WaveModel parse_wave_model(const std::string& name);
DirectionRule parse_direction_rule(const std::string& name);
const char* to_string(WaveModel model);
const char* to_string(DirectionRule rule);

struct WaveSpec {
    double E = 1.0;
    int J = 256;
    WaveModel model = WaveModel::gaussian_spectral;
    DirectionRule direction_rule = DirectionRule::equispaced;
    int M = 0;                // bessel-series truncation; 0 picks the smallest valid order
    double disk_radius = 1.0; // bessel-series validity disk, centred at the origin
    std::uint64_t seed = 0;

    void validate() const;
};

/// A frozen sample of the real wave. Plane-wave models store B(x) = Re sum_j w_j exp(i k <x, w_j>);
/// the series model stores B(x) = Re sum_m c_m J_m(k r) exp(i m theta) for |m| <= M.
class WaveRealization {
public:
    double energy() const { return E_; }
    double wavenumber() const { return k_; }
    WaveModel model() const { return model_; }
    bool plane_wave() const { return model_ != WaveModel::bessel_series; }

    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
    /// (value, d1, d2) in one pass.
    std::array<double, 3> value_gradient(Vec2 x) const;
    SquareMatrix<2> hessian(Vec2 x) const;

    // Plane-wave data.
    const std::vector<double>& dir_cos() const { return cos_; }
    const std::vector<double>& dir_sin() const { return sin_; }
    const std::vector<std::complex<double>>& weights() const { return w_; }

    // Series data.
    int truncation() const { return M_; }
    double validity_radius() const { return radius_; }

private:
    friend WaveRealization sample_wave(const WaveSpec&, std::mt19937_64&);
    friend WaveRealization sample_bessel_series(double, int, std::mt19937_64&, double);

    void series_terms(Vec2 x, std::vector<std::complex<double>>& F) const;

    double E_ = 1.0;
    double k_ = 0.0;
    WaveModel model_ = WaveModel::gaussian_spectral;
    std::vector<double> cos_, sin_;
    std::vector<std::complex<double>> w_;
    int M_ = 0;
    double radius_ = 0.0;
    std::vector<std::complex<double>> coef_; // index m + M
};

struct ComplexRealization {
    WaveRealization re;
    WaveRealization im;

    std::complex<double> value(Vec2 x) const { return {re.value(x), im.value(x)}; }
};

WaveRealization sample_wave(const WaveSpec& spec, std::mt19937_64& rng);
WaveRealization sample_wave(const WaveSpec& spec);

/// Real and imaginary parts drawn from spec.seed and spec.seed ^ kComplexSeedXor.
ComplexRealization sample_complex(const WaveSpec& spec);
ComplexRealization sample_complex(const WaveSpec& spec, std::mt19937_64& rng_re, std::mt19937_64& rng_im);

WaveRealization sample_bessel_series(double E, int M, std::mt19937_64& rng, double disk_radius);

/// Smallest M > k R with J_M(k R) < 1e-12.
int minimal_series_order(double E, double disk_radius);

GridField eval_grid(const WaveRealization& w, const Grid& grid, bool gradients = false);
std::pair<GridField, GridField> eval_grid(const ComplexRealization& w, const Grid& grid, bool gradients = false);

} // namespace berry
