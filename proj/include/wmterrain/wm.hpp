#pragma once

// 3D Weierstrass-Mandelbrot surface evaluation.
//
//   z(x, y) = A * sum_{m=1..M} sum_{n=1..n_max} gamma^((D-3)n)
//             * [cos(phi_mn) - cos(2 pi gamma^n r / L * cos(theta - pi m / M) + phi_mn)]
//
//   A = L (G / L)^(D-2) sqrt(ln(gamma) / M)
//
// with r = |(x, y)| and theta = atan2(y, x), theta(0, 0) = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wmterrain/error.hpp"
#include "wmterrain/grid.hpp"
#include "wmterrain/elevation.hpp"
#include "wmterrain/parallel.hpp"
#include "wmterrain/random.hpp"
#include "wmterrain/trig.hpp"

namespace wmterrain {

/// Parameters of one monofractal band.
struct WMParams
{
    int ridges = 16;               ///< M
    int n_max = 1009;              ///< frequency cutoff
    double gamma = 1.5;            ///< frequency-density ratio
    double fractal_dim = 2.2;      ///< D, in (2, 3)
    double sampling_length = 100.9; ///< L
    double elevation_scale = 1e-6; ///< G

    void validate() const
    {
        if (ridges < 1)
            throw InvalidParameterError("W-M ridges must be >= 1, got " + std::to_string(ridges));
        if (n_max < 1)
            throw InvalidParameterError("W-M n_max must be >= 1, got " + std::to_string(n_max));
        if (!(gamma > 1.0))
            throw InvalidParameterError("W-M gamma must be > 1, got " + std::to_string(gamma));
        if (!(fractal_dim > 2.0 && fractal_dim < 3.0))
            throw InvalidParameterError("W-M fractal dimension must lie in (2, 3), got " + std::to_string(fractal_dim));
        if (!(sampling_length > 0.0) || !std::isfinite(sampling_length))
            throw InvalidParameterError("W-M sampling length must be > 0");
        if (!(elevation_scale > 0.0) || !std::isfinite(elevation_scale))
            throw InvalidParameterError("W-M elevation scale must be > 0");
    }

    bool operator==(const WMParams&) const = default;
};

/// Default parameter rows for the three bands of a multifractal map.
namespace bands {

inline WMParams low(int n_max = 1009)
{
    return {16, n_max, 1.5, 2.2, 100.9, 1e-6};
}

inline WMParams mid(int n_max = 1009)
{
    return {32, n_max, 1.5, 2.45, 100.9, 8e-8};
}

/// The high-frequency band carries the experiment's fractal dimension.
inline WMParams high(double fractal_dim, int n_max = 1009)
{
    return {64, n_max, 1.5, fractal_dim, 100.9, 1e-8};
}

} // namespace bands

/// M x n_max random phases in [0, pi), row-major over (m, n).
class PhaseMatrix
{
public:
    PhaseMatrix() = default;

    PhaseMatrix(int ridges, int n_max, std::vector<double> phases)
        : ridges_(ridges), n_max_(n_max), phases_(std::move(phases))
    {
        if (phases_.size() != static_cast<std::size_t>(ridges) * static_cast<std::size_t>(n_max))
            throw SizeMismatchError("phase matrix data does not match ridges*n_max");
    }

    /// Draws phases row-major from mt19937_64(seed): phase = pi * uniform01.
    static PhaseMatrix random(std::uint64_t seed, int ridges, int n_max)
    {
        if (ridges < 1 || n_max < 1)
            throw InvalidParameterError("phase matrix dimensions must be positive");
        auto rng = make_engine(seed);
        std::vector<double> phases(static_cast<std::size_t>(ridges) * static_cast<std::size_t>(n_max));
        for (auto& p : phases)
            p = std::numbers::pi * uniform01(rng);
        return {ridges, n_max, std::move(phases)};
    }

    int ridges() const noexcept { return ridges_; }
    int n_max() const noexcept { return n_max_; }

    /// Phase for ridge m in [1, M] and frequency n in [1, n_max].
    double operator()(int m, int n) const noexcept
    {
        return phases_[static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(n_max_) + static_cast<std::size_t>(n - 1)];
    }

    const std::vector<double>& values() const noexcept { return phases_; }

    bool operator==(const PhaseMatrix&) const = default;

private:
    int ridges_ = 0;
    int n_max_ = 0;
    std::vector<double> phases_;
};

/// Placement of the sample window in model space.
struct GridSpec
{
    std::size_t size_px = 1009;
    double x0 = 100.9;
    double y0 = 100.9;
    double spacing = 0.1;

    /// One sampling length per window, starting at (L, L) so the radial
    /// center of the function stays off-map.
    static GridSpec defaults_for(const WMParams& params)
    {
        const double L = params.sampling_length;
        return {static_cast<std::size_t>(params.n_max), L, L, L / params.n_max};
    }

    void validate() const
    {
        if (size_px < 2)
            throw InvalidParameterError("grid must be at least 2 pixels per side");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw InvalidParameterError("grid spacing must be > 0");
        if (!std::isfinite(x0) || !std::isfinite(y0))
            throw InvalidParameterError("grid origin must be finite");
    }

    bool operator==(const GridSpec&) const = default;
};

/// A = L (G/L)^(D-2) sqrt(ln(gamma)/M).
inline double amplitude_coefficient(const WMParams& params)
{
    params.validate();
    const double L = params.sampling_length;
    return L * std::pow(params.elevation_scale / L, params.fractal_dim - 2.0)
           * std::sqrt(std::log(params.gamma) / params.ridges);
}

namespace detail {

inline double polar_angle(double x, double y) noexcept
{
    return (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
}

inline void check_phases(const WMParams& params, const PhaseMatrix& phases)
{
    if (phases.ridges() != params.ridges || phases.n_max() != params.n_max)
        throw SizeMismatchError("phase matrix is " + std::to_string(phases.ridges()) + "x"
                                + std::to_string(phases.n_max()) + ", parameters need "
                                + std::to_string(params.ridges) + "x" + std::to_string(params.n_max));
}

} // namespace detail

/// Full double sum at one point, every term included.
inline double evaluate_wm(double x, double y, const WMParams& params, const PhaseMatrix& phases)
{
    params.validate();
    detail::check_phases(params, phases);
    constexpr double pi = std::numbers::pi;
    const double A = amplitude_coefficient(params);
    const double g = params.gamma;
    const double D = params.fractal_dim;
    const double L = params.sampling_length;
    const int M = params.ridges;
    const double r = std::sqrt(x * x + y * y);
    const double theta = detail::polar_angle(x, y);
    double sum = 0.0;
    for (int m = 1; m <= M; ++m) {
        const double ridge = std::cos(theta - pi * m / M);
        for (int n = 1; n <= params.n_max; ++n) {
            const double phi = phases(m, n);
            sum += std::pow(g, (D - 3.0) * n) * (std::cos(phi) - std::cos(2.0 * pi * std::pow(g, n) * r / L * ridge + phi));
        }
    }
    return A * sum;
}

struct WMKernelOptions
{
    /// Skip terms whose amplitude factor is below this fraction of the first
    /// term's. Zero or negative keeps every term.
    double truncation_rel = 1e-12;
    unsigned workers = 1;
    /// Largest grid (in bytes of 64-bit samples) the kernel will allocate.
    std::size_t memory_budget_bytes = std::size_t{2} << 30;
};

/// Precomputed tables for fast repeated evaluation of one band.
///
/// A kernel may carry several fractal dimensions that share the band's
/// phases: the cosine arguments do not depend on D, so one pass yields the
/// surface for every dimension. Each surface sums its own terms in the same
/// (m, n) order as evaluate_wm; large cosine arguments go through cos_wide().
class WMKernel
{
public:
    WMKernel(const WMParams& params, PhaseMatrix phases, double truncation_rel = 1e-12)
        : WMKernel(params, std::vector<double>{params.fractal_dim}, std::move(phases), truncation_rel)
    {
    }

    /// `params.fractal_dim` is ignored in favour of `fractal_dims`.
    WMKernel(const WMParams& params, std::vector<double> fractal_dims, PhaseMatrix phases, double truncation_rel)
        : params_(params), dims_(std::move(fractal_dims)), phases_(std::move(phases))
    {
        if (dims_.empty())
            throw InvalidParameterError("W-M kernel needs at least one fractal dimension");
        params_.fractal_dim = dims_.front();
        for (double D : dims_) {
            WMParams p = params_;
            p.fractal_dim = D;
            p.validate();
            amplitude_.push_back(amplitude_coefficient(p));
        }
        detail::check_phases(params_, phases_);
        constexpr double pi = std::numbers::pi;
        const double g = params_.gamma;
        const int n_max = params_.n_max;

        // Per-dimension term counts; the shared tables span the longest.
        std::vector<int> n_keep(dims_.size(), n_max);
        for (std::size_t d = 0; d < dims_.size(); ++d) {
            if (truncation_rel <= 0.0)
                continue;
            const double first = std::pow(g, (dims_[d] - 3.0) * 1);
            const double cutoff = truncation_rel * first;
            int n = n_max;
            while (n > 1 && std::pow(g, (dims_[d] - 3.0) * n) < cutoff)
                --n;
            n_keep[d] = n;
        }
        n_eff_ = *std::max_element(n_keep.begin(), n_keep.end());
        const auto stride = static_cast<std::size_t>(n_eff_);

        weight_.assign(dims_.size() * stride, 0.0);
        for (std::size_t d = 0; d < dims_.size(); ++d)
            for (int n = 1; n <= n_keep[d]; ++n)
                weight_[d * stride + static_cast<std::size_t>(n - 1)] = std::pow(g, (dims_[d] - 3.0) * n);
        wavenumber_.resize(stride);
        for (int n = 1; n <= n_eff_; ++n)
            wavenumber_[static_cast<std::size_t>(n - 1)] = 2.0 * pi * std::pow(g, n);

        const auto M = static_cast<std::size_t>(params_.ridges);
        phase_.resize(M * stride);
        cos_phase_.resize(M * stride);
        for (int m = 1; m <= params_.ridges; ++m)
            for (int n = 1; n <= n_eff_; ++n) {
                const double phi = phases_(m, n);
                phase_[(m - 1) * stride + (n - 1)] = phi;
                cos_phase_[(m - 1) * stride + (n - 1)] = std::cos(phi);
            }
    }

    const WMParams& params() const noexcept { return params_; }
    const PhaseMatrix& phases() const noexcept { return phases_; }
    const std::vector<double>& fractal_dims() const noexcept { return dims_; }
    std::size_t dims() const noexcept { return dims_.size(); }
    double amplitude(std::size_t d = 0) const noexcept { return amplitude_[d]; }
    /// Number of frequency terms evaluated per ridge.
    int effective_terms() const noexcept { return n_eff_; }

    /// Surface for the first fractal dimension.
    double operator()(double x, double y) const
    {
        if (dims_.size() == 1) {
            double z = 0.0;
            evaluate(x, y, std::span<double>(&z, 1));
            return z;
        }
        std::vector<double> z(dims_.size());
        evaluate(x, y, z);
        return z.front();
    }

    /// out[d] = surface for fractal_dims()[d]; out.size() must equal dims().
    void evaluate(double x, double y, std::span<double> out) const noexcept
    {
        constexpr double pi = std::numbers::pi;
        const int M = params_.ridges;
        const double L = params_.sampling_length;
        const double r = std::sqrt(x * x + y * y);
        const double theta = detail::polar_angle(x, y);
        const auto stride = static_cast<std::size_t>(n_eff_);
        const std::size_t n_dims = dims_.size();
        constexpr std::size_t kInline = 4;
        double sums_inline[kInline] = {};
        std::vector<double> sums_heap;
        double* sums = sums_inline;
        if (n_dims > kInline) {
            sums_heap.assign(n_dims, 0.0);
            sums = sums_heap.data();
        }
        for (int m = 1; m <= M; ++m) {
            const double ridge = std::cos(theta - pi * m / M);
            const double* phi = phase_.data() + (m - 1) * stride;
            const double* cphi = cos_phase_.data() + (m - 1) * stride;
            for (std::size_t k = 0; k < stride; ++k) {
                const double term = cphi[k] - cos_wide(wavenumber_[k] * r / L * ridge + phi[k]);
                for (std::size_t d = 0; d < n_dims; ++d)
                    sums[d] += weight_[d * stride + k] * term;
            }
        }
        for (std::size_t d = 0; d < n_dims; ++d)
            out[d] = amplitude_[d] * sums[d];
    }

private:
    WMParams params_;
    std::vector<double> dims_;
    PhaseMatrix phases_;
    std::vector<double> amplitude_;
    int n_eff_ = 0;
    std::vector<double> weight_;
    std::vector<double> wavenumber_;
    std::vector<double> phase_;
    std::vector<double> cos_phase_;
};

/// Samples every dimension of a kernel on a grid:
/// pixel (i, j) = z(x0 + j*spacing, y0 + i*spacing).
inline std::vector<Grid<double>> sample_grids(const WMKernel& kernel, const GridSpec& grid,
                                              const WMKernelOptions& options = {})
{
    grid.validate();
    const std::size_t n = grid.size_px;
    const std::size_t n_dims = kernel.dims();
    if (n * n > options.memory_budget_bytes / sizeof(double) / n_dims)
        throw ResourceError("grid of " + std::to_string(n) + "^2 samples exceeds the memory budget");
    std::vector<Grid<double>> out(n_dims, Grid<double>(n));
    parallel_for(n, options.workers, [&](std::size_t i) {
        const double y = grid.y0 + static_cast<double>(i) * grid.spacing;
        std::vector<double> z(n_dims);
        for (std::size_t j = 0; j < n; ++j) {
            kernel.evaluate(grid.x0 + static_cast<double>(j) * grid.spacing, y, z);
            for (std::size_t d = 0; d < n_dims; ++d)
                out[d](i, j) = z[d];
        }
    });
    return out;
}

inline Grid<double> sample_grid(const WMKernel& kernel, const GridSpec& grid, const WMKernelOptions& options = {})
{
    return std::move(sample_grids(kernel, grid, options).front());
}

/// Raw monofractal elevation grid for one band and seed.
inline DEM generate_monofractal(const WMParams& params, const GridSpec& grid, std::uint64_t seed,
                                const WMKernelOptions& options = {})
{
    params.validate();
    grid.validate();
    WMKernel kernel(params, PhaseMatrix::random(seed, params.ridges, params.n_max), options.truncation_rel);
    return {sample_grid(kernel, grid, options), DemStage::raw};
}

} // namespace wmterrain
