#pragma once

// Multifractal DEM pipeline: three W-M bands are smoothed, rescaled to zero
// mean and unit peak magnitude, multiplied pixel-wise and quantized to a
// 16-bit image. The image converts to a metric heightfield for simulation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wmterrain/elevation.hpp"
#include "wmterrain/error.hpp"
#include "wmterrain/grid.hpp"
#include "wmterrain/random.hpp"
#include "wmterrain/wm.hpp"

namespace wmterrain {

inline constexpr int kPipelineVersion = 1;
inline constexpr double kQuantMax = 65535.0;

/// Discrete Gaussian weights for offsets -h..h, h = ceil(3 sigma), summing to 1.
inline std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameterError("gaussian sigma must be > 0");
    const auto half = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
    double total = 0.0;
    for (int k = -half; k <= half; ++k) {
        w[static_cast<std::size_t>(k + half)] = std::exp(-(k * k) / (2.0 * sigma * sigma));
        total += w[static_cast<std::size_t>(k + half)];
    }
    for (auto& x : w)
        x /= total;
    return w;
}

/// Separable Gaussian blur with edge replication.
inline DEM gaussian_smooth(const DEM& dem, double sigma)
{
    const auto w = gaussian_kernel(sigma);
    const auto half = static_cast<std::ptrdiff_t>(w.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(dem.size());
    auto clamp = [n](std::ptrdiff_t k) { return k < 0 ? 0 : (k >= n ? n - 1 : k); };

    Grid<double> tmp(dem.size());
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::ptrdiff_t k = -half; k <= half; ++k)
                acc += w[static_cast<std::size_t>(k + half)] * dem.values(i, clamp(j + k));
            tmp(i, j) = acc;
        }
    Grid<double> out(dem.size());
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::ptrdiff_t k = -half; k <= half; ++k)
                acc += w[static_cast<std::size_t>(k + half)] * tmp(clamp(i + k), j);
            out(i, j) = acc;
        }
    return {std::move(out), DemStage::smoothed};
}

/// (v - mean) / max|v - mean|.
inline DEM normalize_zero_mean_unit(const DEM& dem)
{
    const auto values = dem.values.values();
    if (values.empty())
        throw DegenerateInputError("cannot normalize an empty grid");
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double peak = 0.0;
    for (double v : values)
        peak = std::max(peak, std::fabs(v - mean));
    if (!(peak > 0.0) || !std::isfinite(peak))
        throw DegenerateInputError("cannot normalize a constant grid");
    Grid<double> out(dem.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        out[k] = (values[k] - mean) / peak;
    return {std::move(out), DemStage::normalized};
}

/// Pixel-wise product of three equally sized grids.
inline DEM combine_product(const DEM& low, const DEM& mid, const DEM& high)
{
    if (low.size() != mid.size() || low.size() != high.size())
        throw SizeMismatchError("band sizes differ: " + std::to_string(low.size()) + ", " + std::to_string(mid.size())
                                + ", " + std::to_string(high.size()));
    Grid<double> out(low.size());
    for (std::size_t k = 0; k < out.count(); ++k)
        out[k] = low.values[k] * mid.values[k] * high.values[k];
    return {std::move(out), DemStage::combined};
}

/// Affine min-max map onto [0, 65535], ties rounded to even.
inline QuantizedDEM quantize_png16(const DEM& dem)
{
    const auto values = dem.values.values();
    if (values.empty())
        throw DegenerateInputError("cannot quantize an empty grid");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo))
        throw DegenerateInputError("cannot quantize a constant grid");
    const double range = hi - lo;
    Grid<std::uint16_t> out(dem.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        // nearbyint honours the default round-to-nearest-even mode.
        const double q = std::nearbyint((values[k] - lo) / range * kQuantMax);
        out[k] = static_cast<std::uint16_t>(std::clamp(q, 0.0, kQuantMax));
    }
    return {std::move(out)};
}

/// Landscape import scaling. The base resolution is the import pixel size
/// before the XY reduction; the full Z span is the height range the 16-bit
/// scale covers at 100 % Z scaling.
struct WorldScale
{
    double xy_reduction_pct = 95.0;
    double z_scale_pct = 0.75;
    double base_resolution_m = 1.0;
    double z_full_span_m = 512.0;

    double xy_resolution() const { return base_resolution_m * (1.0 - xy_reduction_pct / 100.0); }
    double z_span_m() const { return z_scale_pct / 100.0 * z_full_span_m; }

    void validate() const
    {
        if (!(xy_reduction_pct >= 0.0 && xy_reduction_pct < 100.0))
            throw InvalidParameterError("XY reduction must lie in [0, 100) percent");
        if (!(z_scale_pct > 0.0) || !std::isfinite(z_scale_pct))
            throw InvalidParameterError("Z scale must be > 0 percent");
        if (!(base_resolution_m > 0.0) || !(z_full_span_m > 0.0))
            throw InvalidParameterError("base resolution and full Z span must be > 0");
    }
};

/// elevation_m = (u / 65535 - 0.5) * z_span.
inline Heightfield to_heightfield(const QuantizedDEM& q, const WorldScale& scale = {})
{
    scale.validate();
    const double z_span = scale.z_span_m();
    Grid<double> z(q.size());
    for (std::size_t k = 0; k < z.count(); ++k)
        z[k] = (static_cast<double>(q.values[k]) / kQuantMax - 0.5) * z_span;
    return {std::move(z), scale.xy_resolution()};
}

inline Heightfield to_heightfield(const QuantizedDEM& q, double xy_reduction_pct, double z_scale_pct)
{
    WorldScale scale;
    scale.xy_reduction_pct = xy_reduction_pct;
    scale.z_scale_pct = z_scale_pct;
    return to_heightfield(q, scale);
}

enum class SmoothingPlacement { per_band, after_combination };

struct PipelineOptions
{
    double sigma_px = 2.0;
    SmoothingPlacement smoothing = SmoothingPlacement::per_band;
    WMKernelOptions kernel;
};

enum class Band : std::uint64_t { low = 0, mid = 1, high = 2 };

/// Phase seed of one band of the map with the given seed.
inline std::uint64_t band_seed(std::uint64_t map_seed, Band band)
{
    return derive_seed(map_seed, {static_cast<std::uint64_t>(band)});
}

namespace detail {

inline DEM finish_band(DEM band, const PipelineOptions& options)
{
    if (options.smoothing == SmoothingPlacement::per_band)
        band = gaussian_smooth(band, options.sigma_px);
    return normalize_zero_mean_unit(band);
}

} // namespace detail

/// Builds one multifractal map per entry of `high_dims`. All maps share the
/// phases of all three bands and differ only in the high band's fractal
/// dimension; `high.fractal_dim` is ignored.
inline std::vector<QuantizedDEM> build_multifractal_family(const WMParams& low, const WMParams& mid, const WMParams& high,
                                                           const std::vector<double>& high_dims, const GridSpec& grid,
                                                           std::uint64_t seed, const PipelineOptions& options = {})
{
    low.validate();
    mid.validate();
    grid.validate();
    if (high_dims.empty())
        throw InvalidParameterError("at least one high-band fractal dimension is required");
    if (options.smoothing == SmoothingPlacement::after_combination)
        (void)gaussian_kernel(options.sigma_px);

    const auto& kopt = options.kernel;
    const DEM low_band = detail::finish_band(generate_monofractal(low, grid, band_seed(seed, Band::low), kopt), options);
    const DEM mid_band = detail::finish_band(generate_monofractal(mid, grid, band_seed(seed, Band::mid), kopt), options);

    const WMKernel high_kernel(high, high_dims, PhaseMatrix::random(band_seed(seed, Band::high), high.ridges, high.n_max),
                               kopt.truncation_rel);
    auto high_raw = sample_grids(high_kernel, grid, kopt);

    std::vector<QuantizedDEM> out;
    out.reserve(high_dims.size());
    for (auto& raw : high_raw) {
        const DEM high_band = detail::finish_band({std::move(raw), DemStage::raw}, options);
        DEM combined = combine_product(low_band, mid_band, high_band);
        if (options.smoothing == SmoothingPlacement::after_combination)
            combined = gaussian_smooth(combined, options.sigma_px);
        out.push_back(quantize_png16(combined));
    }
    return out;
}

inline QuantizedDEM build_multifractal(const WMParams& low, const WMParams& mid, const WMParams& high,
                                       const GridSpec& grid, std::uint64_t seed, const PipelineOptions& options = {})
{
    high.validate();
    return std::move(build_multifractal_family(low, mid, high, {high.fractal_dim}, grid, seed, options).front());
}

inline QuantizedDEM build_multifractal(const WMParams& low, const WMParams& mid, const WMParams& high,
                                       const GridSpec& grid, std::uint64_t seed, double sigma_px)
{
    PipelineOptions options;
    options.sigma_px = sigma_px;
    return build_multifractal(low, mid, high, grid, seed, options);
}

} // namespace wmterrain
