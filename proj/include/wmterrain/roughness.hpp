#pragma once

// Roughness analysis on 16-bit DEMs.
//
// Each pixel's roughness is the largest absolute rise-over-run to any of its
// Moore neighbours, with elevations in raw 16-bit units and distances in
// centimetres. The default thresholds 50 / 140 split pixels into low, semi and
// high roughness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "wmterrain/elevation.hpp"
#include "wmterrain/error.hpp"
#include "wmterrain/grid.hpp"

namespace wmterrain {

enum class Roughness : std::uint8_t { low = 0, semi = 1, high = 2 };

struct GradientMap
{
    Grid<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

struct RoughnessThresholds
{
    double low_semi = 50.0;
    double semi_high = 140.0;
};

struct RoughnessMap
{
    Grid<Roughness> classes;
    RoughnessThresholds thresholds;

    std::size_t size() const noexcept { return classes.size(); }
};

struct Composition
{
    double low_pct = 0.0;
    double semi_pct = 0.0;
    double high_pct = 0.0;
};

/// Max over the available Moore neighbours of |z_p - z_q| / dist(p, q).
/// Edge neighbours sit at `edge_dist`, diagonal ones at edge_dist * sqrt(2).
template<typename T>
Grid<double> moore_gradient(const Grid<T>& z, double edge_dist)
{
    const std::size_t n = z.size();
    if (n < 3)
        throw DegenerateInputError("gradient map needs at least a 3x3 grid");
    if (!(edge_dist > 0.0))
        throw InvalidParameterError("neighbour distance must be > 0");
    const double diag_dist = edge_dist * std::numbers::sqrt2;
    Grid<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i0 = i == 0 ? 0 : i - 1;
        const std::size_t i1 = std::min(i + 1, n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t j0 = j == 0 ? 0 : j - 1;
            const std::size_t j1 = std::min(j + 1, n - 1);
            const double zp = static_cast<double>(z(i, j));
            double edge = 0.0;
            double diag = 0.0;
            for (std::size_t a = i0; a <= i1; ++a)
                for (std::size_t b = j0; b <= j1; ++b) {
                    const double d = std::fabs(zp - static_cast<double>(z(a, b)));
                    if (a == i || b == j)
                        edge = std::max(edge, d);
                    else
                        diag = std::max(diag, d);
                }
            out(i, j) = std::max(edge / edge_dist, diag / diag_dist);
        }
    }
    return out;
}

/// Gradient map of a 16-bit DEM in (16-bit units) per centimetre.
inline GradientMap moore_gradient_map(const QuantizedDEM& q, double xy_resolution_m)
{
    if (!(xy_resolution_m > 0.0))
        throw InvalidParameterError("xy resolution must be > 0");
    return {moore_gradient(q.values, xy_resolution_m * 100.0)};
}

inline Roughness classify_value(double g, const RoughnessThresholds& t) noexcept
{
    if (g <= t.low_semi)
        return Roughness::low;
    if (g <= t.semi_high)
        return Roughness::semi;
    return Roughness::high;
}

inline RoughnessMap classify(const GradientMap& g, RoughnessThresholds thresholds = {})
{
    if (!(thresholds.low_semi < thresholds.semi_high))
        throw InvalidParameterError("roughness thresholds must satisfy low/semi < semi/high");
    Grid<Roughness> classes(g.size());
    for (std::size_t k = 0; k < classes.count(); ++k)
        classes[k] = classify_value(g.values[k], thresholds);
    return {std::move(classes), thresholds};
}

inline RoughnessMap classify(const GradientMap& g, double low_semi, double semi_high)
{
    return classify(g, RoughnessThresholds{low_semi, semi_high});
}

// --- binary morphology -------------------------------------------------------

using Mask = Grid<std::uint8_t>;

/// Row half-widths of a discrete disk: offsets (di, dj) with di^2 + dj^2 <= r^2.
inline std::vector<int> disk_half_widths(int radius)
{
    if (radius < 1)
        throw InvalidParameterError("disk radius must be >= 1");
    std::vector<int> w(static_cast<std::size_t>(2 * radius + 1));
    for (int di = -radius; di <= radius; ++di) {
        int h = 0;
        while ((h + 1) * (h + 1) + di * di <= radius * radius)
            ++h;
        w[static_cast<std::size_t>(di + radius)] = h;
    }
    return w;
}

/// Disk dilation; pixels outside the grid count as background.
inline Mask dilate(const Mask& m, int radius)
{
    const auto widths = disk_half_widths(radius);
    const auto n = static_cast<std::ptrdiff_t>(m.size());
    // prefix(i, j) = foreground count in row i over columns [0, j).
    std::vector<std::int32_t> prefix(static_cast<std::size_t>(n * (n + 1)));
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = 0; j < n; ++j)
            prefix[static_cast<std::size_t>(i * (n + 1) + j + 1)] =
                prefix[static_cast<std::size_t>(i * (n + 1) + j)] + (m(i, j) ? 1 : 0);

    Mask out(m.size(), 0);
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            for (int di = -radius; di <= radius; ++di) {
                const std::ptrdiff_t r = i + di;
                if (r < 0 || r >= n)
                    continue;
                const int w = widths[static_cast<std::size_t>(di + radius)];
                const std::ptrdiff_t c0 = std::max<std::ptrdiff_t>(0, j - w);
                const std::ptrdiff_t c1 = std::min<std::ptrdiff_t>(n, j + w + 1);
                if (prefix[static_cast<std::size_t>(r * (n + 1) + c1)] - prefix[static_cast<std::size_t>(r * (n + 1) + c0)] > 0) {
                    out(i, j) = 1;
                    break;
                }
            }
        }
    return out;
}

inline Mask complement(const Mask& m)
{
    Mask out(m.size());
    for (std::size_t k = 0; k < m.count(); ++k)
        out[k] = m[k] ? 0 : 1;
    return out;
}

/// Disk erosion; pixels outside the grid count as foreground.
inline Mask erode(const Mask& m, int radius)
{
    return complement(dilate(complement(m), radius));
}

/// Dilation then erosion. Extensive: close(m) contains m.
inline Mask close(const Mask& m, int radius)
{
    return erode(dilate(m, radius), radius);
}

inline Mask class_mask(const RoughnessMap& r, Roughness at_least)
{
    Mask out(r.size());
    for (std::size_t k = 0; k < out.count(); ++k)
        out[k] = r.classes[k] >= at_least ? 1 : 0;
    return out;
}

/// Closes the high mask and the semi-or-high mask, then relabels each pixel
/// by priority high > semi > low.
inline RoughnessMap morphological_close(const RoughnessMap& r, int disk_radius)
{
    const Mask high = close(class_mask(r, Roughness::high), disk_radius);
    const Mask rough = close(class_mask(r, Roughness::semi), disk_radius);
    RoughnessMap out{Grid<Roughness>(r.size()), r.thresholds};
    for (std::size_t k = 0; k < out.classes.count(); ++k)
        out.classes[k] = high[k] ? Roughness::high : (rough[k] ? Roughness::semi : Roughness::low);
    return out;
}

// --- composition -------------------------------------------------------------

/// Inclusive index range of pixels whose centers lie at least `border_m`
/// from both outermost pixel centers. Empty when first > last.
struct IndexRange
{
    std::size_t first = 0;
    std::size_t last = 0;

    bool empty() const noexcept { return first > last; }
    std::size_t count() const noexcept { return empty() ? 0 : last - first + 1; }
    bool contains(std::size_t k) const noexcept { return k >= first && k <= last; }
};

inline IndexRange interior_range(std::size_t size, double xy_resolution_m, double border_m)
{
    if (!(xy_resolution_m > 0.0))
        throw InvalidParameterError("xy resolution must be > 0");
    if (size == 0)
        return {1, 0};
    constexpr double eps = 1e-9;
    const double span = static_cast<double>(size - 1) * xy_resolution_m;
    const double lo = std::ceil(border_m / xy_resolution_m - eps);
    const double hi = std::floor((span - border_m) / xy_resolution_m + eps);
    if (hi < lo || hi < 0.0)
        return {1, 0};
    return {static_cast<std::size_t>(std::max(lo, 0.0)), static_cast<std::size_t>(hi)};
}

/// Class percentages over the interior. Expects the map before closing.
inline Composition composition(const RoughnessMap& r, double xy_resolution_m, double border_m = 5.0)
{
    const IndexRange range = interior_range(r.size(), xy_resolution_m, border_m);
    if (range.empty())
        throw DegenerateInputError("no pixels remain after removing a " + std::to_string(border_m) + " m border");
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = range.first; i <= range.last; ++i)
        for (std::size_t j = range.first; j <= range.last; ++j)
            ++counts[static_cast<std::size_t>(r.classes(i, j))];
    const double total = static_cast<double>(range.count() * range.count());
    return {100.0 * static_cast<double>(counts[0]) / total, 100.0 * static_cast<double>(counts[1]) / total,
            100.0 * static_cast<double>(counts[2]) / total};
}

} // namespace wmterrain
