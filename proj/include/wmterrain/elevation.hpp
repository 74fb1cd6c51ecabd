#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "wmterrain/error.hpp"
#include "wmterrain/grid.hpp"

namespace wmterrain {

enum class DemStage { raw, smoothed, normalized, combined };

constexpr std::string_view to_string(DemStage stage) noexcept
{
    switch (stage) {
    case DemStage::raw: return "raw";
    case DemStage::smoothed: return "smoothed";
    case DemStage::normalized: return "normalized";
    case DemStage::combined: return "combined";
    }
    return "unknown";
}

/// Elevation grid in model units (or dimensionless once normalized).
struct DEM
{
    Grid<double> values;
    DemStage stage = DemStage::raw;

    std::size_t size() const noexcept { return values.size(); }
};

/// 16-bit image of a DEM.
struct QuantizedDEM
{
    Grid<std::uint16_t> values;

    std::size_t size() const noexcept { return values.size(); }
    bool operator==(const QuantizedDEM&) const = default;
};

/// Elevations in meters on a square lattice; pixel (i, j) sits at
/// x = j * xy_resolution, y = i * xy_resolution.
class Heightfield
{
public:
    Heightfield() = default;

    Heightfield(Grid<double> elevations, double xy_resolution)
        : elevations_(std::move(elevations)), xy_resolution_(xy_resolution)
    {
        if (!(xy_resolution_ > 0.0))
            throw InvalidParameterError("heightfield resolution must be > 0");
        if (elevations_.size() < 2)
            throw InvalidParameterError("heightfield needs at least 2x2 samples");
    }

    std::size_t size() const noexcept { return elevations_.size(); }
    double xy_resolution() const noexcept { return xy_resolution_; }
    const Grid<double>& elevations() const noexcept { return elevations_; }

    /// Distance between the outermost pixel centers.
    double span() const noexcept { return static_cast<double>(size() - 1) * xy_resolution_; }

    double min_elevation() const { return *std::min_element(elevations_.begin(), elevations_.end()); }
    double max_elevation() const { return *std::max_element(elevations_.begin(), elevations_.end()); }

    bool contains(double x, double y) const noexcept
    {
        return x >= 0.0 && y >= 0.0 && x <= span() && y <= span();
    }

    /// Bilinear height at (x, y) meters.
    double height_at(double x, double y) const
    {
        if (!contains(x, y))
            throw OutOfBoundsError("point lies outside the heightfield");
        const double u = x / xy_resolution_;
        const double v = y / xy_resolution_;
        const std::size_t last = size() - 1;
        const auto j0 = std::min(static_cast<std::size_t>(u), last - 1);
        const auto i0 = std::min(static_cast<std::size_t>(v), last - 1);
        const double fu = u - static_cast<double>(j0);
        const double fv = v - static_cast<double>(i0);
        const double z00 = elevations_(i0, j0);
        const double z01 = elevations_(i0, j0 + 1);
        const double z10 = elevations_(i0 + 1, j0);
        const double z11 = elevations_(i0 + 1, j0 + 1);
        return (z00 * (1.0 - fu) + z01 * fu) * (1.0 - fv) + (z10 * (1.0 - fu) + z11 * fu) * fv;
    }

private:
    Grid<double> elevations_;
    double xy_resolution_ = 0.05;
};

} // namespace wmterrain
