#pragma once

// Random straight-line A-to-B missions on a closed roughness map.
//
// A mission starts on a uniformly drawn low-roughness pixel, heads in a
// uniformly drawn direction, and ends `length_m` away. Start and goal stay at
// least `border_m` from the map edge, and the goal pixel (nearest to the goal
// point) must be low or semi-rough. Rejected candidates redraw both the start
// and the heading.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "wmterrain/error.hpp"
#include "wmterrain/random.hpp"
#include "wmterrain/roughness.hpp"

namespace wmterrain {

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

inline double distance(Point2 a, Point2 b) noexcept
{
    return std::hypot(b.x - a.x, b.y - a.y);
}

struct Mission
{
    Point2 start;
    double heading_deg = 0.0; ///< counter-clockwise from +x, in [0, 360)
    Point2 goal;
    double length_m = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const Mission&) const = default;
};

struct MissionConstraints
{
    double length_m = 35.0;
    double border_m = 5.0;
    int retry_cap = 10000;
};

/// Pixel nearest to a point in meters (clamped to the grid).
inline std::pair<std::size_t, std::size_t> nearest_pixel(Point2 p, double xy_resolution, std::size_t size)
{
    auto idx = [&](double c) {
        const double k = std::round(c / xy_resolution);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(size - 1)));
    };
    return {idx(p.y), idx(p.x)};
}

/// Draws missions from one closed roughness map.
class MissionSampler
{
public:
    MissionSampler(const RoughnessMap& closed, double xy_resolution, MissionConstraints constraints = {})
        : map_(&closed), resolution_(xy_resolution), constraints_(constraints)
    {
        if (!(xy_resolution > 0.0))
            throw InvalidParameterError("xy resolution must be > 0");
        if (!(constraints_.length_m > 0.0) || constraints_.retry_cap < 1 || !(constraints_.border_m >= 0.0))
            throw InvalidParameterError("invalid mission constraints");
        span_ = static_cast<double>(closed.size() - 1) * xy_resolution;
        const IndexRange range = interior_range(closed.size(), xy_resolution, constraints_.border_m);
        if (!range.empty())
            for (std::size_t i = range.first; i <= range.last; ++i)
                for (std::size_t j = range.first; j <= range.last; ++j)
                    if (closed.classes(i, j) == Roughness::low)
                        starts_.push_back(static_cast<std::uint32_t>(i * closed.size() + j));
    }

    /// Number of interior low-roughness pixels a mission may start on.
    std::size_t eligible_starts() const noexcept { return starts_.size(); }

    Mission sample(RandomEngine& rng) const
    {
        if (starts_.empty())
            throw NoValidMissionError("map has no low-roughness pixel inside the border");
        const std::size_t n = map_->size();
        for (int attempt = 0; attempt < constraints_.retry_cap; ++attempt) {
            const std::uint32_t k = starts_[uniform_index(rng, starts_.size())];
            const Point2 start{static_cast<double>(k % n) * resolution_, static_cast<double>(k / n) * resolution_};
            const double heading = 360.0 * uniform01(rng);
            const double rad = heading * std::numbers::pi / 180.0;
            const Point2 goal{start.x + constraints_.length_m * std::cos(rad), start.y + constraints_.length_m * std::sin(rad)};
            if (!goal_allowed(goal))
                continue;
            return {start, heading, goal, distance(start, goal), 0};
        }
        throw NoValidMissionError("no valid mission after " + std::to_string(constraints_.retry_cap) + " attempts");
    }

    /// True when the goal point satisfies the border and roughness rules.
    bool goal_allowed(Point2 goal) const
    {
        const double b = constraints_.border_m;
        if (goal.x < b || goal.y < b || goal.x > span_ - b || goal.y > span_ - b)
            return false;
        const auto [i, j] = nearest_pixel(goal, resolution_, map_->size());
        return map_->classes(i, j) != Roughness::high;
    }

    const MissionConstraints& constraints() const noexcept { return constraints_; }

private:
    const RoughnessMap* map_;
    double resolution_;
    MissionConstraints constraints_;
    double span_ = 0.0;
    std::vector<std::uint32_t> starts_;
};

inline Mission sample_mission(const RoughnessMap& closed, double xy_resolution, RandomEngine& rng,
                              MissionConstraints constraints = {})
{
    return MissionSampler(closed, xy_resolution, constraints).sample(rng);
}

/// `count` missions; mission k draws from its own stream seeded with
/// derive_seed(seed, {k}), recorded in Mission::seed.
inline std::vector<Mission> sample_missions(const RoughnessMap& closed, double xy_resolution, std::size_t count,
                                            std::uint64_t seed, MissionConstraints constraints = {})
{
    std::vector<Mission> out;
    if (count == 0)
        return out;
    const MissionSampler sampler(closed, xy_resolution, constraints);
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t mission_seed = derive_seed(seed, {k});
        auto rng = make_engine(mission_seed);
        Mission m = sampler.sample(rng);
        m.seed = mission_seed;
        out.push_back(m);
    }
    return out;
}

} // namespace wmterrain
