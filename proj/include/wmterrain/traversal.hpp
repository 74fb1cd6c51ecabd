#pragma once

// Kinematic skid-steer surrogate.
//
// The chassis rests on the least-squares plane through the terrain heights
// under its four wheels. A pure-pursuit tracker steers toward the mission
// line; planar speed is the commanded speed scaled by cos(pitch) and by a
// traction factor that falls linearly to zero as the steepest terrain slope
// under the wheels reaches `stop_slope`. Runs end on reaching the goal, on
// tipping past the tip angle, or when the vehicle moves less than the stuck
// distance over the trailing stuck window.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "wmterrain/elevation.hpp"
#include "wmterrain/error.hpp"
#include "wmterrain/missions.hpp"
#include "wmterrain/roughness.hpp"

namespace wmterrain {

struct VehicleSpec
{
    double wheelbase_m = 0.512;
    double track_m = 0.555;
    double tire_radius_m = 0.165;
    double tire_width_m = 0.125;
    double speed_mps = 1.0;
    double tip_deg = 75.0;
    double stuck_distance_m = 0.2;
    double stuck_window_s = 30.0;
    double goal_tolerance_m = 0.5;
    double lookahead_m = 1.0;
    double max_yaw_rate_dps = 90.0;
    double time_cap_s = 300.0;
    double dt_s = 0.05;
    /// Slope (rise over run) under a wheel at which traction reaches zero.
    double stop_slope = 0.82;
    /// Slope up to which traction stays at one.
    double free_slope = 0.0;

    void validate() const
    {
        const double positives[] = {wheelbase_m,    track_m,     tire_radius_m,    tire_width_m, speed_mps,
                                    stuck_distance_m, stuck_window_s, goal_tolerance_m, lookahead_m,
                                    max_yaw_rate_dps, time_cap_s, dt_s,  stop_slope};
        for (double v : positives)
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidParameterError("vehicle parameters must be positive and finite");
        if (!(tip_deg > 0.0 && tip_deg < 90.0))
            throw InvalidParameterError("tip threshold must lie in (0, 90) degrees");
        if (!(free_slope >= 0.0 && free_slope < stop_slope))
            throw InvalidParameterError("free slope must lie in [0, stop slope)");
    }
};

struct VehicleState
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double yaw_deg = 0.0;
    double pitch_deg = 0.0; ///< nose up positive
    double roll_deg = 0.0;  ///< left side up positive
    double t = 0.0;
};

enum class Outcome { success, tipped, stuck };

constexpr std::string_view to_string(Outcome o) noexcept
{
    switch (o) {
    case Outcome::success: return "success";
    case Outcome::tipped: return "tipped";
    case Outcome::stuck: return "stuck";
    }
    return "unknown";
}

struct TraversalLog
{
    std::vector<VehicleState> samples;
    Outcome outcome = Outcome::stuck;
    double traversal_time_s = 0.0; ///< meaningful for successes only
    std::uint64_t seed = 0;
};

struct TerrainPose
{
    double z = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

namespace detail {

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Wheel contact points (front-left, front-right, rear-left, rear-right)
/// with their body-frame (forward, left) offsets.
struct WheelContacts
{
    Point2 world[4];
    double forward[4];
    double left[4];
};

inline WheelContacts wheel_contacts(Point2 p, double yaw_deg, const VehicleSpec& spec)
{
    const double c = std::cos(yaw_deg * kDegToRad);
    const double s = std::sin(yaw_deg * kDegToRad);
    const double hf = 0.5 * spec.wheelbase_m;
    const double hl = 0.5 * spec.track_m;
    WheelContacts w{};
    const double fwd[4] = {hf, hf, -hf, -hf};
    const double lft[4] = {hl, -hl, hl, -hl};
    for (int k = 0; k < 4; ++k) {
        w.forward[k] = fwd[k];
        w.left[k] = lft[k];
        w.world[k] = {p.x + fwd[k] * c - lft[k] * s, p.y + fwd[k] * s + lft[k] * c};
    }
    return w;
}

} // namespace detail

/// Chassis height and attitude from a least-squares plane through the four
/// wheel-contact heights.
inline TerrainPose pose_on_terrain(const Heightfield& h, Point2 position, double yaw_deg, const VehicleSpec& spec)
{
    const auto w = detail::wheel_contacts(position, yaw_deg, spec);
    double zs[4];
    for (int k = 0; k < 4; ++k) {
        if (!h.contains(w.world[k].x, w.world[k].y))
            throw OutOfBoundsError("vehicle footprint leaves the heightfield");
        zs[k] = h.height_at(w.world[k].x, w.world[k].y);
    }
    // z = a + b*forward + c*left; the normal equations are diagonal for a
    // centred rectangle.
    double a = 0.0, suz = 0.0, suu = 0.0, svz = 0.0, svv = 0.0;
    for (int k = 0; k < 4; ++k) {
        a += zs[k];
        suz += w.forward[k] * zs[k];
        suu += w.forward[k] * w.forward[k];
        svz += w.left[k] * zs[k];
        svv += w.left[k] * w.left[k];
    }
    a /= 4.0;
    const double b = suz / suu;
    const double c = svz / svv;
    // Pitch: elevation angle of the chassis forward axis. Roll: elevation
    // angle of the lateral axis lying in the plane, perpendicular to forward.
    const double pitch = std::atan(b);
    const double roll = std::asin(c / std::sqrt((1.0 + b * b) * (1.0 + b * b + c * c)));
    return {a + spec.tire_radius_m, pitch * detail::kRadToDeg, roll * detail::kRadToDeg};
}

/// Point where the circle of radius `lookahead` around `p` meets the mission
/// line (extended past both ends), taking the intersection further along the
/// line. When the line is out of reach, the foot of the perpendicular.
inline Point2 lookahead_point(Point2 p, const Mission& m, double lookahead)
{
    const double len = distance(m.start, m.goal);
    const double dx = (m.goal.x - m.start.x) / len;
    const double dy = (m.goal.y - m.start.y) / len;
    const double rx = p.x - m.start.x;
    const double ry = p.y - m.start.y;
    const double along = rx * dx + ry * dy;
    const double cross = -rx * dy + ry * dx;
    const double reach2 = lookahead * lookahead - cross * cross;
    const double s = reach2 > 0.0 ? along + std::sqrt(reach2) : along;
    return {m.start.x + s * dx, m.start.y + s * dy};
}

/// Simulator for one heightfield; caches the slope map used for traction.
class TraversalSimulator
{
public:
    TraversalSimulator(const Heightfield& h, VehicleSpec spec)
        : h_(&h), spec_(spec), slope_(moore_gradient(h.elevations(), h.xy_resolution()))
    {
        spec_.validate();
    }

    const VehicleSpec& spec() const noexcept { return spec_; }
    const Grid<double>& slope_map() const noexcept { return slope_; }

    VehicleState initial_state(const Mission& m) const
    {
        const TerrainPose pose = pose_on_terrain(*h_, m.start, m.heading_deg, spec_);
        return {m.start.x, m.start.y, pose.z, m.heading_deg, pose.pitch_deg, pose.roll_deg, 0.0};
    }

    /// Traction in [0, 1] from the steepest slope under any wheel.
    double traction(Point2 p, double yaw_deg) const
    {
        const auto w = detail::wheel_contacts(p, yaw_deg, spec_);
        double g = 0.0;
        for (const auto& c : w.world) {
            const auto [i, j] = nearest_pixel(c, h_->xy_resolution(), h_->size());
            g = std::max(g, slope_(i, j));
        }
        return std::clamp((spec_.stop_slope - g) / (spec_.stop_slope - spec_.free_slope), 0.0, 1.0);
    }

    VehicleState step(const VehicleState& s, const Mission& m) const
    {
        const Point2 p{s.x, s.y};
        const Point2 target = lookahead_point(p, m, spec_.lookahead_m);
        const double to_target = distance(p, target);
        const double yaw = s.yaw_deg * detail::kDegToRad;
        double curvature = 0.0;
        if (to_target > 0.0) {
            const double alpha = std::atan2(target.y - p.y, target.x - p.x) - yaw;
            curvature = 2.0 * std::sin(alpha) / to_target;
        }
        const double speed = spec_.speed_mps * std::max(0.0, std::cos(s.pitch_deg * detail::kDegToRad)) * traction(p, s.yaw_deg);
        const double max_rate = spec_.max_yaw_rate_dps * detail::kDegToRad;
        const double yaw_rate = std::clamp(speed * curvature, -max_rate, max_rate);
        const double dt = spec_.dt_s;
        const double yaw_next = yaw + yaw_rate * dt;
        const double heading = 0.5 * (yaw + yaw_next);

        VehicleState next;
        next.x = s.x + speed * dt * std::cos(heading);
        next.y = s.y + speed * dt * std::sin(heading);
        next.yaw_deg = std::remainder(yaw_next * detail::kRadToDeg, 360.0);
        if (next.yaw_deg < 0.0)
            next.yaw_deg += 360.0;
        const TerrainPose pose = pose_on_terrain(*h_, {next.x, next.y}, next.yaw_deg, spec_);
        next.z = pose.z;
        next.pitch_deg = pose.pitch_deg;
        next.roll_deg = pose.roll_deg;
        next.t = s.t + dt;
        return next;
    }

    TraversalLog run(const Mission& m, std::uint64_t seed = 0) const
    {
        TraversalLog log;
        log.seed = seed;
        const auto window = static_cast<std::size_t>(std::llround(spec_.stuck_window_s / spec_.dt_s));
        const auto cap = static_cast<std::size_t>(std::llround(spec_.time_cap_s / spec_.dt_s));
        const double len = distance(m.start, m.goal);
        const double dx = (m.goal.x - m.start.x) / len;
        const double dy = (m.goal.y - m.start.y) / len;

        VehicleState s;
        try {
            s = initial_state(m);
        } catch (const OutOfBoundsError&) {
            log.outcome = Outcome::stuck;
            return log;
        }
        log.samples.reserve(cap + 1);
        log.samples.push_back(s);
        for (std::size_t k = 0;; ++k) {
            if (std::fabs(s.pitch_deg) > spec_.tip_deg || std::fabs(s.roll_deg) > spec_.tip_deg) {
                log.outcome = Outcome::tipped;
                return log;
            }
            // Done once the vehicle crosses the goal line within tolerance.
            const double along = (s.x - m.start.x) * dx + (s.y - m.start.y) * dy;
            if (along >= len && distance({s.x, s.y}, m.goal) <= spec_.goal_tolerance_m) {
                log.outcome = Outcome::success;
                log.traversal_time_s = s.t;
                return log;
            }
            if (k >= window) {
                const VehicleState& past = log.samples[k - window];
                if (distance({s.x, s.y}, {past.x, past.y}) < spec_.stuck_distance_m) {
                    log.outcome = Outcome::stuck;
                    return log;
                }
            }
            if (k >= cap) {
                log.outcome = Outcome::stuck;
                return log;
            }
            try {
                s = step(s, m);
            } catch (const OutOfBoundsError&) {
                log.outcome = Outcome::stuck;
                return log;
            }
            log.samples.push_back(s);
        }
    }

private:
    const Heightfield* h_;
    VehicleSpec spec_;
    Grid<double> slope_;
};

inline VehicleState step(const VehicleState& state, const Mission& mission, const Heightfield& h, const VehicleSpec& spec)
{
    return TraversalSimulator(h, spec).step(state, mission);
}

inline TraversalLog run_mission(const Mission& mission, const Heightfield& h, const VehicleSpec& spec, std::uint64_t seed = 0)
{
    return TraversalSimulator(h, spec).run(mission, seed);
}

struct Dynamics
{
    std::vector<double> vertical_accel;     ///< m/s^2 at samples 1..n-2
    std::vector<double> vertical_accel_t;
    std::vector<double> pitch_rate;         ///< deg/s between consecutive samples
    std::vector<double> roll_rate;
    std::vector<double> rate_t;
};

/// Second central difference of z; first differences of pitch and roll
/// stamped at interval midpoints.
inline Dynamics derive_dynamics(const TraversalLog& log, double dt = 0.05)
{
    const auto& s = log.samples;
    if (s.size() < 3)
        throw DegenerateInputError("dynamics need at least 3 samples");
    Dynamics d;
    const std::size_t n = s.size();
    d.vertical_accel.reserve(n - 2);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        d.vertical_accel.push_back((s[k + 1].z - 2.0 * s[k].z + s[k - 1].z) / (dt * dt));
        d.vertical_accel_t.push_back(s[k].t);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        d.pitch_rate.push_back((s[k + 1].pitch_deg - s[k].pitch_deg) / dt);
        d.roll_rate.push_back((s[k + 1].roll_deg - s[k].roll_deg) / dt);
        d.rate_t.push_back(0.5 * (s[k].t + s[k + 1].t));
    }
    return d;
}

} // namespace wmterrain
