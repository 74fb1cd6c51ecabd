#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wmterrain/error.hpp"
#include "wmterrain/roughness.hpp"
#include "wmterrain/traversal.hpp"

namespace wmterrain {

/// Percentage of successes: N_success / N_trials * 100.
inline double success_rate(std::span<const Outcome> outcomes)
{
    if (outcomes.empty())
        throw EmptyInputError("success rate of zero trials");
    const auto n = std::count(outcomes.begin(), outcomes.end(), Outcome::success);
    return static_cast<double>(n) / static_cast<double>(outcomes.size()) * 100.0;
}

inline double rms(std::span<const double> series)
{
    if (series.empty())
        throw EmptyInputError("rms of an empty series");
    double acc = 0.0;
    for (double v : series)
        acc += v * v;
    return std::sqrt(acc / static_cast<double>(series.size()));
}

/// Quantile of sorted data by linear interpolation between order
/// statistics: h = (n - 1) p.
inline double quantile_sorted(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw EmptyInputError("quantile of an empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Boxplot statistics. Outliers lie strictly outside
/// [Q1 - 1.5 IQR, Q3 + 1.5 IQR]; whiskers reach the extreme non-outliers.
struct BoxSummary
{
    std::size_t count = 0;
    double median = std::numeric_limits<double>::quiet_NaN();
    double q1 = std::numeric_limits<double>::quiet_NaN();
    double q3 = std::numeric_limits<double>::quiet_NaN();
    double iqr = std::numeric_limits<double>::quiet_NaN();
    double lower_bound = std::numeric_limits<double>::quiet_NaN();
    double upper_bound = std::numeric_limits<double>::quiet_NaN();
    double whisker_low = std::numeric_limits<double>::quiet_NaN();
    double whisker_high = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> outliers; ///< ascending
};

inline BoxSummary median_iqr_outliers(std::span<const double> values)
{
    if (values.empty())
        throw EmptyInputError("boxplot statistics of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    BoxSummary s;
    s.count = v.size();
    s.median = quantile_sorted(v, 0.5);
    s.q1 = quantile_sorted(v, 0.25);
    s.q3 = quantile_sorted(v, 0.75);
    s.iqr = s.q3 - s.q1;
    s.lower_bound = s.q1 - 1.5 * s.iqr;
    s.upper_bound = s.q3 + 1.5 * s.iqr;
    s.whisker_low = std::numeric_limits<double>::infinity();
    s.whisker_high = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (x < s.lower_bound || x > s.upper_bound) {
            s.outliers.push_back(x);
        } else {
            s.whisker_low = std::min(s.whisker_low, x);
            s.whisker_high = std::max(s.whisker_high, x);
        }
    }
    return s;
}

/// One simulated mission.
struct TrialResult
{
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Outcome outcome = Outcome::stuck;
    double rms_vertical_accel = 0.0; ///< m/s^2
    double rms_pitch_rate = 0.0;     ///< deg/s
    double rms_roll_rate = 0.0;      ///< deg/s
    double traversal_time_s = 0.0;
};

struct MapResult
{
    std::string map_id;
    double fractal_dim = 0.0;
    std::uint64_t seed = 0;
    Composition composition;
    std::vector<TrialResult> trials;

    double success_rate() const
    {
        std::vector<Outcome> o;
        o.reserve(trials.size());
        for (const auto& t : trials)
            o.push_back(t.outcome);
        return wmterrain::success_rate(o);
    }
};

/// Summarises a finished log. Dynamics are only meaningful for successes.
inline TrialResult summarize_trial(const TraversalLog& log, std::size_t index, double dt = 0.05)
{
    TrialResult r;
    r.index = index;
    r.seed = log.seed;
    r.outcome = log.outcome;
    if (log.outcome == Outcome::success && log.samples.size() >= 3) {
        const Dynamics d = derive_dynamics(log, dt);
        r.rms_vertical_accel = rms(d.vertical_accel);
        r.rms_pitch_rate = rms(d.pitch_rate);
        r.rms_roll_rate = rms(d.roll_rate);
        r.traversal_time_s = log.traversal_time_s;
    }
    return r;
}

namespace metric {
inline constexpr const char* low_pct = "low_pct";
inline constexpr const char* semi_pct = "semi_pct";
inline constexpr const char* high_pct = "high_pct";
inline constexpr const char* success_rate = "success_rate";
inline constexpr const char* rms_vertical_accel = "rms_vertical_accel";
inline constexpr const char* rms_pitch_rate = "rms_pitch_rate";
inline constexpr const char* rms_roll_rate = "rms_roll_rate";
inline constexpr const char* traversal_time = "traversal_time";
} // namespace metric

/// Metric names in report order.
inline const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names = {metric::low_pct,        metric::semi_pct,       metric::high_pct,
                                                   metric::success_rate,   metric::rms_vertical_accel,
                                                   metric::rms_pitch_rate, metric::rms_roll_rate,  metric::traversal_time};
    return names;
}

struct GroupSummary
{
    double fractal_dim = 0.0;
    std::size_t maps = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    /// Metrics with no samples (e.g. dynamics when nothing succeeded) are absent.
    std::map<std::string, BoxSummary> metrics;
};

/// Per-D summaries, ascending in D. Map-level metrics (composition, success
/// rate) take one value per map; dynamics and traversal time pool the
/// successful trials of every map in the group.
inline std::vector<GroupSummary> aggregate(std::span<const MapResult> results)
{
    std::map<double, std::vector<const MapResult*>> groups;
    for (const auto& r : results)
        groups[r.fractal_dim].push_back(&r);

    std::vector<GroupSummary> out;
    for (const auto& [dim, maps] : groups) {
        GroupSummary g;
        g.fractal_dim = dim;
        g.maps = maps.size();
        std::map<std::string, std::vector<double>> samples;
        for (const MapResult* m : maps) {
            samples[metric::low_pct].push_back(m->composition.low_pct);
            samples[metric::semi_pct].push_back(m->composition.semi_pct);
            samples[metric::high_pct].push_back(m->composition.high_pct);
            if (!m->trials.empty())
                samples[metric::success_rate].push_back(m->success_rate());
            for (const auto& t : m->trials) {
                ++g.trials;
                if (t.outcome != Outcome::success)
                    continue;
                ++g.successes;
                samples[metric::rms_vertical_accel].push_back(t.rms_vertical_accel);
                samples[metric::rms_pitch_rate].push_back(t.rms_pitch_rate);
                samples[metric::rms_roll_rate].push_back(t.rms_roll_rate);
                samples[metric::traversal_time].push_back(t.traversal_time_s);
            }
        }
        for (auto& [name, values] : samples)
            if (!values.empty())
                g.metrics.emplace(name, median_iqr_outliers(values));
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace wmterrain
