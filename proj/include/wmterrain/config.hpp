#pragma once

// Experiment configuration. Loaded from an INI document; every key is
// optional and falls back to the defaults below.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wmterrain/dem.hpp"
#include "wmterrain/error.hpp"
#include "wmterrain/missions.hpp"
#include "wmterrain/roughness.hpp"
#include "wmterrain/traversal.hpp"
#include "wmterrain/wm.hpp"

namespace wmterrain {

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct ExperimentConfig
{
    // [experiment]
    std::vector<double> fractal_dims{2.3, 2.45, 2.6};
    std::size_t maps_per_dim = 20;
    std::size_t missions_per_map = 20;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    unsigned workers = 1;
    std::size_t size_px = 1009;

    // [low] [mid] [high]; n_max follows size_px and the high band's D
    // follows fractal_dims.
    WMParams low = bands::low();
    WMParams mid = bands::mid();
    WMParams high = bands::high(2.3);

    // [terrain]
    double sigma_px = 2.0;
    SmoothingPlacement smoothing = SmoothingPlacement::per_band;
    double truncation_rel = 1e-12;
    bool window_auto = true; ///< window at (L, L) of the low band
    double window_x0 = 0.0;
    double window_y0 = 0.0;
    std::size_t memory_budget_bytes = std::size_t{2} << 30;

    // [world]
    WorldScale scale;
    bool base_resolution_auto = true; ///< keep 1008 x 5 cm = 50.4 m across at any size

    // [roughness]
    RoughnessThresholds thresholds;
    int disk_radius_px = 5;
    double border_m = 5.0;

    // [missions]
    MissionConstraints missions;

    // [vehicle]
    VehicleSpec vehicle;
    bool stop_slope_auto = true; ///< physical slope of the semi/high threshold

    // [output]
    bool write_logs = false;

    GridSpec grid() const
    {
        WMParams p = low;
        p.n_max = static_cast<int>(size_px);
        GridSpec g = GridSpec::defaults_for(p);
        if (!window_auto) {
            g.x0 = window_x0;
            g.y0 = window_y0;
        }
        return g;
    }

    WMParams low_band() const { return with_size(low); }
    WMParams mid_band() const { return with_size(mid); }
    WMParams high_band(double d) const
    {
        WMParams p = with_size(high);
        p.fractal_dim = d;
        return p;
    }

    WorldScale world_scale() const
    {
        WorldScale s = scale;
        if (base_resolution_auto)
            s.base_resolution_m = 1008.0 / static_cast<double>(size_px - 1);
        return s;
    }

    double xy_resolution() const { return world_scale().xy_resolution(); }

    /// Slope in m/m that a gradient of `g` 16-bit units per cm represents.
    double physical_slope(double g) const { return g * 100.0 / kQuantMax * world_scale().z_span_m(); }

    VehicleSpec vehicle_spec() const
    {
        VehicleSpec v = vehicle;
        if (stop_slope_auto)
            v.stop_slope = physical_slope(thresholds.semi_high);
        return v;
    }

    PipelineOptions pipeline() const
    {
        PipelineOptions o;
        o.sigma_px = sigma_px;
        o.smoothing = smoothing;
        o.kernel.truncation_rel = truncation_rel;
        o.kernel.workers = 1;
        o.kernel.memory_budget_bytes = memory_budget_bytes;
        return o;
    }

    void validate() const
    {
        if (fractal_dims.empty())
            throw InvalidParameterError("at least one fractal dimension is required");
        std::set<double> seen;
        for (double d : fractal_dims) {
            if (!(d > 2.0 && d < 3.0))
                throw InvalidParameterError("fractal dimension " + format_number(d) + " outside (2, 3)");
            if (!seen.insert(d).second)
                throw InvalidParameterError("fractal dimension " + format_number(d) + " listed twice");
        }
        if (maps_per_dim < 1 || missions_per_map < 1)
            throw InvalidParameterError("map and mission counts must be positive");
        if (workers < 1)
            throw InvalidParameterError("workers must be >= 1");
        if (size_px < 3)
            throw InvalidParameterError("size must be at least 3 pixels");
        low_band().validate();
        mid_band().validate();
        for (double d : fractal_dims)
            high_band(d).validate();
        grid().validate();
        (void)gaussian_kernel(sigma_px);
        if (!(truncation_rel >= 0.0 && truncation_rel < 1.0))
            throw InvalidParameterError("truncation must lie in [0, 1)");
        world_scale().validate();
        if (!(thresholds.low_semi < thresholds.semi_high))
            throw InvalidParameterError("roughness thresholds must increase");
        if (disk_radius_px < 1)
            throw InvalidParameterError("disk radius must be >= 1 pixel");
        if (!(border_m >= 0.0))
            throw InvalidParameterError("border must be >= 0");
        if (!(missions.length_m > 0.0) || missions.retry_cap < 1 || !(missions.border_m >= 0.0))
            throw InvalidParameterError("invalid mission constraints");
        vehicle_spec().validate();
    }

private:
    WMParams with_size(WMParams p) const
    {
        p.n_max = static_cast<int>(size_px);
        return p;
    }
};

namespace config_detail {

using boost::property_tree::ptree;

inline std::vector<double> parse_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            continue;
        try {
            std::size_t used = 0;
            const std::string token = item.substr(b, e - b + 1);
            out.push_back(std::stod(token, &used));
            if (used != token.size())
                throw std::invalid_argument(token);
        } catch (const std::logic_error&) {
            throw InvalidParameterError("config key " + key + ": cannot parse '" + item + "' as a number");
        }
    }
    return out;
}

template<typename T>
void read(const ptree& tree, const std::string& key, T& target)
{
    const auto value = tree.get_optional<std::string>(key);
    if (!value)
        return;
    const auto parsed = tree.get_optional<T>(key);
    if (!parsed)
        throw InvalidParameterError("config key " + key + ": invalid value '" + *value + "'");
    target = *parsed;
}

/// Reads a number or the word `auto`; returns true when a number was given.
inline void read_auto(const ptree& tree, const std::string& key, double& target, bool& is_auto)
{
    const auto value = tree.get_optional<std::string>(key);
    if (!value)
        return;
    if (*value == "auto") {
        is_auto = true;
        return;
    }
    read(tree, key, target);
    is_auto = false;
}

inline void read_band(const ptree& tree, const std::string& section, WMParams& p, bool with_dim)
{
    read(tree, section + ".ridges", p.ridges);
    read(tree, section + ".gamma", p.gamma);
    if (with_dim)
        read(tree, section + ".fractal_dim", p.fractal_dim);
    read(tree, section + ".sampling_length", p.sampling_length);
    read(tree, section + ".elevation_scale", p.elevation_scale);
}

inline const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        "experiment.fractal_dims", "experiment.maps_per_dim", "experiment.missions_per_map", "experiment.seed",
        "experiment.output_dir", "experiment.workers", "experiment.size",
        "low.ridges", "low.gamma", "low.fractal_dim", "low.sampling_length", "low.elevation_scale",
        "mid.ridges", "mid.gamma", "mid.fractal_dim", "mid.sampling_length", "mid.elevation_scale",
        "high.ridges", "high.gamma", "high.sampling_length", "high.elevation_scale",
        "terrain.sigma_px", "terrain.smoothing", "terrain.truncation_rel", "terrain.window_x0", "terrain.window_y0",
        "terrain.memory_budget_mb",
        "world.xy_reduction_pct", "world.z_scale_pct", "world.z_full_span_m", "world.base_resolution_m",
        "roughness.low_semi", "roughness.semi_high", "roughness.disk_radius_px", "roughness.border_m",
        "missions.length_m", "missions.border_m", "missions.retry_cap",
        "vehicle.wheelbase_m", "vehicle.track_m", "vehicle.tire_radius_m", "vehicle.tire_width_m", "vehicle.speed_mps",
        "vehicle.tip_deg", "vehicle.stuck_distance_m", "vehicle.stuck_window_s", "vehicle.goal_tolerance_m",
        "vehicle.lookahead_m", "vehicle.max_yaw_rate_dps", "vehicle.time_cap_s", "vehicle.dt_s", "vehicle.stop_slope",
        "vehicle.free_slope",
        "output.write_logs"};
    return keys;
}

} // namespace config_detail

/// Applies the keys of an INI tree on top of `cfg`. Unknown keys are errors.
inline void apply_ini(const boost::property_tree::ptree& tree, ExperimentConfig& cfg)
{
    using namespace config_detail;
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw InvalidParameterError("config key '" + section + "' is outside any section");
        for (const auto& [key, value] : body)
            if (!known_keys().contains(section + "." + key))
                throw InvalidParameterError("unknown config key " + section + "." + key);
    }

    if (const auto dims = tree.get_optional<std::string>("experiment.fractal_dims"))
        cfg.fractal_dims = parse_list(*dims, "experiment.fractal_dims");
    read(tree, "experiment.maps_per_dim", cfg.maps_per_dim);
    read(tree, "experiment.missions_per_map", cfg.missions_per_map);
    read(tree, "experiment.seed", cfg.seed);
    if (const auto out = tree.get_optional<std::string>("experiment.output_dir"))
        cfg.output_dir = *out;
    read(tree, "experiment.workers", cfg.workers);
    read(tree, "experiment.size", cfg.size_px);

    read_band(tree, "low", cfg.low, true);
    read_band(tree, "mid", cfg.mid, true);
    read_band(tree, "high", cfg.high, false);

    read(tree, "terrain.sigma_px", cfg.sigma_px);
    if (const auto s = tree.get_optional<std::string>("terrain.smoothing")) {
        if (*s == "per_band")
            cfg.smoothing = SmoothingPlacement::per_band;
        else if (*s == "after_combination")
            cfg.smoothing = SmoothingPlacement::after_combination;
        else
            throw InvalidParameterError("terrain.smoothing must be per_band or after_combination");
    }
    read(tree, "terrain.truncation_rel", cfg.truncation_rel);
    bool window_auto = cfg.window_auto;
    read_auto(tree, "terrain.window_x0", cfg.window_x0, window_auto);
    read_auto(tree, "terrain.window_y0", cfg.window_y0, window_auto);
    cfg.window_auto = window_auto;
    if (const auto mb = tree.get_optional<std::size_t>("terrain.memory_budget_mb"))
        cfg.memory_budget_bytes = *mb << 20;

    read(tree, "world.xy_reduction_pct", cfg.scale.xy_reduction_pct);
    read(tree, "world.z_scale_pct", cfg.scale.z_scale_pct);
    read(tree, "world.z_full_span_m", cfg.scale.z_full_span_m);
    read_auto(tree, "world.base_resolution_m", cfg.scale.base_resolution_m, cfg.base_resolution_auto);

    read(tree, "roughness.low_semi", cfg.thresholds.low_semi);
    read(tree, "roughness.semi_high", cfg.thresholds.semi_high);
    read(tree, "roughness.disk_radius_px", cfg.disk_radius_px);
    read(tree, "roughness.border_m", cfg.border_m);

    read(tree, "missions.length_m", cfg.missions.length_m);
    read(tree, "missions.border_m", cfg.missions.border_m);
    read(tree, "missions.retry_cap", cfg.missions.retry_cap);

    auto& v = cfg.vehicle;
    read(tree, "vehicle.wheelbase_m", v.wheelbase_m);
    read(tree, "vehicle.track_m", v.track_m);
    read(tree, "vehicle.tire_radius_m", v.tire_radius_m);
    read(tree, "vehicle.tire_width_m", v.tire_width_m);
    read(tree, "vehicle.speed_mps", v.speed_mps);
    read(tree, "vehicle.tip_deg", v.tip_deg);
    read(tree, "vehicle.stuck_distance_m", v.stuck_distance_m);
    read(tree, "vehicle.stuck_window_s", v.stuck_window_s);
    read(tree, "vehicle.goal_tolerance_m", v.goal_tolerance_m);
    read(tree, "vehicle.lookahead_m", v.lookahead_m);
    read(tree, "vehicle.max_yaw_rate_dps", v.max_yaw_rate_dps);
    read(tree, "vehicle.time_cap_s", v.time_cap_s);
    read(tree, "vehicle.dt_s", v.dt_s);
    read_auto(tree, "vehicle.stop_slope", v.stop_slope, cfg.stop_slope_auto);
    read(tree, "vehicle.free_slope", v.free_slope);

    read(tree, "output.write_logs", cfg.write_logs);
}

inline ExperimentConfig parse_config(std::istream& in)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidParameterError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    apply_ini(tree, cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open config " + path.string());
    return parse_config(in);
}

} // namespace wmterrain
