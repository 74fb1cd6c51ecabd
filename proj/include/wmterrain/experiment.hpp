#pragma once

// Batch experiment: generate -> analyze -> sample -> simulate -> report.
// Every stage reads the previous stage's files from the output directory,
// so stages can be rerun independently.
//
// Seed tree:
//   map seed      = derive_seed(master, {1, map_index})   shared by every D
//   band seed     = derive_seed(map seed, {band})
//   mission base  = derive_seed(map seed, {2, dim_index})
//   mission seed  = derive_seed(mission base, {mission_index})

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wmterrain/config.hpp"
#include "wmterrain/dem.hpp"
#include "wmterrain/error.hpp"
#include "wmterrain/missions.hpp"
#include "wmterrain/parallel.hpp"
#include "wmterrain/png_io.hpp"
#include "wmterrain/random.hpp"
#include "wmterrain/roughness.hpp"
#include "wmterrain/stats.hpp"
#include "wmterrain/traversal.hpp"

namespace wmterrain {

namespace fs = std::filesystem;

inline std::uint64_t map_seed(std::uint64_t master, std::size_t map_index)
{
    return derive_seed(master, {1, map_index});
}

inline std::uint64_t mission_seed_base(std::uint64_t map_seed_value, std::size_t dim_index)
{
    return derive_seed(map_seed_value, {2, dim_index});
}

inline std::string map_id(double fractal_dim, std::size_t map_index)
{
    std::string idx = std::to_string(map_index);
    if (idx.size() < 3)
        idx.insert(0, 3 - idx.size(), '0');
    return "d" + format_number(fractal_dim) + "_" + idx;
}

inline std::string trial_id(const std::string& map, std::size_t mission_index)
{
    std::string idx = std::to_string(mission_index);
    if (idx.size() < 3)
        idx.insert(0, 3 - idx.size(), '0');
    return map + "/" + idx;
}

struct MapEntry
{
    std::string id;
    std::size_t dim_index = 0;
    double fractal_dim = 0.0;
    std::size_t map_index = 0;
    std::uint64_t seed = 0;
};

/// Maps of the experiment, ordered by D (config order) then map index.
inline std::vector<MapEntry> map_entries(const ExperimentConfig& cfg)
{
    std::vector<MapEntry> out;
    for (std::size_t d = 0; d < cfg.fractal_dims.size(); ++d)
        for (std::size_t k = 0; k < cfg.maps_per_dim; ++k)
            out.push_back({map_id(cfg.fractal_dims[d], k), d, cfg.fractal_dims[d], k, map_seed(cfg.seed, k)});
    return out;
}

/// File locations under the output directory.
struct Layout
{
    fs::path root;

    fs::path map_png(const std::string& id) const { return root / "maps" / (id + ".png"); }
    fs::path map_json(const std::string& id) const { return root / "maps" / (id + ".json"); }
    fs::path roughness_png(const std::string& id) const { return root / "roughness" / (id + ".png"); }
    fs::path roughness_json(const std::string& id) const { return root / "roughness" / (id + ".json"); }
    fs::path missions(const std::string& id) const { return root / "missions" / (id + ".jsonl"); }
    fs::path log_csv(const std::string& id, std::size_t k) const { return root / "logs" / id / (stem(k) + ".csv"); }
    fs::path log_json(const std::string& id, std::size_t k) const { return root / "logs" / id / (stem(k) + ".json"); }
    fs::path composition_csv() const { return root / "composition.csv"; }
    fs::path results_csv() const { return root / "results.csv"; }
    fs::path summary_csv() const { return root / "summary.csv"; }
    fs::path plots_dir() const { return root / "plots"; }

private:
    static std::string stem(std::size_t k)
    {
        std::string s = std::to_string(k);
        if (s.size() < 3)
            s.insert(0, 3 - s.size(), '0');
        return s;
    }
};

// --- small file helpers ------------------------------------------------------

namespace io {

inline void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

inline void write_text(const fs::path& path, const std::string& text)
{
    ensure_dir(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out.flush())
        throw IoError("write failed for " + path.string());
}

inline std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MissingInputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, sep))
        out.push_back(field);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

inline std::string join(const std::vector<std::string>& fields, char sep = ',')
{
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k)
            out += sep;
        out += fields[k];
    }
    return out;
}

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw IoError("CSV has no column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
};

inline Table read_csv(const fs::path& path)
{
    std::istringstream in(read_text(path));
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw IoError(path.string() + " is empty");
    t.header = split(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto row = split(line);
        if (row.size() != t.header.size())
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.header.size())
                          + " fields, got " + std::to_string(row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline double to_double(const std::string& s)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::logic_error&) {
    }
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    throw IoError("cannot parse '" + s + "' as a number");
}

inline std::uint64_t to_u64(const std::string& s)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError("cannot parse '" + s + "' as an unsigned integer");
    return v;
}

inline std::string dump(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

} // namespace io

// --- generate ----------------------------------------------------------------

inline nlohmann::json band_json(const WMParams& p)
{
    return {{"ridges", p.ridges},
            {"n_max", p.n_max},
            {"gamma", p.gamma},
            {"fractal_dim", p.fractal_dim},
            {"sampling_length", p.sampling_length},
            {"elevation_scale", p.elevation_scale}};
}

inline nlohmann::json map_sidecar(const ExperimentConfig& cfg, const MapEntry& e)
{
    const GridSpec g = cfg.grid();
    const WorldScale s = cfg.world_scale();
    return {{"map_id", e.id},
            {"fractal_dim", e.fractal_dim},
            {"map_index", e.map_index},
            {"seed", e.seed},
            {"master_seed", cfg.seed},
            {"band_seeds",
             {{"low", band_seed(e.seed, Band::low)}, {"mid", band_seed(e.seed, Band::mid)}, {"high", band_seed(e.seed, Band::high)}}},
            {"bands", {{"low", band_json(cfg.low_band())}, {"mid", band_json(cfg.mid_band())}, {"high", band_json(cfg.high_band(e.fractal_dim))}}},
            {"grid", {{"size_px", g.size_px}, {"x0", g.x0}, {"y0", g.y0}, {"spacing", g.spacing}}},
            {"sigma_px", cfg.sigma_px},
            {"smoothing", cfg.smoothing == SmoothingPlacement::per_band ? "per_band" : "after_combination"},
            {"truncation_rel", cfg.truncation_rel},
            {"xy_resolution_m", s.xy_resolution()},
            {"z_span_m", s.z_span_m()},
            {"pipeline_version", kPipelineVersion},
            {"random_stream_version", kRandomStreamVersion}};
}

/// Writes one 16-bit PNG and JSON sidecar per (D, map index). All D values
/// of one map index come from one family evaluation and share phases.
/// Returns the number of maps written.
inline std::size_t cmd_generate(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Layout layout{cfg.output_dir};
    io::ensure_dir(layout.root / "maps");
    const auto entries = map_entries(cfg);
    const std::size_t n_dims = cfg.fractal_dims.size();
    const PipelineOptions options = cfg.pipeline();
    parallel_for(cfg.maps_per_dim, cfg.workers, [&](std::size_t k) {
        const auto family = build_multifractal_family(cfg.low_band(), cfg.mid_band(), cfg.high_band(cfg.fractal_dims[0]),
                                                      cfg.fractal_dims, cfg.grid(), map_seed(cfg.seed, k), options);
        for (std::size_t d = 0; d < n_dims; ++d) {
            const MapEntry& e = entries[d * cfg.maps_per_dim + k];
            write_png16(layout.map_png(e.id), family[d]);
            io::write_text(layout.map_json(e.id), io::dump(map_sidecar(cfg, e)));
        }
    });
    return entries.size();
}

// --- analyze -----------------------------------------------------------------

struct MapAnalysis
{
    Composition composition;  ///< before closing
    RoughnessMap closed;
};

inline MapAnalysis analyze_map(const QuantizedDEM& q, const ExperimentConfig& cfg)
{
    const double res = cfg.xy_resolution();
    const RoughnessMap raw = classify(moore_gradient_map(q, res), cfg.thresholds);
    return {composition(raw, res, cfg.border_m), morphological_close(raw, cfg.disk_radius_px)};
}

inline QuantizedDEM load_map(const Layout& layout, const MapEntry& e, const ExperimentConfig& cfg)
{
    QuantizedDEM q = read_png16(layout.map_png(e.id));
    if (q.size() != cfg.size_px)
        throw SizeMismatchError(layout.map_png(e.id).string() + " is " + std::to_string(q.size())
                                + " px wide but the configuration expects " + std::to_string(cfg.size_px));
    return q;
}

inline const std::vector<std::string>& composition_header()
{
    static const std::vector<std::string> h = {"map_id", "fractal_dim", "map_index", "seed", "low_pct", "semi_pct", "high_pct"};
    return h;
}

/// Classifies every map, writes the closed roughness maps and
/// composition.csv. Returns the per-map compositions in entry order.
inline std::vector<Composition> cmd_analyze(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Layout layout{cfg.output_dir};
    const auto entries = map_entries(cfg);
    std::vector<Composition> comps(entries.size());
    io::ensure_dir(layout.root / "roughness");
    parallel_for(entries.size(), cfg.workers, [&](std::size_t k) {
        const MapEntry& e = entries[k];
        const MapAnalysis a = analyze_map(load_map(layout, e, cfg), cfg);
        Grid<std::uint8_t> image(a.closed.size());
        for (std::size_t p = 0; p < image.count(); ++p)
            image[p] = static_cast<std::uint8_t>(a.closed.classes[p]);
        write_png8(layout.roughness_png(e.id), image);
        const nlohmann::json record = {{"map_id", e.id},
                                       {"fractal_dim", e.fractal_dim},
                                       {"low_pct", a.composition.low_pct},
                                       {"semi_pct", a.composition.semi_pct},
                                       {"high_pct", a.composition.high_pct},
                                       {"low_semi", cfg.thresholds.low_semi},
                                       {"semi_high", cfg.thresholds.semi_high},
                                       {"disk_radius_px", cfg.disk_radius_px},
                                       {"border_m", cfg.border_m}};
        io::write_text(layout.roughness_json(e.id), io::dump(record));
        comps[k] = a.composition;
    });

    std::string csv = io::join(composition_header()) + "\n";
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const MapEntry& e = entries[k];
        csv += io::join({e.id, format_number(e.fractal_dim), std::to_string(e.map_index), std::to_string(e.seed),
                         format_number(comps[k].low_pct), format_number(comps[k].semi_pct), format_number(comps[k].high_pct)})
               + "\n";
    }
    io::write_text(layout.composition_csv(), csv);
    return comps;
}

// --- sample ------------------------------------------------------------------

inline RoughnessMap load_roughness(const Layout& layout, const MapEntry& e)
{
    const auto image = read_png8(layout.roughness_png(e.id));
    RoughnessMap r{Grid<Roughness>(image.size()), {}};
    for (std::size_t p = 0; p < image.count(); ++p) {
        if (image[p] > 2)
            throw IoError(layout.roughness_png(e.id).string() + " holds a class value above 2");
        r.classes[p] = static_cast<Roughness>(image[p]);
    }
    return r;
}

inline std::string mission_line(const Mission& m, std::size_t index)
{
    const nlohmann::json j = {{"index", index},
                              {"start", {m.start.x, m.start.y}},
                              {"heading_deg", m.heading_deg},
                              {"goal", {m.goal.x, m.goal.y}},
                              {"length_m", m.length_m},
                              {"seed", m.seed}};
    return j.dump() + "\n";
}

inline std::vector<Mission> read_missions(const fs::path& path)
{
    std::istringstream in(io::read_text(path));
    std::vector<Mission> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Mission m;
            m.start = {j.at("start").at(0).get<double>(), j.at("start").at(1).get<double>()};
            m.heading_deg = j.at("heading_deg").get<double>();
            m.goal = {j.at("goal").at(0).get<double>(), j.at("goal").at(1).get<double>()};
            m.length_m = j.at("length_m").get<double>();
            m.seed = j.at("seed").get<std::uint64_t>();
            out.push_back(m);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path.string() + ": malformed mission record: " + e.what());
        }
    }
    return out;
}

struct SampleReport
{
    std::size_t missions = 0;
    std::vector<std::string> warnings; ///< maps with fewer missions than requested
};

/// Draws missions_per_map missions per closed roughness map into one JSON
/// lines file per map. A map that cannot host a valid mission gets an empty
/// file and a warning rather than aborting the batch.
inline SampleReport cmd_sample(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Layout layout{cfg.output_dir};
    const auto entries = map_entries(cfg);
    io::ensure_dir(layout.root / "missions");
    std::vector<std::size_t> counts(entries.size(), 0);
    std::vector<std::string> notes(entries.size());
    const double res = cfg.xy_resolution();
    parallel_for(entries.size(), cfg.workers, [&](std::size_t k) {
        const MapEntry& e = entries[k];
        const RoughnessMap closed = load_roughness(layout, e);
        std::string text;
        try {
            const auto missions = sample_missions(closed, res, cfg.missions_per_map, mission_seed_base(e.seed, e.dim_index), cfg.missions);
            for (std::size_t m = 0; m < missions.size(); ++m)
                text += mission_line(missions[m], m);
            counts[k] = missions.size();
        } catch (const NoValidMissionError& err) {
            notes[k] = e.id + ": " + err.what();
        }
        io::write_text(layout.missions(e.id), text);
    });
    SampleReport report;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        report.missions += counts[k];
        if (!notes[k].empty())
            report.warnings.push_back(notes[k]);
    }
    return report;
}

// --- simulate ----------------------------------------------------------------

inline const std::vector<std::string>& results_header()
{
    static const std::vector<std::string> h = {"trial_id",       "map_id",          "fractal_dim",   "map_index",
                                               "mission_index",  "seed",            "outcome",       "rms_vertical_accel",
                                               "rms_pitch_rate", "rms_roll_rate",   "traversal_time_s"};
    return h;
}

inline std::vector<std::string> result_row(const MapEntry& e, const TrialResult& r)
{
    const bool ok = r.outcome == Outcome::success;
    auto metric = [&](double v) { return ok ? format_number(v) : std::string(); };
    return {trial_id(e.id, r.index),       e.id,
            format_number(e.fractal_dim),  std::to_string(e.map_index),
            std::to_string(r.index),       std::to_string(r.seed),
            std::string(to_string(r.outcome)), metric(r.rms_vertical_accel),
            metric(r.rms_pitch_rate),      metric(r.rms_roll_rate),
            metric(r.traversal_time_s)};
}

inline void write_log(const Layout& layout, const MapEntry& e, std::size_t index, const TraversalLog& log)
{
    std::string csv = "t,x,y,z,yaw_deg,pitch_deg,roll_deg\n";
    for (const auto& s : log.samples)
        csv += io::join({format_number(s.t), format_number(s.x), format_number(s.y), format_number(s.z),
                         format_number(s.yaw_deg), format_number(s.pitch_deg), format_number(s.roll_deg)})
               + "\n";
    io::write_text(layout.log_csv(e.id, index), csv);
    nlohmann::json record = {{"map_id", e.id},
                             {"mission_index", index},
                             {"seed", log.seed},
                             {"outcome", std::string(to_string(log.outcome))},
                             {"samples", log.samples.size()}};
    if (log.outcome == Outcome::success)
        record["traversal_time_s"] = log.traversal_time_s;
    io::write_text(layout.log_json(e.id, index), io::dump(record));
}

struct SimulateOptions
{
    /// Stop after this many new trials; the results file stays resumable.
    std::optional<std::size_t> max_new_trials;
};

struct SimulateReport
{
    std::size_t skipped = 0;   ///< trials already present
    std::size_t simulated = 0; ///< trials run now
    std::size_t total = 0;     ///< rows in results.csv afterwards
};

/// Runs every mission not yet present in results.csv. Rows are appended as
/// each map finishes, and the file is rewritten in (map, mission) order at the
/// end, so an interrupted run resumes to the same final file.
inline SimulateReport cmd_simulate(const ExperimentConfig& cfg, const SimulateOptions& options = {})
{
    cfg.validate();
    const Layout layout{cfg.output_dir};
    const auto entries = map_entries(cfg);
    const VehicleSpec spec = cfg.vehicle_spec();
    const auto& header = results_header();

    std::map<std::string, std::vector<std::string>> done;
    if (fs::exists(layout.results_csv())) {
        const auto table = io::read_csv(layout.results_csv());
        if (table.header != header)
            throw IoError(layout.results_csv().string() + " has an unexpected header");
        for (auto& row : table.rows)
            done[row[0]] = row;
    }

    struct Work
    {
        std::size_t entry;
        std::vector<Mission> missions;
        std::vector<std::size_t> pending;
    };
    std::vector<Work> work;
    SimulateReport report;
    std::size_t budget = options.max_new_trials.value_or(std::numeric_limits<std::size_t>::max());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        Work w{k, read_missions(layout.missions(entries[k].id)), {}};
        for (std::size_t m = 0; m < w.missions.size(); ++m) {
            if (done.contains(trial_id(entries[k].id, m))) {
                ++report.skipped;
            } else if (budget > 0) {
                w.pending.push_back(m);
                --budget;
            }
        }
        if (!w.pending.empty())
            work.push_back(std::move(w));
    }

    {
        const bool fresh = !fs::exists(layout.results_csv());
        if (fresh)
            io::write_text(layout.results_csv(), io::join(header) + "\n");
    }
    std::mutex append_mutex;
    std::vector<std::vector<std::vector<std::string>>> produced(work.size());
    parallel_for(work.size(), cfg.workers, [&](std::size_t w) {
        const Work& item = work[w];
        const MapEntry& e = entries[item.entry];
        const Heightfield h = to_heightfield(load_map(layout, e, cfg), cfg.world_scale());
        const TraversalSimulator sim(h, spec);
        std::string lines;
        for (std::size_t m : item.pending) {
            const Mission& mission = item.missions[m];
            const TraversalLog log = sim.run(mission, mission.seed);
            if (cfg.write_logs)
                write_log(layout, e, m, log);
            auto row = result_row(e, summarize_trial(log, m, spec.dt_s));
            lines += io::join(row) + "\n";
            produced[w].push_back(std::move(row));
        }
        std::lock_guard lock(append_mutex);
        std::ofstream out(layout.results_csv(), std::ios::binary | std::ios::app);
        out << lines;
        if (!out.flush())
            throw IoError("append failed for " + layout.results_csv().string());
    });

    for (auto& rows : produced)
        for (auto& row : rows) {
            done[row[0]] = std::move(row);
            ++report.simulated;
        }

    // Final order: entry order of the configuration, then mission index;
    // rows for maps outside the configuration follow in id order.
    std::string csv = io::join(header) + "\n";
    for (const auto& e : entries) {
        const std::string prefix = e.id + "/";
        std::vector<const std::vector<std::string>*> rows;
        for (auto it = done.lower_bound(prefix); it != done.end() && it->first.starts_with(prefix); ++it)
            rows.push_back(&it->second);
        std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return io::to_u64((*a)[4]) < io::to_u64((*b)[4]); });
        for (auto* r : rows) {
            csv += io::join(*r) + "\n";
            ++report.total;
        }
        for (auto it = done.lower_bound(prefix); it != done.end() && it->first.starts_with(prefix);)
            it = done.erase(it);
    }
    for (const auto& [id, row] : done) {
        csv += io::join(row) + "\n";
        ++report.total;
    }
    io::write_text(layout.results_csv(), csv);
    return report;
}

// --- report ------------------------------------------------------------------

inline Outcome parse_outcome(const std::string& s)
{
    if (s == "success")
        return Outcome::success;
    if (s == "tipped")
        return Outcome::tipped;
    if (s == "stuck")
        return Outcome::stuck;
    throw IoError("unknown outcome '" + s + "'");
}

/// Joins composition.csv and results.csv into per-map results, ordered as in
/// composition.csv.
inline std::vector<MapResult> load_map_results(const Layout& layout)
{
    const auto comp = io::read_csv(layout.composition_csv());
    const auto res = io::read_csv(layout.results_csv());
    if (res.rows.empty())
        throw EmptyInputError(layout.results_csv().string() + " holds no trials");

    std::vector<MapResult> maps;
    std::map<std::string, std::size_t> index;
    const std::size_t c_id = comp.column("map_id"), c_dim = comp.column("fractal_dim"), c_seed = comp.column("seed"),
                      c_low = comp.column("low_pct"), c_semi = comp.column("semi_pct"), c_high = comp.column("high_pct");
    for (const auto& row : comp.rows) {
        MapResult m;
        m.map_id = row[c_id];
        m.fractal_dim = io::to_double(row[c_dim]);
        m.seed = io::to_u64(row[c_seed]);
        m.composition = {io::to_double(row[c_low]), io::to_double(row[c_semi]), io::to_double(row[c_high])};
        index[m.map_id] = maps.size();
        maps.push_back(std::move(m));
    }

    const std::size_t r_map = res.column("map_id"), r_dim = res.column("fractal_dim"), r_idx = res.column("mission_index"),
                      r_seed = res.column("seed"), r_out = res.column("outcome"), r_acc = res.column("rms_vertical_accel"),
                      r_pitch = res.column("rms_pitch_rate"), r_roll = res.column("rms_roll_rate"),
                      r_time = res.column("traversal_time_s");
    for (const auto& row : res.rows) {
        const auto it = index.find(row[r_map]);
        if (it == index.end())
            throw MissingInputError("results.csv names map " + row[r_map] + " which composition.csv lacks");
        MapResult& m = maps[it->second];
        if (io::to_double(row[r_dim]) != m.fractal_dim)
            throw IoError("fractal dimension of " + row[r_map] + " differs between composition.csv and results.csv");
        TrialResult t;
        t.index = io::to_u64(row[r_idx]);
        t.seed = io::to_u64(row[r_seed]);
        t.outcome = parse_outcome(row[r_out]);
        if (t.outcome == Outcome::success) {
            t.rms_vertical_accel = io::to_double(row[r_acc]);
            t.rms_pitch_rate = io::to_double(row[r_pitch]);
            t.rms_roll_rate = io::to_double(row[r_roll]);
            t.traversal_time_s = io::to_double(row[r_time]);
        }
        m.trials.push_back(t);
    }
    return maps;
}

inline const std::vector<std::string>& summary_header()
{
    static const std::vector<std::string> h = {"fractal_dim", "metric",      "count",       "median",       "q1",
                                               "q3",          "iqr",         "lower_bound", "upper_bound",  "whisker_low",
                                               "whisker_high", "outlier_count", "outliers"};
    return h;
}

/// Writes summary.csv (one row per D and metric) and the tidy tables in
/// plots/: composition.csv, success_rate.csv, trials.csv and groups.csv.
inline std::vector<GroupSummary> cmd_report(const ExperimentConfig& cfg)
{
    const Layout layout{cfg.output_dir};
    const auto maps = load_map_results(layout);
    const auto groups = aggregate(maps);

    std::string summary = io::join(summary_header()) + "\n";
    for (const auto& g : groups)
        for (const auto& name : metric_names()) {
            const auto it = g.metrics.find(name);
            if (it == g.metrics.end())
                continue;
            const BoxSummary& b = it->second;
            std::vector<std::string> outliers;
            for (double o : b.outliers)
                outliers.push_back(format_number(o));
            summary += io::join({format_number(g.fractal_dim), name, std::to_string(b.count), format_number(b.median),
                                 format_number(b.q1), format_number(b.q3), format_number(b.iqr), format_number(b.lower_bound),
                                 format_number(b.upper_bound), format_number(b.whisker_low), format_number(b.whisker_high),
                                 std::to_string(b.outliers.size()), io::join(outliers, ';')})
                       + "\n";
        }
    io::write_text(layout.summary_csv(), summary);

    std::string groups_csv = "fractal_dim,maps,trials,successes\n";
    for (const auto& g : groups)
        groups_csv += io::join({format_number(g.fractal_dim), std::to_string(g.maps), std::to_string(g.trials),
                                std::to_string(g.successes)})
                      + "\n";

    std::string comp = "fractal_dim,map_id,roughness,pct\n";
    std::string rates = "fractal_dim,map_id,trials,success_rate\n";
    std::string trials = "fractal_dim,map_id,mission_index,metric,value\n";
    for (const auto& m : maps) {
        const std::string d = format_number(m.fractal_dim);
        comp += io::join({d, m.map_id, "low", format_number(m.composition.low_pct)}) + "\n";
        comp += io::join({d, m.map_id, "semi", format_number(m.composition.semi_pct)}) + "\n";
        comp += io::join({d, m.map_id, "high", format_number(m.composition.high_pct)}) + "\n";
        if (!m.trials.empty())
            rates += io::join({d, m.map_id, std::to_string(m.trials.size()), format_number(m.success_rate())}) + "\n";
        auto trials_sorted = m.trials;
        std::sort(trials_sorted.begin(), trials_sorted.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
        for (const auto& t : trials_sorted) {
            if (t.outcome != Outcome::success)
                continue;
            const std::string idx = std::to_string(t.index);
            trials += io::join({d, m.map_id, idx, metric::rms_vertical_accel, format_number(t.rms_vertical_accel)}) + "\n";
            trials += io::join({d, m.map_id, idx, metric::rms_pitch_rate, format_number(t.rms_pitch_rate)}) + "\n";
            trials += io::join({d, m.map_id, idx, metric::rms_roll_rate, format_number(t.rms_roll_rate)}) + "\n";
            trials += io::join({d, m.map_id, idx, metric::traversal_time, format_number(t.traversal_time_s)}) + "\n";
        }
    }
    const fs::path plots = layout.plots_dir();
    io::write_text(plots / "groups.csv", groups_csv);
    io::write_text(plots / "composition.csv", comp);
    io::write_text(plots / "success_rate.csv", rates);
    io::write_text(plots / "trials.csv", trials);
    return groups;
}

/// Every stage in order.
inline std::vector<GroupSummary> cmd_run(const ExperimentConfig& cfg)
{
    cmd_generate(cfg);
    cmd_analyze(cfg);
    cmd_sample(cfg);
    cmd_simulate(cfg);
    return cmd_report(cfg);
}

} // namespace wmterrain
