// wmterrain: batch runner for the terrain / traversability experiment.
//
// Exit codes: 0 success, 1 usage, 2 missing input, 3 internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "wmterrain/experiment.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitInternal = 3;

struct Overrides
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::optional<std::size_t> size;
    std::optional<std::size_t> maps;
    std::optional<std::size_t> missions;
};

wmterrain::ExperimentConfig resolve(const Overrides& o)
{
    wmterrain::ExperimentConfig cfg = o.config.empty() ? wmterrain::ExperimentConfig{} : wmterrain::load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.out)
        cfg.output_dir = *o.out;
    if (o.workers)
        cfg.workers = *o.workers;
    if (o.size)
        cfg.size_px = *o.size;
    if (o.maps)
        cfg.maps_per_dim = *o.maps;
    if (o.missions)
        cfg.missions_per_map = *o.missions;
    cfg.validate();
    return cfg;
}

void print_groups(const std::vector<wmterrain::GroupSummary>& groups)
{
    using wmterrain::metric::success_rate;
    for (const auto& g : groups) {
        std::printf("D=%-5s maps=%zu trials=%zu successes=%zu", wmterrain::format_number(g.fractal_dim).c_str(), g.maps,
                    g.trials, g.successes);
        for (const char* name : {"low_pct", "semi_pct", "high_pct", success_rate})
            if (const auto it = g.metrics.find(name); it != g.metrics.end())
                std::printf("  %s=%.2f", name, it->second.median);
        std::printf("\n");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multifractal terrain generation and traversability benchmark"};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("-c,--config", o.config, "INI configuration file");
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--size", o.size, "DEM size in pixels (1009 for full resolution)")->check(CLI::Range(3, 1 << 16));
    app.add_option("--maps", o.maps, "Maps per fractal dimension")->check(CLI::PositiveNumber);
    app.add_option("--missions", o.missions, "Missions per map")->check(CLI::PositiveNumber);

    auto* generate = app.add_subcommand("generate", "Generate multifractal DEM PNGs and sidecars");
    auto* analyze = app.add_subcommand("analyze", "Classify roughness and write composition.csv");
    auto* sample = app.add_subcommand("sample", "Sample missions on the closed roughness maps");
    auto* simulate = app.add_subcommand("simulate", "Simulate missions into results.csv (resumable)");
    std::optional<std::size_t> max_trials;
    bool logs = false;
    simulate->add_option("--max-trials", max_trials, "Stop after this many new trials");
    simulate->add_flag("--logs", logs, "Write per-trial 20 Hz logs");
    auto* report = app.add_subcommand("report", "Write summary.csv and plot tables");
    auto* run = app.add_subcommand("run", "Run every stage");
    run->add_flag("--logs", logs, "Write per-trial 20 Hz logs");
    auto* show = app.add_subcommand("config", "Print the resolved configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        wmterrain::ExperimentConfig cfg;
        try {
            cfg = resolve(o);
        } catch (const wmterrain::InvalidParameterError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        if (logs)
            cfg.write_logs = true;

        if (*generate) {
            std::printf("wrote %zu maps to %s\n", wmterrain::cmd_generate(cfg), cfg.output_dir.c_str());
        } else if (*analyze) {
            std::printf("analyzed %zu maps\n", wmterrain::cmd_analyze(cfg).size());
        } else if (*sample) {
            const auto r = wmterrain::cmd_sample(cfg);
            for (const auto& w : r.warnings)
                std::cerr << "warning: " << w << "\n";
            std::printf("sampled %zu missions\n", r.missions);
        } else if (*simulate) {
            const auto r = wmterrain::cmd_simulate(cfg, {max_trials});
            std::printf("simulated %zu trials, skipped %zu, results.csv holds %zu\n", r.simulated, r.skipped, r.total);
        } else if (*report) {
            print_groups(wmterrain::cmd_report(cfg));
        } else if (*run) {
            print_groups(wmterrain::cmd_run(cfg));
        } else if (*show) {
            const auto s = cfg.world_scale();
            std::printf("size_px=%zu xy_resolution_m=%s z_span_m=%s stop_slope=%s maps=%zu missions=%zu seed=%llu out=%s\n",
                        cfg.size_px, wmterrain::format_number(s.xy_resolution()).c_str(),
                        wmterrain::format_number(s.z_span_m()).c_str(),
                        wmterrain::format_number(cfg.vehicle_spec().stop_slope).c_str(), cfg.maps_per_dim,
                        cfg.missions_per_map, static_cast<unsigned long long>(cfg.seed), cfg.output_dir.c_str());
        }
        return 0;
    } catch (const wmterrain::MissingInputError& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const wmterrain::EmptyInputError& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
