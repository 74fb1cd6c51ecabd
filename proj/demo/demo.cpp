// Builds one small multifractal map per fractal dimension, classifies its
// roughness and drives a few missions across it.
//
//   wmterrain-demo [size] [seed]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "wmterrain/dem.hpp"
#include "wmterrain/missions.hpp"
#include "wmterrain/roughness.hpp"
#include "wmterrain/stats.hpp"
#include "wmterrain/traversal.hpp"

using namespace wmterrain;

int main(int argc, char** argv)
{
    const int size = argc > 1 ? std::atoi(argv[1]) : 129;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
    if (size < 65) {
        std::fprintf(stderr, "size must be at least 65\n");
        return 1;
    }

    const std::vector<double> dims = {2.3, 2.45, 2.6};
    const WMParams low = bands::low(size), mid = bands::mid(size), high = bands::high(dims[0], size);
    const auto maps = build_multifractal_family(low, mid, high, dims, GridSpec::defaults_for(low), seed);

    WorldScale scale;
    scale.base_resolution_m = 1008.0 / (size - 1); // 50.4 m across at any size
    const double res = scale.xy_resolution();
    VehicleSpec vehicle;
    vehicle.stop_slope = 140.0 * 100.0 / kQuantMax * scale.z_span_m();

    std::printf("%d px, %.4f m/px\n", size, res);
    for (std::size_t d = 0; d < dims.size(); ++d) {
        const RoughnessMap rough = classify(moore_gradient_map(maps[d], res));
        const Composition c = composition(rough, res);
        const RoughnessMap closed = morphological_close(rough, 5);
        const Heightfield h = to_heightfield(maps[d], scale);
        const TraversalSimulator sim(h, vehicle);

        std::vector<Outcome> outcomes;
        for (const Mission& m : sample_missions(closed, res, 10, derive_seed(seed, {d}))) {
            const TraversalLog log = sim.run(m, m.seed);
            outcomes.push_back(log.outcome);
        }
        std::printf("D=%.2f  low %5.1f%%  semi %5.1f%%  high %4.1f%%  success %5.1f%%\n", dims[d], c.low_pct, c.semi_pct,
                    c.high_pct, success_rate(outcomes));
    }
}
