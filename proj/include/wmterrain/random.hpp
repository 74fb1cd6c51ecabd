#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wmterrain {

// Random streams: std::mt19937_64 plus the hand-written distributions below.
// The version is recorded in each DEM sidecar.
inline constexpr int kRandomStreamVersion = 1;

using RandomEngine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed of `parent` for the given path of labels.
/// derive_seed(s, {a, b}) == derive_seed(derive_seed(s, {a}), {b}).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = parent;
    for (auto label : path)
        s = mix64(s ^ mix64(label + 0x632be59bd9b4e019ULL));
    return s;
}

inline RandomEngine make_engine(std::uint64_t seed)
{
    return RandomEngine(seed);
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(RandomEngine& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::uint64_t uniform_index(RandomEngine& rng, std::uint64_t n)
{
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

} // namespace wmterrain
