#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "wmterrain/missions.hpp"

using namespace wmterrain;

namespace {

RoughnessMap filled(std::size_t n, Roughness c)
{
    return {Grid<Roughness>(n, c), {}};
}

RoughnessMap random_blobs(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    RoughnessMap r = filled(n, Roughness::low);
    for (int b = 0; b < 40; ++b) {
        const auto ci = static_cast<std::ptrdiff_t>(rng() % n), cj = static_cast<std::ptrdiff_t>(rng() % n);
        const int rad = 2 + static_cast<int>(rng() % 12);
        const auto cls = rng() % 3 == 0 ? Roughness::high : Roughness::semi;
        for (std::ptrdiff_t i = ci - rad; i <= ci + rad; ++i)
            for (std::ptrdiff_t j = cj - rad; j <= cj + rad; ++j)
                if (i >= 0 && j >= 0 && i < static_cast<std::ptrdiff_t>(n) && j < static_cast<std::ptrdiff_t>(n)
                    && (i - ci) * (i - ci) + (j - cj) * (j - cj) <= rad * rad)
                    r.classes(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = cls;
    }
    return r;
}

} // namespace

TEST(NearestPixel, RoundsAndClamps)
{
    EXPECT_EQ(nearest_pixel({0.124, 0.126}, 0.05, 100), (std::pair<std::size_t, std::size_t>{3, 2}));
    EXPECT_EQ(nearest_pixel({-1.0, 99.0}, 0.05, 100), (std::pair<std::size_t, std::size_t>{99, 0}));
}

TEST(Missions, SatisfyConstraints)
{
    const double res = 50.4 / 256;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const RoughnessMap r = random_blobs(257, s);
        const auto missions = sample_missions(r, res, 50, s);
        for (const auto& m : missions) {
            EXPECT_NEAR(distance(m.start, m.goal), 35.0, 1e-6);
            EXPECT_NEAR(m.length_m, 35.0, 1e-6);
            for (Point2 p : {m.start, m.goal}) {
                EXPECT_GE(p.x, 5.0);
                EXPECT_GE(p.y, 5.0);
                EXPECT_LE(p.x, 45.4);
                EXPECT_LE(p.y, 45.4);
            }
            const auto [si, sj] = nearest_pixel(m.start, res, 257);
            EXPECT_EQ(r.classes(si, sj), Roughness::low);
            const auto [gi, gj] = nearest_pixel(m.goal, res, 257);
            EXPECT_NE(r.classes(gi, gj), Roughness::high);
            EXPECT_GE(m.heading_deg, 0.0);
            EXPECT_LT(m.heading_deg, 360.0);
        }
    }
}

TEST(Missions, DeterministicPerSeed)
{
    const RoughnessMap r = random_blobs(129, 3);
    const double res = 50.4 / 128;
    const auto a = sample_missions(r, res, 10, 99);
    EXPECT_EQ(a, sample_missions(r, res, 10, 99));
    EXPECT_NE(a, sample_missions(r, res, 10, 100));
    // Mission k depends only on its own stream.
    EXPECT_EQ(sample_missions(r, res, 3, 99)[2], a[2]);
    EXPECT_EQ(a[4].seed, derive_seed(99, {4}));
}

TEST(Missions, UniformStartsAndHeadings)
{
    // 100 m map; only a small central patch is low, everything else semi,
    // so no heading is ever rejected.
    const std::size_t n = 201;
    const double res = 0.5;
    RoughnessMap r = filled(n, Roughness::semi);
    std::vector<std::size_t> cells;
    for (std::size_t i = 96; i <= 104; ++i)
        for (std::size_t j = 96; j <= 104; ++j) {
            r.classes(i, j) = Roughness::low;
            cells.push_back(i * n + j);
        }
    const MissionSampler sampler(r, res);
    ASSERT_EQ(sampler.eligible_starts(), 81u);
    auto rng = make_engine(12345);
    const int draws = 40500;
    std::map<std::size_t, int> start_counts;
    std::vector<int> heading_counts(36, 0);
    for (int k = 0; k < draws; ++k) {
        const Mission m = sampler.sample(rng);
        const auto [i, j] = nearest_pixel(m.start, res, n);
        ++start_counts[i * n + j];
        ++heading_counts[static_cast<std::size_t>(m.heading_deg / 10.0)];
    }
    ASSERT_EQ(start_counts.size(), 81u);
    double chi_start = 0.0, chi_heading = 0.0;
    for (auto [cell, c] : start_counts)
        chi_start += (c - 500.0) * (c - 500.0) / 500.0;
    for (int c : heading_counts)
        chi_heading += (c - 1125.0) * (c - 1125.0) / 1125.0;
    // 99.9th percentiles of chi-square with 80 and 35 degrees of freedom.
    EXPECT_LT(chi_start, 124.8);
    EXPECT_LT(chi_heading, 66.6);
}

TEST(Missions, SingleLegalPairHitRate)
{
    // One low start and one permitted goal pixel 35 m away at 5 cm/px.
    const std::size_t n = 1009;
    const double res = 0.05;
    RoughnessMap r = filled(n, Roughness::high);
    r.classes(504, 200) = Roughness::low; // (10, 25.2)
    r.classes(504, 900) = Roughness::semi; // (45, 25.2)
    const MissionSampler sampler(r, res);
    const double p = 2.0 * std::asin(0.025 / 35.0) / (2.0 * std::numbers::pi);
    const double expected = 1.0 - std::pow(1.0 - p, 10000);
    const int trials = 300;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        auto rng = make_engine(derive_seed(5, {static_cast<std::uint64_t>(t)}));
        try {
            const Mission m = sampler.sample(rng);
            EXPECT_EQ(nearest_pixel(m.goal, res, n), (std::pair<std::size_t, std::size_t>{504, 900}));
            ++hits;
        } catch (const NoValidMissionError&) {
        }
    }
    const double rate = static_cast<double>(hits) / trials;
    const double sd = std::sqrt(expected * (1.0 - expected) / trials);
    EXPECT_NEAR(rate, expected, 4.0 * sd);
}

TEST(Missions, NoEligibleStart)
{
    const RoughnessMap r = filled(129, Roughness::semi);
    auto rng = make_engine(1);
    EXPECT_THROW(sample_mission(r, 50.4 / 128, rng), NoValidMissionError);
}

TEST(Missions, MapTooSmallForLength)
{
    // 20 m map: every goal 35 m away is off the map.
    const RoughnessMap r = filled(101, Roughness::low);
    auto rng = make_engine(1);
    MissionConstraints c;
    c.retry_cap = 50;
    EXPECT_THROW(sample_mission(r, 0.2, rng, c), NoValidMissionError);
}

TEST(Missions, InvalidConstraints)
{
    const RoughnessMap r = filled(65, Roughness::low);
    MissionConstraints c;
    c.length_m = 0.0;
    EXPECT_THROW(MissionSampler(r, 0.5, c), InvalidParameterError);
    EXPECT_THROW(MissionSampler(r, 0.0), InvalidParameterError);
}
