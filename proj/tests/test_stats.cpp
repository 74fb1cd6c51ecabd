#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "wmterrain/stats.hpp"

using namespace wmterrain;

namespace {

bool close_rel(double a, double b, double rel = 1e-9)
{
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

TrialResult trial(std::size_t index, Outcome o, double acc = 0.0)
{
    TrialResult t;
    t.index = index;
    t.outcome = o;
    t.rms_vertical_accel = acc;
    t.rms_pitch_rate = 2 * acc;
    t.rms_roll_rate = 3 * acc;
    t.traversal_time_s = 35.0 + acc;
    return t;
}

} // namespace

TEST(SuccessRate, Examples)
{
    std::vector<Outcome> o(20, Outcome::success);
    EXPECT_EQ(success_rate(o), 100.0);
    std::fill(o.begin(), o.end(), Outcome::stuck);
    EXPECT_EQ(success_rate(o), 0.0);
    std::fill(o.begin(), o.begin() + 14, Outcome::success);
    o[19] = Outcome::tipped;
    EXPECT_EQ(success_rate(o), 70.0);
    EXPECT_THROW(success_rate({}), EmptyInputError);
}

TEST(Rms, Examples)
{
    EXPECT_EQ(rms(std::vector<double>{0, 0, 0}), 0.0);
    EXPECT_EQ(rms(std::vector<double>{3, -3}), 3.0);
    EXPECT_NEAR(rms(std::vector<double>{1, 2, 2}), std::sqrt(3.0), 1e-15);
    EXPECT_THROW(rms({}), EmptyInputError);
}

TEST(Box, OneToFive)
{
    const auto b = median_iqr_outliers(std::vector<double>{5, 3, 1, 4, 2});
    EXPECT_EQ(b.median, 3.0);
    EXPECT_EQ(b.q1, 2.0);
    EXPECT_EQ(b.q3, 4.0);
    EXPECT_EQ(b.iqr, 2.0);
    EXPECT_TRUE(b.outliers.empty());
    EXPECT_EQ(b.whisker_low, 1.0);
    EXPECT_EQ(b.whisker_high, 5.0);
}

TEST(Box, ConstantAndSingleOutlier)
{
    const auto c = median_iqr_outliers(std::vector<double>{7, 7, 7, 7});
    EXPECT_EQ(c.median, 7.0);
    EXPECT_EQ(c.iqr, 0.0);
    EXPECT_TRUE(c.outliers.empty());

    const auto o = median_iqr_outliers(std::vector<double>{1, 1, 1, 1, 100});
    EXPECT_EQ(o.q3, 1.0);
    EXPECT_EQ(o.outliers, std::vector<double>{100.0});
    EXPECT_EQ(o.whisker_high, 1.0);
    EXPECT_THROW(median_iqr_outliers({}), EmptyInputError);
}

TEST(Box, BoundsAreInclusive)
{
    // Q1 = 2, Q3 = 4, bounds [-1, 7]: 7 stays in, 7.5 is out.
    const auto b = median_iqr_outliers(std::vector<double>{1, 2, 3, 4, 5, 2, 3, 4, 7});
    EXPECT_EQ(b.upper_bound, b.q3 + 1.5 * b.iqr);
    for (double x : {1.0, 2.0, 3.0, 4.0, 5.0, 7.0})
        EXPECT_TRUE((x >= b.lower_bound && x <= b.upper_bound) || std::count(b.outliers.begin(), b.outliers.end(), x));
}

TEST(Box, MatchesReferenceOnRandomSamples)
{
    std::mt19937_64 rng(8);
    for (int s = 0; s < 200; ++s) {
        const std::size_t n = 1 + rng() % 60;
        std::vector<double> v(n);
        std::lognormal_distribution<double> ln(0.0, 1.5);
        for (auto& x : v)
            x = ln(rng) * (rng() % 2 ? 1 : -1);
        const auto b = median_iqr_outliers(v);
        const double q1 = oracle::quantile(v, 0.25), q3 = oracle::quantile(v, 0.75);
        ASSERT_TRUE(close_rel(b.median, oracle::quantile(v, 0.5)));
        ASSERT_TRUE(close_rel(b.q1, q1));
        ASSERT_TRUE(close_rel(b.q3, q3));
        ASSERT_GE(b.iqr, 0.0);
        std::vector<double> out;
        for (double x : v)
            if (x < b.lower_bound || x > b.upper_bound)
                out.push_back(x);
        std::sort(out.begin(), out.end());
        ASSERT_EQ(b.outliers, out);
        ASSERT_TRUE(close_rel(rms(v), oracle::rms(v)));
    }
}

TEST(Aggregate, GroupsByDimensionAndExcludesFailures)
{
    MapResult a{"a", 2.3, 1, {80, 15, 5}, {trial(0, Outcome::success, 1.0), trial(1, Outcome::stuck, 99.0)}};
    MapResult b{"b", 2.6, 2, {70, 20, 10}, {trial(0, Outcome::tipped), trial(1, Outcome::success, 2.0)}};
    MapResult c{"c", 2.3, 3, {90, 8, 2}, {trial(0, Outcome::success, 3.0), trial(1, Outcome::success, 5.0)}};
    const std::vector<MapResult> maps = {a, b, c};
    const auto g = aggregate(maps);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].fractal_dim, 2.3);
    EXPECT_EQ(g[0].maps, 2u);
    EXPECT_EQ(g[0].trials, 4u);
    EXPECT_EQ(g[0].successes, 3u);
    EXPECT_EQ(g[0].metrics.at(metric::low_pct).median, 85.0);
    EXPECT_EQ(g[0].metrics.at(metric::success_rate).median, 75.0);
    EXPECT_EQ(g[0].metrics.at(metric::rms_vertical_accel).median, 3.0);
    EXPECT_EQ(g[0].metrics.at(metric::rms_vertical_accel).count, 3u);
    EXPECT_EQ(g[1].metrics.at(metric::rms_roll_rate).median, 6.0);
    EXPECT_EQ(g[1].metrics.at(metric::success_rate).median, 50.0);
}

TEST(Aggregate, SingleMapGivesItsValues)
{
    const std::vector<MapResult> maps = {{"a", 2.45, 1, {60, 30, 10}, {trial(0, Outcome::success, 0.4)}}};
    const auto g = aggregate(maps);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].metrics.at(metric::high_pct).median, 10.0);
    EXPECT_EQ(g[0].metrics.at(metric::rms_pitch_rate).median, 0.8);
    EXPECT_EQ(g[0].metrics.at(metric::traversal_time).median, 35.4);
}

TEST(Aggregate, NoSuccessesOmitsDynamics)
{
    const std::vector<MapResult> maps = {{"a", 2.3, 1, {60, 30, 10}, {trial(0, Outcome::stuck)}}};
    const auto g = aggregate(maps);
    EXPECT_FALSE(g[0].metrics.contains(metric::rms_vertical_accel));
    EXPECT_EQ(g[0].metrics.at(metric::success_rate).median, 0.0);
}

TEST(Aggregate, OrderIndependent)
{
    std::mt19937_64 rng(5);
    std::vector<MapResult> maps;
    for (int k = 0; k < 30; ++k) {
        MapResult m{"m" + std::to_string(k), k % 3 == 0 ? 2.3 : (k % 3 == 1 ? 2.45 : 2.6), 0,
                    {50.0 + rng() % 40, 10.0 + rng() % 20, 1.0 * (rng() % 5)}, {}};
        for (std::size_t t = 0; t < 5; ++t)
            m.trials.push_back(trial(t, rng() % 3 ? Outcome::success : Outcome::stuck, 0.01 * (rng() % 100)));
        maps.push_back(m);
    }
    const auto ref = aggregate(maps);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(maps.begin(), maps.end(), rng);
        const auto g = aggregate(maps);
        ASSERT_EQ(g.size(), ref.size());
        for (std::size_t d = 0; d < g.size(); ++d)
            for (const auto& [name, box] : ref[d].metrics) {
                EXPECT_EQ(g[d].metrics.at(name).median, box.median);
                EXPECT_EQ(g[d].metrics.at(name).q1, box.q1);
                EXPECT_EQ(g[d].metrics.at(name).outliers, box.outliers);
            }
    }
}

TEST(SummarizeTrial, SuccessCarriesMetrics)
{
    TraversalLog log;
    for (int k = 0; k < 10; ++k)
        log.samples.push_back({0, 0, 0.01 * k * k, 0, 0.5 * k, 0, 0.05 * k});
    log.outcome = Outcome::success;
    log.traversal_time_s = 0.45;
    log.seed = 12;
    const TrialResult r = summarize_trial(log, 3);
    EXPECT_EQ(r.index, 3u);
    EXPECT_EQ(r.seed, 12u);
    EXPECT_NEAR(r.rms_vertical_accel, 0.02 / 0.0025, 1e-9);
    EXPECT_NEAR(r.rms_pitch_rate, 10.0, 1e-9);
    EXPECT_EQ(r.traversal_time_s, 0.45);
    log.outcome = Outcome::stuck;
    EXPECT_EQ(summarize_trial(log, 3).rms_vertical_accel, 0.0);
}
