#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wmterrain/roughness.hpp"

using namespace wmterrain;

namespace {

QuantizedDEM random_q(int n, std::uint64_t seed, int spread = 65536)
{
    std::mt19937_64 rng(seed);
    QuantizedDEM q{Grid<std::uint16_t>(static_cast<std::size_t>(n))};
    for (auto& v : q.values)
        v = static_cast<std::uint16_t>(rng() % static_cast<std::uint64_t>(spread));
    return q;
}

RoughnessMap random_classes(int n, std::uint64_t seed, double p_semi, double p_high)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u;
    RoughnessMap r{Grid<Roughness>(static_cast<std::size_t>(n)), {}};
    for (auto& c : r.classes) {
        const double x = u(rng);
        c = x < p_high ? Roughness::high : (x < p_high + p_semi ? Roughness::semi : Roughness::low);
    }
    return r;
}

std::vector<std::uint8_t> bytes(const RoughnessMap& r)
{
    std::vector<std::uint8_t> out;
    for (auto c : r.classes)
        out.push_back(static_cast<std::uint8_t>(c));
    return out;
}

} // namespace

TEST(Gradient, WorkedExample)
{
    // A 250-unit step to an edge neighbour at 5 cm spacing gives 50.
    QuantizedDEM q{Grid<std::uint16_t>(3, 1000)};
    q.values(1, 2) = 1250;
    const auto g = moore_gradient_map(q, 0.05);
    EXPECT_DOUBLE_EQ(g.values(1, 1), 50.0);
    EXPECT_DOUBLE_EQ(g.values(0, 1), 250.0 / (5.0 * std::numbers::sqrt2));
    EXPECT_EQ(classify_value(g.values(1, 1), {}), Roughness::low);
}

TEST(Gradient, FlatIsZero)
{
    const auto g = moore_gradient_map({Grid<std::uint16_t>(8, 777)}, 0.05);
    for (double v : g.values)
        EXPECT_EQ(v, 0.0);
}

TEST(Gradient, MatchesBruteForce)
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto q = random_q(32, s);
        const auto g = moore_gradient_map(q, 0.05);
        const auto ref = oracle::gradient(std::vector<std::uint16_t>(q.values.begin(), q.values.end()), 32, 5.0);
        for (std::size_t k = 0; k < ref.size(); ++k)
            ASSERT_EQ(g.values[k], ref[k]);
    }
}

TEST(Gradient, TooSmall)
{
    EXPECT_THROW(moore_gradient_map({Grid<std::uint16_t>(2)}, 0.05), DegenerateInputError);
    EXPECT_THROW(moore_gradient_map({Grid<std::uint16_t>(4)}, 0.0), InvalidParameterError);
}

TEST(Classify, BoundariesBelongToLowerClass)
{
    const RoughnessThresholds t;
    EXPECT_EQ(classify_value(0.0, t), Roughness::low);
    EXPECT_EQ(classify_value(50.0, t), Roughness::low);
    EXPECT_EQ(classify_value(std::nextafter(50.0, 100.0), t), Roughness::semi);
    EXPECT_EQ(classify_value(140.0, t), Roughness::semi);
    EXPECT_EQ(classify_value(std::nextafter(140.0, 200.0), t), Roughness::high);
    EXPECT_THROW(classify(GradientMap{Grid<double>(3)}, 140.0, 50.0), InvalidParameterError);
}

TEST(Disk, HalfWidths)
{
    EXPECT_EQ(disk_half_widths(1), (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(disk_half_widths(2), (std::vector<int>{0, 1, 2, 1, 0}));
    const auto w5 = disk_half_widths(5);
    EXPECT_EQ(w5[5], 5);
    EXPECT_EQ(w5[0], 0);
    EXPECT_EQ(w5[1], 3);
}

TEST(Morphology, DilateErodeMatchBruteForce)
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        std::mt19937_64 rng(s);
        Mask m(32);
        for (auto& v : m)
            v = rng() % 7 == 0;
        const std::vector<std::uint8_t> raw(m.begin(), m.end());
        for (int r : {1, 2, 5}) {
            const auto d = dilate(m, r);
            const auto e = erode(m, r);
            EXPECT_EQ(std::vector<std::uint8_t>(d.begin(), d.end()), oracle::dilate(raw, 32, r, 0));
            EXPECT_EQ(std::vector<std::uint8_t>(e.begin(), e.end()), oracle::erode(raw, 32, r));
        }
    }
}

TEST(Morphology, ClosingIsExtensiveAndIdempotent)
{
    std::mt19937_64 rng(4);
    Mask m(40);
    for (auto& v : m)
        v = rng() % 5 == 0;
    const Mask c = close(m, 3);
    for (std::size_t k = 0; k < m.count(); ++k)
        EXPECT_GE(c[k], m[k]);
    EXPECT_EQ(close(c, 3), c);
}

TEST(Morphology, ClosingFillsSmallHole)
{
    Mask m(21, 1);
    m(10, 10) = 0;
    m(10, 11) = 0;
    EXPECT_EQ(close(m, 2), Mask(21, 1));
}

TEST(Morphology, ThreeClassMatchesBruteForce)
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto r = random_classes(32, s, 0.15, 0.05);
        EXPECT_EQ(bytes(morphological_close(r, 5)), oracle::close_classes(bytes(r), 32, 5));
    }
}

TEST(Morphology, PriorityNeverLowersAClass)
{
    const auto r = random_classes(48, 9, 0.2, 0.1);
    const auto c = morphological_close(r, 3);
    for (std::size_t k = 0; k < r.classes.count(); ++k)
        EXPECT_GE(c.classes[k], r.classes[k]);
}

TEST(Composition, InteriorOnlyAndSumsToHundred)
{
    // 21 px at 1 m: centers 5..15 are interior.
    RoughnessMap r{Grid<Roughness>(21, Roughness::high), {}};
    for (std::size_t i = 5; i <= 15; ++i)
        for (std::size_t j = 5; j <= 15; ++j)
            r.classes(i, j) = Roughness::low;
    r.classes(5, 5) = Roughness::semi;
    const auto c = composition(r, 1.0, 5.0);
    EXPECT_DOUBLE_EQ(c.high_pct, 0.0);
    EXPECT_DOUBLE_EQ(c.semi_pct, 100.0 / 121.0);
    EXPECT_NEAR(c.low_pct + c.semi_pct + c.high_pct, 100.0, 1e-12);

    const auto range = interior_range(1009, 0.05, 5.0);
    EXPECT_EQ(range.first, 100u);
    EXPECT_EQ(range.last, 908u);
    EXPECT_THROW(composition(r, 0.1, 5.0), DegenerateInputError);
}

TEST(Composition, FlatMapIsAllLow)
{
    const auto r = classify(moore_gradient_map({Grid<std::uint16_t>(257, 100)}, 0.196875));
    const auto c = composition(r, 0.196875);
    EXPECT_EQ(c.low_pct, 100.0);
}
