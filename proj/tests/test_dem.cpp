#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "wmterrain/dem.hpp"
#include "wmterrain/png_io.hpp"

using namespace wmterrain;

namespace {

DEM random_dem(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Grid<double> g(n);
    for (auto& v : g)
        v = nd(rng);
    return {std::move(g), DemStage::raw};
}

double variance(const Grid<double>& g)
{
    double s = 0.0, s2 = 0.0;
    for (double v : g) {
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(g.count());
    return s2 / n - (s / n) * (s / n);
}

} // namespace

TEST(GaussianKernel, WeightsAndWidth)
{
    const auto w = gaussian_kernel(1.0);
    ASSERT_EQ(w.size(), 7u);
    EXPECT_NEAR(w[3], 0.3990502796524549, 1e-15);
    EXPECT_NEAR(w[0], 0.004433048175243745, 1e-15);
    EXPECT_EQ(gaussian_kernel(2.0).size(), 13u);
    EXPECT_EQ(gaussian_kernel(0.4).size(), 5u);
    EXPECT_THROW(gaussian_kernel(0.0), InvalidParameterError);
}

TEST(GaussianSmooth, ConstantPreserved)
{
    const DEM c{Grid<double>(10, 2.5), DemStage::raw};
    const DEM s = gaussian_smooth(c, 1.7);
    for (double v : s.values)
        EXPECT_NEAR(v, 2.5, 1e-14);
    EXPECT_EQ(s.stage, DemStage::smoothed);
}

TEST(GaussianSmooth, ImpulseGivesSampledGaussian)
{
    Grid<double> g(9, 0.0);
    g(4, 4) = 1.0;
    const DEM s = gaussian_smooth({g, DemStage::raw}, 1.0);
    EXPECT_NEAR(s.values(4, 4), 0.15924112569070245, 1e-15);
    const double w[] = {0.004433048175243745, 0.054005582622414484, 0.2420362293761143, 0.3990502796524549};
    for (int i = 1; i <= 7; ++i)
        for (int j = 1; j <= 7; ++j) {
            const int di = std::abs(i - 4), dj = std::abs(j - 4);
            EXPECT_NEAR(s.values(i, j), w[3 - di] * w[3 - dj], 1e-15);
        }
    double total = 0.0;
    for (double v : s.values)
        total += v;
    EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(GaussianSmooth, ReducesVariance)
{
    const DEM d = random_dem(32, 1);
    EXPECT_LT(variance(gaussian_smooth(d, 2.0).values), variance(d.values));
}

TEST(Normalize, ZeroMeanUnitPeak)
{
    const DEM n = normalize_zero_mean_unit({Grid<double>(2, {1.0, 2.0, 3.0, 2.0}), DemStage::raw});
    EXPECT_EQ(n.values.values()[0], -1.0);
    EXPECT_EQ(n.values.values()[1], 0.0);
    EXPECT_EQ(n.values.values()[2], 1.0);
    EXPECT_EQ(n.stage, DemStage::normalized);

    for (std::uint64_t s = 0; s < 10; ++s) {
        const DEM r = normalize_zero_mean_unit(random_dem(17, s));
        double sum = 0.0, peak = 0.0;
        for (double v : r.values) {
            sum += v;
            peak = std::max(peak, std::fabs(v));
        }
        EXPECT_LT(std::fabs(sum / r.values.count()), 1e-9);
        EXPECT_NEAR(peak, 1.0, 1e-12);
    }
}

TEST(Normalize, ConstantRejected)
{
    EXPECT_THROW(normalize_zero_mean_unit({Grid<double>(4, 3.0), DemStage::raw}), DegenerateInputError);
}

TEST(Combine, ProductAndSizeCheck)
{
    const DEM a{Grid<double>(2, {1, 2, 3, 4}), DemStage::normalized};
    const DEM b{Grid<double>(2, {0.5, 0.5, -1, 2}), DemStage::normalized};
    const DEM c = combine_product(a, b, b);
    EXPECT_EQ(c.values, Grid<double>(2, {0.25, 0.5, 3.0, 16.0}));
    EXPECT_EQ(c.stage, DemStage::combined);
    EXPECT_THROW(combine_product(a, b, {Grid<double>(3), DemStage::raw}), SizeMismatchError);
}

TEST(Quantize, EndpointsAndHalfway)
{
    const QuantizedDEM q = quantize_png16({Grid<double>(2, {0.0, 0.5, 1.0, 1.0}), DemStage::combined});
    EXPECT_EQ(q.values[0], 0);
    EXPECT_EQ(q.values[1], 32768);
    EXPECT_EQ(q.values[2], 65535);
    EXPECT_THROW(quantize_png16({Grid<double>(2, 1.0), DemStage::combined}), DegenerateInputError);

    const QuantizedDEM r = quantize_png16(random_dem(20, 4));
    EXPECT_EQ(*std::min_element(r.values.begin(), r.values.end()), 0);
    EXPECT_EQ(*std::max_element(r.values.begin(), r.values.end()), 65535);
}

TEST(Heightfield, ScaleAndEndpoints)
{
    const QuantizedDEM q{Grid<std::uint16_t>(2, {0, 65535, 32768, 0})};
    const Heightfield h = to_heightfield(q, 95.0, 0.75);
    EXPECT_NEAR(h.xy_resolution(), 0.05, 1e-15);
    EXPECT_NEAR(h.elevations()(0, 0), -1.92, 1e-12);
    EXPECT_NEAR(h.elevations()(0, 1), 1.92, 1e-12);
    EXPECT_NEAR(h.max_elevation() - h.min_elevation(), 3.84, 1e-12);

    WorldScale s;
    s.base_resolution_m = 4.0;
    EXPECT_NEAR(to_heightfield(q, s).xy_resolution(), 0.2, 1e-15);
    s.xy_reduction_pct = 100.0;
    EXPECT_THROW(to_heightfield(q, s), InvalidParameterError);
}

TEST(Heightfield, BilinearAndBounds)
{
    const Heightfield h(Grid<double>(2, {0.0, 1.0, 2.0, 3.0}), 1.0);
    EXPECT_DOUBLE_EQ(h.height_at(0.5, 0.5), 1.5);
    EXPECT_DOUBLE_EQ(h.height_at(1.0, 1.0), 3.0);
    EXPECT_DOUBLE_EQ(h.height_at(0.25, 0.0), 0.25);
    EXPECT_THROW(h.height_at(1.01, 0.0), OutOfBoundsError);
    EXPECT_THROW(h.height_at(-0.01, 0.0), OutOfBoundsError);
}

TEST(Multifractal, DeterministicFullRange)
{
    const int n = 33;
    const auto g = GridSpec::defaults_for(bands::low(n));
    const QuantizedDEM a = build_multifractal(bands::low(n), bands::mid(n), bands::high(2.3, n), g, 5, 2.0);
    EXPECT_EQ(a, build_multifractal(bands::low(n), bands::mid(n), bands::high(2.3, n), g, 5, 2.0));
    EXPECT_NE(a, build_multifractal(bands::low(n), bands::mid(n), bands::high(2.3, n), g, 6, 2.0));
    EXPECT_EQ(*std::min_element(a.values.begin(), a.values.end()), 0);
    EXPECT_EQ(*std::max_element(a.values.begin(), a.values.end()), 65535);
}

TEST(Multifractal, FamilyMatchesSingleBuilds)
{
    const int n = 33;
    const auto g = GridSpec::defaults_for(bands::low(n));
    const std::vector<double> dims = {2.3, 2.6};
    const auto fam = build_multifractal_family(bands::low(n), bands::mid(n), bands::high(2.3, n), dims, g, 8);
    ASSERT_EQ(fam.size(), 2u);
    for (std::size_t d = 0; d < 2; ++d)
        EXPECT_EQ(fam[d], build_multifractal(bands::low(n), bands::mid(n), bands::high(dims[d], n), g, 8));
    EXPECT_NE(fam[0], fam[1]);
}

TEST(Multifractal, SmoothingPlacementMatters)
{
    const int n = 33;
    const auto g = GridSpec::defaults_for(bands::low(n));
    PipelineOptions per, after;
    after.smoothing = SmoothingPlacement::after_combination;
    EXPECT_NE(build_multifractal(bands::low(n), bands::mid(n), bands::high(2.45, n), g, 2, per),
              build_multifractal(bands::low(n), bands::mid(n), bands::high(2.45, n), g, 2, after));
}

TEST(Png, RoundTripAndDeterministicBytes)
{
    const auto dir = std::filesystem::temp_directory_path() / "wmterrain_png_test";
    std::filesystem::create_directories(dir);
    QuantizedDEM q{Grid<std::uint16_t>(17)};
    std::mt19937 rng(2);
    for (auto& v : q.values)
        v = static_cast<std::uint16_t>(rng());
    write_png16(dir / "a.png", q);
    write_png16(dir / "b.png", q);
    EXPECT_EQ(read_png16(dir / "a.png"), q);
    std::ifstream a(dir / "a.png", std::ios::binary), b(dir / "b.png", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    EXPECT_EQ(sa, sb);

    Grid<std::uint8_t> m(5, 2);
    m(1, 1) = 0;
    write_png8(dir / "c.png", m);
    EXPECT_EQ(read_png8(dir / "c.png"), m);
    EXPECT_THROW(read_png8(dir / "a.png"), IoError);
    EXPECT_THROW(read_png16(dir / "missing.png"), MissingInputError);
    std::filesystem::remove_all(dir);
}
