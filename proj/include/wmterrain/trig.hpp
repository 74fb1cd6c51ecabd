#pragma once

// Cosine for very large arguments.
//
// The high-frequency W-M terms feed cos() arguments up to ~1e30 (and far
// beyond with truncation disabled), where libm falls back to a slow
// multi-precision reduction. cos_wide() reduces such arguments exactly with a
// Payne-Hanek style multiply against a fixed table of 1/(2 pi) bits and then
// evaluates the fdlibm minimax kernels on the double-double remainder.
// Arguments below kWideThreshold go to std::cos unchanged.

#include <bit>
#include <cmath>
#include <cstdint>
#include <iterator>

namespace wmterrain {

namespace trig_detail {

// Bits of 1/(2 pi) after the binary point, most significant first.
// Covers every double exponent with 192 bits of headroom.
inline constexpr std::uint64_t kInvTwoPi[] = {
    0x28be60db9391054aULL, 0x7f09d5f47d4d3770ULL, 0x36d8a5664f10e410ULL, 0x7f9458eaf7aef158ULL,
    0x6dc91b8e909374b8ULL, 0x01924bba82746487ULL, 0x3f877ac72c4a69cfULL, 0xba208d7d4baed121ULL,
    0x3a671c09ad17df90ULL, 0x4e64758e60d4ce7dULL, 0x272117e2ef7e4a0eULL, 0xc7fe25fff7816603ULL,
    0xfbcbc462d6829b47ULL, 0xdb4d9fb3c9f2c26dULL, 0xd3d18fd9a797fa8bULL, 0x5d49eeb1faf97c5eULL,
    0xcf41ce7de294a4baULL, 0x9afed7ec47e35742ULL, 0x1580cc11bf1edaeaULL, 0xfc33ef0826bd0d87ULL,
    0x6a78e45857b986c2ULL, 0x19666157c5281a10ULL,
};

/// 64 table bits starting at 1-based bit index `start`; bits outside the
/// table (index < 1) read as zero.
inline std::uint64_t inv_two_pi_bits(int start) noexcept
{
    if (start + 63 < 1)
        return 0;
    if (start < 1)
        return inv_two_pi_bits(1) >> (1 - start);
    const int pos = start - 1;
    const int w = pos / 64;
    const int b = pos % 64;
    const std::uint64_t hi = kInvTwoPi[w] << b;
    const std::uint64_t lo = (b != 0 && w + 1 < static_cast<int>(std::size(kInvTwoPi))) ? kInvTwoPi[w + 1] >> (64 - b) : 0;
    return hi | lo;
}

// fdlibm __kernel_cos / __kernel_sin, valid on |x| <= pi/4 with x + y the
// double-double argument.
inline double kernel_cos(double x, double y) noexcept
{
    constexpr double C1 = 4.16666666666666019037e-02;
    constexpr double C2 = -1.38888888888741095749e-03;
    constexpr double C3 = 2.48015872894767294178e-05;
    constexpr double C4 = -2.75573143513906633035e-07;
    constexpr double C5 = 2.08757232129817482790e-09;
    constexpr double C6 = -1.13596475577881948265e-11;
    const double z = x * x;
    double w = z * z;
    const double r = z * (C1 + z * (C2 + z * C3)) + w * w * (C4 + z * (C5 + z * C6));
    const double hz = 0.5 * z;
    w = 1.0 - hz;
    return w + (((1.0 - w) - hz) + (z * r - x * y));
}

inline double kernel_sin(double x, double y) noexcept
{
    constexpr double S1 = -1.66666666666666324348e-01;
    constexpr double S2 = 8.33333333332248946124e-03;
    constexpr double S3 = -1.98412698298579493134e-04;
    constexpr double S4 = 2.75573137070700676789e-06;
    constexpr double S5 = -2.50507602534068634195e-08;
    constexpr double S6 = 1.58969099521155010221e-10;
    const double z = x * x;
    const double w = z * z;
    const double r = S2 + z * (S3 + z * S4) + z * w * (S5 + z * S6);
    const double v = z * x;
    return x - ((z * (0.5 * y - v * r) - y) - v * S1);
}

} // namespace trig_detail

/// |x| below this goes to std::cos.
inline constexpr double kWideThreshold = 0x1.0p26;

/// cos(x), accurate to about one ulp; NaN for infinite or NaN x.
inline double cos_wide(double x) noexcept
{
    using namespace trig_detail;
    x = std::fabs(x);
    if (x < kWideThreshold || !std::isfinite(x))
        return std::cos(x);

    // x = m * 2^k with m a 53-bit integer.
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const std::uint64_t m = (bits & ((std::uint64_t{1} << 52) - 1)) | (std::uint64_t{1} << 52);
    const int k = static_cast<int>(bits >> 52) - 1075;

    // frac(x / 2pi) = frac(m * frac(2^k / 2pi)); only the 192-bit window of
    // table bits after position k contributes.
    const std::uint64_t w0 = inv_two_pi_bits(k + 1);
    const std::uint64_t w1 = inv_two_pi_bits(k + 65);
    const std::uint64_t w2 = inv_two_pi_bits(k + 129);
    using u128 = unsigned __int128;
    const u128 p2 = static_cast<u128>(m) * w2;
    const u128 p1 = static_cast<u128>(m) * w1 + static_cast<std::uint64_t>(p2 >> 64);
    const std::uint64_t f0 = m * w0 + static_cast<std::uint64_t>(p1 >> 64);
    const auto f1 = static_cast<std::uint64_t>(p1);
    const auto f2 = static_cast<std::uint64_t>(p2);

    // Quarter turns: quadrant from the top two bits, the rest is a 128-bit
    // fraction of a quarter turn, recentred to [-1/2, 1/2).
    unsigned quadrant = static_cast<unsigned>(f0 >> 62);
    const std::uint64_t t0 = (f0 << 2) | (f1 >> 62);
    const std::uint64_t t1 = (f1 << 2) | (f2 >> 62);
    if (t0 >> 63)
        quadrant = (quadrant + 1) & 3u;

    // Signed fraction = top * 2^-64 + low * 2^-128 with top the two's
    // complement high word; split into a double-double (a, b).
    const auto top = static_cast<std::int64_t>(t0);
    const auto a_int = static_cast<double>(top);
    const auto rem = top - static_cast<std::int64_t>(a_int);
    const double a = a_int * 0x1.0p-64;
    const double b = (static_cast<double>(rem) * 0x1.0p64 + static_cast<double>(t1 >> 11) * 0x1.0p11) * 0x1.0p-128;

    // (y_hi, y_lo) = (a + b) * pi/2 using a Dekker split product.
    constexpr double kPio2Hi = 1.57079632679489655800e+00;
    constexpr double kPio2Lo = 6.12323399573676603587e-17;
    constexpr double kSplit = 134217729.0; // 2^27 + 1
    constexpr double kPio2HiHi = 0x1.921fb5p+0; // top 26 bits of kPio2Hi
    constexpr double kPio2HiLo = kPio2Hi - kPio2HiHi;
    const double a_c = kSplit * a;
    const double a_hi = a_c - (a_c - a);
    const double a_lo = a - a_hi;
    const double p = a * kPio2Hi;
    const double p_err = ((a_hi * kPio2HiHi - p) + a_hi * kPio2HiLo + a_lo * kPio2HiHi) + a_lo * kPio2HiLo;
    const double e = p_err + (a * kPio2Lo + b * kPio2Hi);
    const double y_hi = p + e;
    const double y_lo = e - (y_hi - p);

    switch (quadrant) {
    case 0: return kernel_cos(y_hi, y_lo);
    case 1: return -kernel_sin(y_hi, y_lo);
    case 2: return -kernel_cos(y_hi, y_lo);
    default: return kernel_sin(y_hi, y_lo);
    }
}

} // namespace wmterrain
