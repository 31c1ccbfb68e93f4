// SPDX-License-Identifier: Apache-2.0
//
// beaches: adaptive beamspace channel denoising for massive MIMO systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Bit-accurate numerical model of the streaming hardware datapath:
// Q(16,8) antenna samples, a radix-2 FFT that scales by two in every stage
// (net 1/B, i.e. 1/sqrt(B) relative to the unitary transform), Q(10,8)
// beamspace samples with 10-bit polar conversion, a 512-entry reciprocal
// LUT, an integer scan for the threshold (hardware variant of the SURE
// search), and an unscaled inverse FFT that restores unity pipeline gain.
// All rounding is round-to-nearest-even; saturation is silent and counted
// in a diagnostics tally. Word lengths beyond the module boundaries
// (twiddles, FFT guard bits, the scan objective) are customized to hold the
// temporary dynamic range without further rounding.

#ifndef BEACHES_FIXEDPOINT_HPP
#define BEACHES_FIXEDPOINT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "beaches/denoiser.hpp"
#include "beaches/numerics.hpp"

namespace beaches::fixedpoint {

struct QFormat {
    unsigned total_bits = 16;
    unsigned frac_bits = 8;
    bool is_signed = true;

    std::int64_t raw_min() const
    {
        return is_signed ? -(std::int64_t{1} << (total_bits - 1)) : 0;
    }
    std::int64_t raw_max() const
    {
        return is_signed ? (std::int64_t{1} << (total_bits - 1)) - 1
                         : (std::int64_t{1} << total_bits) - 1;
    }
    double resolution() const { return std::ldexp(1.0, -static_cast<int>(frac_bits)); }
    double to_real(std::int64_t raw) const { return static_cast<double>(raw) * resolution(); }

    friend bool operator==(const QFormat &, const QFormat &) = default;
};

inline constexpr QFormat kAntennaFmt{16, 8, true};   // antenna-domain samples
inline constexpr QFormat kBeamspaceFmt{10, 8, true}; // beamspace samples (Cartesian)
inline constexpr QFormat kMagnitudeFmt{10, 8, false}; // beamspace magnitudes
inline constexpr QFormat kE0OverBFmt{16, 15, true};  // noise variance / B
inline constexpr QFormat kLutFmt{12, 2, true};       // reciprocal LUT entries
inline constexpr QFormat kScanSFmt{32, 16, true};    // scan accumulator S
inline constexpr QFormat kScanVFmt{24, 2, true};     // scan accumulator V

struct SaturationTally {
    std::uint64_t events = 0;
};

namespace detail {

inline void validate(const QFormat &fmt, const char *who)
{
    if (fmt.total_bits == 0 || fmt.total_bits > 64 || fmt.frac_bits > fmt.total_bits)
        throw std::invalid_argument(std::string(who) + ": invalid Q format");
}

inline std::int64_t saturate(std::int64_t raw, const QFormat &fmt, SaturationTally *tally)
{
    if (raw > fmt.raw_max())
    {
        if (tally)
            ++tally->events;
        return fmt.raw_max();
    }
    if (raw < fmt.raw_min())
    {
        if (tally)
            ++tally->events;
        return fmt.raw_min();
    }
    return raw;
}

// Arithmetic right shift with round-half-to-even on the discarded bits.
inline std::int64_t rne_shift_right(std::int64_t v, unsigned shift)
{
    if (shift == 0)
        return v;
    const std::int64_t floor_v = v >> shift;
    const std::int64_t rem = v - (floor_v << shift);
    const std::int64_t half = std::int64_t{1} << (shift - 1);
    if (rem > half)
        return floor_v + 1;
    if (rem < half)
        return floor_v;
    return (floor_v & 1) ? floor_v + 1 : floor_v;
}

} // namespace detail

/// Nearest representable raw value (ties to even), saturating at the format
/// extremes; saturation is counted in the tally when one is supplied.
inline std::int64_t quantize_raw(double x, const QFormat &fmt, SaturationTally *tally = nullptr)
{
    detail::validate(fmt, "quantize_raw");
    const double scaled = std::ldexp(x, static_cast<int>(fmt.frac_bits));
    // nearbyint honors the default FE_TONEAREST mode: round half to even
    const double rounded = std::nearbyint(scaled);
    if (rounded > static_cast<double>(fmt.raw_max()))
    {
        if (tally)
            ++tally->events;
        return fmt.raw_max();
    }
    if (rounded < static_cast<double>(fmt.raw_min()))
    {
        if (tally)
            ++tally->events;
        return fmt.raw_min();
    }
    return static_cast<std::int64_t>(rounded);
}

inline double quantize(double x, const QFormat &fmt, SaturationTally *tally = nullptr)
{
    return fmt.to_real(quantize_raw(x, fmt, tally));
}

struct FixedComplex {
    std::int64_t re = 0;
    std::int64_t im = 0;
};

struct FixedVector {
    std::vector<FixedComplex> entries;
    QFormat fmt;
};

inline FixedVector quantize_vector(const ComplexVector &x, const QFormat &fmt,
                                   SaturationTally *tally = nullptr)
{
    FixedVector out;
    out.fmt = fmt;
    out.entries.reserve(x.size());
    for (const auto &v : x)
        out.entries.push_back({quantize_raw(v.real(), fmt, tally), quantize_raw(v.imag(), fmt, tally)});
    return out;
}

inline ComplexVector dequantize_vector(const FixedVector &x)
{
    ComplexVector out(x.entries.size());
    for (std::size_t i = 0; i < x.entries.size(); ++i)
        out[i] = Complex{x.fmt.to_real(x.entries[i].re), x.fmt.to_real(x.entries[i].im)};
    return out;
}

namespace detail {

// FFT internals run at kGuardFrac fractional bits; twiddles are Q(18,16).
inline constexpr unsigned kGuardFrac = 16;
inline constexpr unsigned kTwiddleFrac = 16;

struct FixedTwiddle {
    std::int64_t re;
    std::int64_t im;
};

inline const std::vector<FixedTwiddle> &fixed_twiddle_table(std::size_t len)
{
    thread_local std::unordered_map<std::size_t, std::vector<FixedTwiddle>> cache;
    auto it = cache.find(len);
    if (it != cache.end())
        return it->second;
    std::vector<FixedTwiddle> tw(len / 2);
    const double step = -2.0 * M_PI / static_cast<double>(len);
    const double scale = std::ldexp(1.0, kTwiddleFrac);
    for (std::size_t k = 0; k < len / 2; ++k)
    {
        const double angle = step * static_cast<double>(k);
        tw[k] = {static_cast<std::int64_t>(std::nearbyint(std::cos(angle) * scale)),
                 static_cast<std::int64_t>(std::nearbyint(std::sin(angle) * scale))};
    }
    return cache.emplace(len, std::move(tw)).first->second;
}

// Radix-2 pass over guard-precision raws. scale_stages halves every stage
// output (the area-saving forward configuration); inverse conjugates the
// twiddles and lets the word grow.
inline void fixed_fft_core(std::vector<FixedComplex> &a, bool inverse, bool scale_stages)
{
    const std::size_t n = a.size();
    // bit-reverse permutation, same ordering as the float path
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i)
    {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j |= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1)
    {
        const auto &tw = fixed_twiddle_table(len);
        const std::size_t half = len / 2;
        for (std::size_t base = 0; base < n; base += len)
        {
            for (std::size_t k = 0; k < half; ++k)
            {
                const std::int64_t w_re = tw[k].re;
                const std::int64_t w_im = inverse ? -tw[k].im : tw[k].im;
                const FixedComplex u = a[base + k];
                const FixedComplex b = a[base + k + half];
                const std::int64_t v_re =
                    rne_shift_right(b.re * w_re - b.im * w_im, kTwiddleFrac);
                const std::int64_t v_im =
                    rne_shift_right(b.re * w_im + b.im * w_re, kTwiddleFrac);
                FixedComplex sum{u.re + v_re, u.im + v_im};
                FixedComplex diff{u.re - v_re, u.im - v_im};
                if (scale_stages)
                {
                    sum = {rne_shift_right(sum.re, 1), rne_shift_right(sum.im, 1)};
                    diff = {rne_shift_right(diff.re, 1), rne_shift_right(diff.im, 1)};
                }
                a[base + k] = sum;
                a[base + k + half] = diff;
            }
        }
    }
}

} // namespace detail

/**
 * Forward FFT with a divide-by-two in each of the log2(B) stages: total
 * scaling 1/B relative to the unnormalized DFT (1/sqrt(B) relative to the
 * unitary one). Input Q(16,8), output Q(10,8).
 */
inline FixedVector fft_scaled_fixed(const FixedVector &x, SaturationTally *tally = nullptr)
{
    if (!(x.fmt == kAntennaFmt))
        throw std::invalid_argument("fft_scaled_fixed: input must be Q(16,8)");
    if (!is_power_of_two(x.entries.size()))
        throw std::invalid_argument("fft_scaled_fixed: length must be a power of two");

    const unsigned up = detail::kGuardFrac - kAntennaFmt.frac_bits;
    std::vector<FixedComplex> work(x.entries.size());
    for (std::size_t i = 0; i < x.entries.size(); ++i)
        work[i] = {x.entries[i].re << up, x.entries[i].im << up};

    detail::fixed_fft_core(work, false, true);

    FixedVector out;
    out.fmt = kBeamspaceFmt;
    out.entries.resize(work.size());
    const unsigned down = detail::kGuardFrac - kBeamspaceFmt.frac_bits;
    for (std::size_t i = 0; i < work.size(); ++i)
        out.entries[i] = {
            detail::saturate(detail::rne_shift_right(work[i].re, down), kBeamspaceFmt, tally),
            detail::saturate(detail::rne_shift_right(work[i].im, down), kBeamspaceFmt, tally)};
    return out;
}

/**
 * Inverse FFT with no stage scaling (word growth is absorbed by the forward
 * 1/B scaling, so the net pipeline gain is one). Input Q(10,8), output
 * Q(16,8).
 */
inline FixedVector ifft_unscaled_fixed(const FixedVector &x, SaturationTally *tally = nullptr)
{
    if (!(x.fmt == kBeamspaceFmt))
        throw std::invalid_argument("ifft_unscaled_fixed: input must be Q(10,8)");
    if (!is_power_of_two(x.entries.size()))
        throw std::invalid_argument("ifft_unscaled_fixed: length must be a power of two");

    const unsigned up = detail::kGuardFrac - kBeamspaceFmt.frac_bits;
    std::vector<FixedComplex> work(x.entries.size());
    for (std::size_t i = 0; i < x.entries.size(); ++i)
        work[i] = {x.entries[i].re << up, x.entries[i].im << up};

    detail::fixed_fft_core(work, true, false);

    FixedVector out;
    out.fmt = kAntennaFmt;
    out.entries.resize(work.size());
    const unsigned down = detail::kGuardFrac - kAntennaFmt.frac_bits;
    for (std::size_t i = 0; i < work.size(); ++i)
        out.entries[i] = {
            detail::saturate(detail::rne_shift_right(work[i].re, down), kAntennaFmt, tally),
            detail::saturate(detail::rne_shift_right(work[i].im, down), kAntennaFmt, tally)};
    return out;
}

struct PolarFixed {
    std::int64_t mag_raw = 0; // unsigned Q(10,8), raw in [0, 1023]
    int phase_raw = 0;        // 10-bit two's complement, phase_raw*2*pi/1024 in [-pi, pi)
};

/**
 * Cartesian Q(10,8) to 10-bit polar. The rotation engine is modeled by its
 * accuracy contract: exact magnitude/angle, then quantization to 10-bit
 * outputs. The squared magnitude is exact in integers, so sqrt is correctly
 * rounded and the result is platform-independent.
 */
inline PolarFixed to_polar_fixed(const FixedComplex &z)
{
    if (z.re == 0 && z.im == 0)
        return {0, 0};
    const double mag2 = static_cast<double>(z.re * z.re + z.im * z.im);
    const double mag_raw_f = std::sqrt(mag2); // magnitude in raw (frac-8) units
    std::int64_t mag_raw = static_cast<std::int64_t>(std::nearbyint(mag_raw_f));
    if (mag_raw > kMagnitudeFmt.raw_max())
        mag_raw = kMagnitudeFmt.raw_max(); // unreachable for Q(10,8) inputs
    const double angle = std::atan2(static_cast<double>(z.im), static_cast<double>(z.re));
    long phase = static_cast<long>(std::nearbyint(angle * (1024.0 / (2.0 * M_PI))));
    if (phase >= 512)
        phase -= 1024; // +pi wraps to -pi
    return {mag_raw, static_cast<int>(phase)};
}

namespace detail {

inline const std::array<double, 1024> &cos_table()
{
    static const std::array<double, 1024> table = [] {
        std::array<double, 1024> t{};
        for (std::size_t i = 0; i < 1024; ++i)
        {
            const int raw = static_cast<int>(i) - 512;
            t[i] = std::cos(static_cast<double>(raw) * (2.0 * M_PI / 1024.0));
        }
        return t;
    }();
    return table;
}

inline const std::array<double, 1024> &sin_table()
{
    static const std::array<double, 1024> table = [] {
        std::array<double, 1024> t{};
        for (std::size_t i = 0; i < 1024; ++i)
        {
            const int raw = static_cast<int>(i) - 512;
            t[i] = std::sin(static_cast<double>(raw) * (2.0 * M_PI / 1024.0));
        }
        return t;
    }();
    return table;
}

} // namespace detail

/// 10-bit polar back to Cartesian Q(10,8) (exact rotation, then rounding).
inline FixedComplex from_polar_fixed(std::int64_t mag_raw, int phase_raw,
                                     SaturationTally *tally = nullptr)
{
    const std::size_t idx = static_cast<std::size_t>(phase_raw + 512) & 1023u;
    const double m = static_cast<double>(mag_raw);
    const std::int64_t re =
        static_cast<std::int64_t>(std::nearbyint(m * detail::cos_table()[idx]));
    const std::int64_t im =
        static_cast<std::int64_t>(std::nearbyint(m * detail::sin_table()[idx]));
    return {detail::saturate(re, kBeamspaceFmt, tally), detail::saturate(im, kBeamspaceFmt, tally)};
}

/**
 * Reciprocal lookup: 512 entries indexed by the 9 MSBs of the 10-bit
 * magnitude. Each entry holds the rounded reciprocal of its cell midpoint in
 * Q(12,2); index 0 (magnitudes below one cell) returns the saturated format
 * maximum 511.75.
 */
inline std::int64_t reciprocal_lut(std::int64_t mag_raw)
{
    if (mag_raw < 0)
        throw std::invalid_argument("reciprocal_lut: magnitude must be nonnegative");
    static const std::array<std::int64_t, 512> table = [] {
        std::array<std::int64_t, 512> t{};
        t[0] = kLutFmt.raw_max(); // 511.75, the saturated reciprocal
        for (std::size_t idx = 1; idx < 512; ++idx)
        {
            // cell covers raw magnitudes {2*idx, 2*idx+1}; midpoint value
            // (2*idx+1)/256
            const double midpoint = static_cast<double>(2 * idx + 1) / 256.0;
            const std::int64_t raw =
                static_cast<std::int64_t>(std::nearbyint(4.0 / midpoint));
            t[idx] = std::min(raw, kLutFmt.raw_max());
        }
        return t;
    }();
    const std::size_t idx = static_cast<std::size_t>(std::min<std::int64_t>(mag_raw, 1023)) >> 1;
    return table[idx];
}

struct FixedScanResult {
    std::int64_t tau_raw = 0; // threshold in magnitude raw units (frac 8)
    std::int64_t obj_raw = 0; // scaled objective, frac 25
};

/**
 * Integer threshold scan (hardware variant): sorted magnitudes themselves
 * are the candidates, the objective is SURE scaled by B with the constant E0
 * dropped and evaluated with the E0/B coefficient the datapath stores:
 *
 *   obj_k = S + (B-k+1) tau_k^2 - (E0/B) tau_k V - 2 (E0/B) (k-1),
 *
 * all in the scaled beamspace domain where the effective per-entry noise
 * variance is E0/B. S accumulates in Q(32,16), V in Q(24,2) (overflow-free
 * for B <= 1024); the combined objective is exact at 25 fractional bits.
 */
inline FixedScanResult scan_optimal_tau_fixed(const std::vector<std::int64_t> &sorted_mag_raws,
                                              double e0, SaturationTally *tally = nullptr)
{
    const std::size_t b_total = sorted_mag_raws.size();
    if (b_total == 0)
        throw std::invalid_argument("scan_optimal_tau_fixed: empty input");
    if (e0 < 0.0)
        throw std::invalid_argument("scan_optimal_tau_fixed: e0 must be nonnegative");
    for (std::size_t i = 0; i < b_total; ++i)
        if (sorted_mag_raws[i] < 0 || (i > 0 && sorted_mag_raws[i] < sorted_mag_raws[i - 1]))
            throw std::invalid_argument(
                "scan_optimal_tau_fixed: magnitudes must be nonnegative and sorted ascending");

    const std::int64_t e0b_raw =
        quantize_raw(e0 / static_cast<double>(b_total), kE0OverBFmt, tally); // frac 15

    std::int64_t v_raw = 0; // frac 2
    for (std::int64_t m : sorted_mag_raws)
        v_raw = detail::saturate(v_raw + reciprocal_lut(m), kScanVFmt, tally);

    std::int64_t s_raw = 0; // frac 16
    std::int64_t best_tau = 0;
    std::int64_t best_obj = 0;
    bool have_best = false;
    for (std::size_t k = 1; k <= b_total; ++k)
    {
        const std::int64_t tau = sorted_mag_raws[k - 1];
        const std::int64_t above = static_cast<std::int64_t>(b_total - k + 1);
        const std::int64_t below = static_cast<std::int64_t>(k - 1);
        // terms aligned at frac 25
        const std::int64_t t_s = s_raw << 9;
        const std::int64_t t_quad = (above * tau * tau) << 9;
        const std::int64_t t_recip = e0b_raw * tau * v_raw; // 15 + 8 + 2 = 25
        const std::int64_t t_count = (2 * e0b_raw * below) << 10;
        const std::int64_t obj = t_s + t_quad - t_recip - t_count;
        if (!have_best || obj < best_obj)
        {
            have_best = true;
            best_obj = obj;
            best_tau = tau;
        }
        s_raw = detail::saturate(s_raw + tau * tau, kScanSFmt, tally);
        v_raw = detail::saturate(v_raw - reciprocal_lut(tau), kScanVFmt, tally);
    }
    return {best_tau, best_obj};
}

/**
 * Full fixed-point denoise: quantize to Q(16,8), scaled FFT, polar
 * conversion, integer scan, magnitude shrinkage, Cartesian reconstruction,
 * unscaled inverse FFT. The returned vectors are dequantized; the beamspace
 * vector and tau_star are rescaled to the unitary-transform convention of
 * the floating-point path (the internal beamspace runs at 1/sqrt(B) of it),
 * and sure_min converts the scaled objective accordingly.
 */
inline DenoiseResult denoise_fixed(const ComplexVector &y, double e0,
                                   SaturationTally *tally = nullptr)
{
    if (!is_power_of_two(y.size()))
        throw std::invalid_argument("denoise_fixed: length must be a power of two");
    if (e0 < 0.0)
        throw std::invalid_argument("denoise_fixed: e0 must be nonnegative");

    const std::size_t b_total = y.size();
    const FixedVector input_q = quantize_vector(y, kAntennaFmt, tally);
    const FixedVector beam = fft_scaled_fixed(input_q, tally);

    std::vector<PolarFixed> polar(b_total);
    for (std::size_t i = 0; i < b_total; ++i)
        polar[i] = to_polar_fixed(beam.entries[i]);

    std::vector<std::int64_t> mags(b_total);
    for (std::size_t i = 0; i < b_total; ++i)
        mags[i] = polar[i].mag_raw;
    std::sort(mags.begin(), mags.end());

    const FixedScanResult scan = scan_optimal_tau_fixed(mags, e0, tally);

    FixedVector shrunk;
    shrunk.fmt = kBeamspaceFmt;
    shrunk.entries.resize(b_total);
    for (std::size_t i = 0; i < b_total; ++i)
    {
        const std::int64_t mag = std::max<std::int64_t>(polar[i].mag_raw - scan.tau_raw, 0);
        shrunk.entries[i] = from_polar_fixed(mag, polar[i].phase_raw, tally);
    }

    const FixedVector antenna = ifft_unscaled_fixed(shrunk, tally);

    DenoiseResult result;
    result.h_star = dequantize_vector(antenna);
    result.h_hat_star = dequantize_vector(shrunk);
    const double unitary_scale = std::sqrt(static_cast<double>(b_total));
    for (auto &v : result.h_hat_star)
        v *= unitary_scale;
    result.tau_star = kMagnitudeFmt.to_real(scan.tau_raw) * unitary_scale;
    result.sure_min = std::ldexp(static_cast<double>(scan.obj_raw), -25) + e0;
    return result;
}

} // namespace beaches::fixedpoint

#endif // BEACHES_FIXEDPOINT_HPP
