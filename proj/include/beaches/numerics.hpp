// SPDX-License-Identifier: Apache-2.0
//
// beaches: adaptive beamspace channel denoising for massive MIMO systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef BEACHES_NUMERICS_HPP
#define BEACHES_NUMERICS_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace beaches {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// splitmix64 finalizer, used to derive independent engine seeds from
// (seed, stream_id) pairs.
inline std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline void bit_reverse_permute(ComplexVector &a)
{
    const std::size_t n = a.size();
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
}

// Forward twiddles exp(-2*pi*i*k/len) for k < len/2, cached per transform
// length. The cache is thread-local so concurrent transforms stay safe.
inline const std::vector<Complex> &twiddle_table(std::size_t len)
{
    thread_local std::unordered_map<std::size_t, std::vector<Complex>> cache;
    auto it = cache.find(len);
    if (it != cache.end())
        return it->second;
    std::vector<Complex> tw(len / 2);
    const double step = -2.0 * M_PI / static_cast<double>(len);
    for (std::size_t k = 0; k < len / 2; ++k)
        tw[k] = std::polar(1.0, step * static_cast<double>(k));
    return cache.emplace(len, std::move(tw)).first->second;
}

// In-place unnormalized radix-2 transform. inverse=true conjugates the
// twiddles (no 1/N scaling here; callers pick their normalization).
inline void fft_radix2(ComplexVector &a, bool inverse)
{
    const std::size_t n = a.size();
    bit_reverse_permute(a);
    for (std::size_t len = 2; len <= n; len <<= 1)
    {
        const auto &tw = twiddle_table(len);
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len)
        {
            for (std::size_t k = 0; k < half; ++k)
            {
                const Complex w = inverse ? std::conj(tw[k]) : tw[k];
                const Complex u = a[i + k];
                const Complex v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

inline void require_power_of_two(std::size_t n, const char *who)
{
    if (!is_power_of_two(n))
        throw std::invalid_argument(std::string(who) + ": length must be a power of two, got " +
                                    std::to_string(n));
}

} // namespace detail

/// Unitary DFT: returns F*x with F F^H = I. Norm-preserving; forward
/// convention exp(-j*2*pi*k*n/B).
inline ComplexVector fft_unitary(const ComplexVector &x)
{
    detail::require_power_of_two(x.size(), "fft_unitary");
    ComplexVector a = x;
    detail::fft_radix2(a, false);
    const double scale = 1.0 / std::sqrt(static_cast<double>(a.size()));
    for (auto &v : a)
        v *= scale;
    return a;
}

/// Exact inverse of fft_unitary.
inline ComplexVector ifft_unitary(const ComplexVector &x)
{
    detail::require_power_of_two(x.size(), "ifft_unitary");
    ComplexVector a = x;
    detail::fft_radix2(a, true);
    const double scale = 1.0 / std::sqrt(static_cast<double>(a.size()));
    for (auto &v : a)
        v *= scale;
    return a;
}

/**
 * Reproducible random stream keyed by (seed, stream_id).
 *
 * Substreams are derived by mixing the pair into the engine seed, so the
 * draw sequence is a pure function of the key: Monte-Carlo code derives one
 * stream per (trial, user, role) counter and may run trials in any order or
 * on any number of threads without changing results. Gaussian samples are
 * produced by a hand-rolled polar transform because the distributions in
 * <random> are implementation-defined.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id),
          engine_(detail::mix64(detail::mix64(seed + 0x9E3779B97F4A7C15ull) ^
                                (stream_id + 0x8BB84B93962EACC9ull)))
    {
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // One circularly-symmetric complex Gaussian sample, E|z|^2 = variance
    // (real and imaginary parts each N(0, variance/2)).
    Complex cscg(double variance)
    {
        if (variance < 0.0)
            throw std::invalid_argument("cscg: variance must be nonnegative");
        if (variance == 0.0)
            return {0.0, 0.0};
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-variance * std::log(u1));
        return std::polar(r, 2.0 * M_PI * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

/// n i.i.d. CSCG samples with per-entry variance `variance`.
inline ComplexVector draw_cscg(std::size_t n, double variance, RngStream &rng)
{
    if (variance < 0.0)
        throw std::invalid_argument("draw_cscg: variance must be nonnegative");
    ComplexVector out(n);
    for (auto &v : out)
        v = rng.cscg(variance);
    return out;
}

} // namespace beaches

#endif // BEACHES_NUMERICS_HPP
