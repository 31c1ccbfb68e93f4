// SPDX-License-Identifier: Apache-2.0
//
// beaches: adaptive beamspace channel denoising for massive MIMO systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef BEACHES_MODULATION_HPP
#define BEACHES_MODULATION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "beaches/numerics.hpp"

namespace beaches {

enum class Constellation { Qpsk, Qam16 };

inline const char *to_string(Constellation c)
{
    return c == Constellation::Qpsk ? "QPSK" : "16QAM";
}

inline Constellation constellation_from_string(const std::string &s)
{
    if (s == "QPSK" || s == "qpsk")
        return Constellation::Qpsk;
    if (s == "16QAM" || s == "16qam" || s == "QAM16")
        return Constellation::Qam16;
    throw std::invalid_argument("unknown constellation '" + s + "' (expected 'QPSK' or '16QAM')");
}

inline std::size_t bits_per_symbol(Constellation c)
{
    return c == Constellation::Qpsk ? 2 : 4;
}

namespace detail {

// Gray-labeled PAM levels per axis: two bits map to {-3,-1,+1,+3} so that
// adjacent levels differ in one bit.
inline double gray_level(std::uint8_t b0, std::uint8_t b1)
{
    const unsigned g = (static_cast<unsigned>(b0) << 1) | b1;
    switch (g)
    {
    case 0b00: return -3.0;
    case 0b01: return -1.0;
    case 0b11: return +1.0;
    default: return +3.0; // 0b10
    }
}

inline void gray_bits(double level, std::uint8_t &b0, std::uint8_t &b1)
{
    if (level < 0.0)
    {
        b0 = 0;
        b1 = (level < -2.0) ? 0 : 1;
    }
    else
    {
        b0 = 1;
        b1 = (level > 2.0) ? 0 : 1;
    }
}

inline constexpr double kQam16Scale = 0.31622776601683794; // 1/sqrt(10)
inline constexpr double kQpskScale = 0.7071067811865476;   // 1/sqrt(2)

} // namespace detail

/// Maps bits to unit-average-energy symbols (Gray labeling, square QAM).
inline ComplexVector map_bits(const std::vector<std::uint8_t> &bits, Constellation c)
{
    const std::size_t bps = bits_per_symbol(c);
    if (bits.size() % bps != 0)
        throw std::invalid_argument("map_bits: bit count must be a multiple of bits per symbol");
    ComplexVector symbols(bits.size() / bps);
    for (std::size_t s = 0; s < symbols.size(); ++s)
    {
        const std::uint8_t *b = bits.data() + s * bps;
        if (c == Constellation::Qpsk)
        {
            symbols[s] = Complex{b[0] ? -detail::kQpskScale : detail::kQpskScale,
                                 b[1] ? -detail::kQpskScale : detail::kQpskScale};
        }
        else
        {
            symbols[s] = Complex{detail::gray_level(b[0], b[1]) * detail::kQam16Scale,
                                 detail::gray_level(b[2], b[3]) * detail::kQam16Scale};
        }
    }
    return symbols;
}

/// Minimum-distance hard decision back to bits.
inline std::vector<std::uint8_t> demap_symbols(const ComplexVector &symbols, Constellation c)
{
    std::vector<std::uint8_t> bits(symbols.size() * bits_per_symbol(c));
    for (std::size_t s = 0; s < symbols.size(); ++s)
    {
        std::uint8_t *b = bits.data() + s * bits_per_symbol(c);
        if (c == Constellation::Qpsk)
        {
            b[0] = symbols[s].real() < 0.0 ? 1 : 0;
            b[1] = symbols[s].imag() < 0.0 ? 1 : 0;
        }
        else
        {
            detail::gray_bits(symbols[s].real() / detail::kQam16Scale, b[0], b[1]);
            detail::gray_bits(symbols[s].imag() / detail::kQam16Scale, b[2], b[3]);
        }
    }
    return bits;
}

} // namespace beaches

#endif // BEACHES_MODULATION_HPP
