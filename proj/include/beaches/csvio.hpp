// SPDX-License-Identifier: Apache-2.0
//
// beaches: adaptive beamspace channel denoising for massive MIMO systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef BEACHES_CSVIO_HPP
#define BEACHES_CSVIO_HPP

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>

#include "beaches/numerics.hpp"

namespace beaches {

struct CsvParseError : std::runtime_error {
    CsvParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line)
    {
    }
    std::size_t line_number;
};

/// Shortest round-trip decimal representation (locale-independent).
inline std::string format_double(double x)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_field(const std::string &field, std::size_t line, const char *what)
{
    double value = 0.0;
    const char *first = field.data();
    const char *last = field.data() + field.size();
    while (first < last && (*first == ' ' || *first == '\t'))
        ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r'))
        --last;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw CsvParseError(line, std::string("malformed ") + what + " value '" + field + "'");
    return value;
}

} // namespace detail

/// Reads one complex entry per row as `re,im`. Blank trailing lines are
/// ignored; anything else malformed reports its line number.
inline ComplexVector read_complex_csv(std::istream &in)
{
    ComplexVector out;
    std::string row;
    std::size_t line = 0;
    while (std::getline(in, row))
    {
        ++line;
        if (row.empty() || row == "\r")
            continue;
        const std::size_t comma = row.find(',');
        if (comma == std::string::npos)
            throw CsvParseError(line, "expected 're,im'");
        if (row.find(',', comma + 1) != std::string::npos)
            throw CsvParseError(line, "expected exactly two fields");
        out.emplace_back(detail::parse_field(row.substr(0, comma), line, "real"),
                         detail::parse_field(row.substr(comma + 1), line, "imaginary"));
    }
    return out;
}

inline void write_complex_csv(std::ostream &out, const ComplexVector &v)
{
    for (const auto &x : v)
        out << format_double(x.real()) << ',' << format_double(x.imag()) << '\n';
}

} // namespace beaches

#endif // BEACHES_CSVIO_HPP
