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
// Independent reference implementations used to cross-check the fast paths:
// a direct O(B^2) DFT-matrix product, dense grid searches for the SURE and
// exact-MSE thresholds, and an explicit-inverse L-MMSE solution. These stay
// deliberately naive; they share no code with the implementations they
// verify.

#ifndef BEACHES_ORACLES_HPP
#define BEACHES_ORACLES_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "beaches/denoiser.hpp"
#include "beaches/numerics.hpp"

namespace beaches::oracles {

/// Direct multiplication by the unitary DFT matrix (or its inverse).
inline ComplexVector dft_matrix_multiply(const ComplexVector &x, bool inverse = false)
{
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexVector out(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
    {
        for (std::size_t m = 0; m < n; ++m)
        {
            const double angle =
                sign * 2.0 * M_PI * static_cast<double>(k) * static_cast<double>(m) /
                static_cast<double>(n);
            out[k] += x[m] * std::polar(1.0, angle);
        }
        out[k] *= scale;
    }
    return out;
}

struct GridMinimum {
    double tau = 0.0;
    double value = 0.0;
};

/// Dense grid search of the SURE objective over tau in [0, span_factor*max].
/// Partial sums over the sorted magnitudes make each evaluation O(log B);
/// the evaluated quantity is still the plain direct-summation formula.
inline GridMinimum sure_grid_minimum(std::vector<double> magnitudes, double e0,
                                     std::size_t n_points = 10000, double span_factor = 1.01)
{
    if (magnitudes.empty())
        throw std::invalid_argument("sure_grid_minimum: empty magnitude vector");
    std::sort(magnitudes.begin(), magnitudes.end());
    const std::size_t b = magnitudes.size();
    const double max_mag = magnitudes.back();
    const double eps_z = detail::zero_cutoff(max_mag);

    // prefix_sq[i] = sum of m^2 over the first i magnitudes;
    // suffix_recip[i] = sum of 1/m over magnitudes i.. (zeros excluded).
    std::vector<double> prefix_sq(b + 1, 0.0), suffix_recip(b + 1, 0.0);
    for (std::size_t i = 0; i < b; ++i)
        prefix_sq[i + 1] = prefix_sq[i] + magnitudes[i] * magnitudes[i];
    std::size_t zeros = 0;
    while (zeros < b && magnitudes[zeros] < eps_z)
        ++zeros;
    for (std::size_t i = b; i-- > zeros;)
        suffix_recip[i] = suffix_recip[i + 1] + 1.0 / magnitudes[i];

    const double span = span_factor * max_mag;
    GridMinimum best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t p = 0; p < n_points; ++p)
    {
        const double tau =
            n_points > 1 ? span * static_cast<double>(p) / static_cast<double>(n_points - 1) : 0.0;
        // first index with magnitude > tau; ties (m == tau) fall below here,
        // matching sure_value only off the magnitudes (grid points hit exact
        // magnitudes with probability zero for random instances)
        const std::size_t k =
            std::upper_bound(magnitudes.begin(), magnitudes.end(), tau) - magnitudes.begin();
        const std::size_t k_eff = std::max(k, zeros);
        const double above = static_cast<double>(b - k_eff);
        const double below = static_cast<double>(k_eff);
        const double val = (prefix_sq[k_eff] + above * tau * tau) / static_cast<double>(b) + e0 -
                           e0 * tau * suffix_recip[k_eff] / static_cast<double>(b) -
                           2.0 * e0 * below / static_cast<double>(b);
        if (val < best.value)
            best = {tau, val};
    }
    return best;
}

/// Realized (not expected) squared-error objective || eta(y,tau) - h ||^2 / B.
inline double mse_at_tau(const ComplexVector &y_hat, const ComplexVector &h_hat, double tau)
{
    if (y_hat.size() != h_hat.size())
        throw std::invalid_argument("mse_at_tau: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < y_hat.size(); ++i)
    {
        const double mag = std::abs(y_hat[i]);
        Complex denoised{0.0, 0.0};
        if (mag > tau)
            denoised = y_hat[i] * ((mag - tau) / mag);
        acc += std::norm(denoised - h_hat[i]);
    }
    return acc / static_cast<double>(y_hat.size());
}

/// Dense grid search of the exact-MSE objective.
inline GridMinimum mse_grid_minimum(const ComplexVector &y_hat, const ComplexVector &h_hat,
                                    std::size_t n_points = 10000, double span_factor = 1.01)
{
    double max_mag = 0.0;
    for (const auto &v : y_hat)
        max_mag = std::max(max_mag, std::abs(v));
    const double span = span_factor * max_mag;
    GridMinimum best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t p = 0; p < n_points; ++p)
    {
        const double tau =
            n_points > 1 ? span * static_cast<double>(p) / static_cast<double>(n_points - 1) : 0.0;
        const double val = mse_at_tau(y_hat, h_hat, tau);
        if (val < best.value)
            best = {tau, val};
    }
    return best;
}

/// Explicit-formula L-MMSE: forms (H^H H + (n0/es) I)^{-1} H^H r with a
/// dense Gauss-Jordan inverse. Quadratic/cubic in U; test use only.
inline ComplexVector lmmse_explicit(const std::vector<ComplexVector> &h_columns,
                                    const ComplexVector &r, double n0, double es)
{
    const std::size_t users = h_columns.size();
    if (users == 0)
        throw std::invalid_argument("lmmse_explicit: empty channel");
    const std::size_t antennas = h_columns[0].size();
    if (r.size() != antennas)
        throw std::invalid_argument("lmmse_explicit: dimension mismatch");

    // Regularized Gram matrix A = H^H H + (n0/es) I.
    std::vector<std::vector<Complex>> a(users, std::vector<Complex>(users, Complex{0.0, 0.0}));
    for (std::size_t i = 0; i < users; ++i)
        for (std::size_t j = 0; j < users; ++j)
        {
            Complex acc{0.0, 0.0};
            for (std::size_t b = 0; b < antennas; ++b)
                acc += std::conj(h_columns[i][b]) * h_columns[j][b];
            a[i][j] = acc + (i == j ? Complex{n0 / es, 0.0} : Complex{0.0, 0.0});
        }

    // Gauss-Jordan inverse with partial pivoting.
    std::vector<std::vector<Complex>> inv(users, std::vector<Complex>(users, Complex{0.0, 0.0}));
    for (std::size_t i = 0; i < users; ++i)
        inv[i][i] = 1.0;
    for (std::size_t col = 0; col < users; ++col)
    {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < users; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col]))
                pivot = row;
        if (std::abs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("lmmse_explicit: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const Complex d = a[col][col];
        for (std::size_t j = 0; j < users; ++j)
        {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t row = 0; row < users; ++row)
        {
            if (row == col)
                continue;
            const Complex f = a[row][col];
            if (f == Complex{0.0, 0.0})
                continue;
            for (std::size_t j = 0; j < users; ++j)
            {
                a[row][j] -= f * a[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }

    // s = A^{-1} H^H r.
    ComplexVector hh_r(users, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < users; ++i)
        for (std::size_t b = 0; b < antennas; ++b)
            hh_r[i] += std::conj(h_columns[i][b]) * r[b];
    ComplexVector s(users, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < users; ++i)
        for (std::size_t j = 0; j < users; ++j)
            s[i] += inv[i][j] * hh_r[j];
    return s;
}

} // namespace beaches::oracles

#endif // BEACHES_ORACLES_HPP
