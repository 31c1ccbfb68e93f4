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
// Adaptive soft-threshold denoising in the beamspace domain. The threshold
// is chosen by minimizing Stein's unbiased risk estimate (SURE) over the
// sorted beamspace magnitudes with a single O(B) scan: within each interval
// between consecutive sorted magnitudes SURE is a quadratic in tau, so the
// global minimizer is found by clamping each interval's quadratic minimum
// and comparing the local minima. A hardware-oriented variant uses the
// sorted magnitudes themselves as threshold candidates instead of the
// clamped quadratic minimizer.

#ifndef BEACHES_DENOISER_HPP
#define BEACHES_DENOISER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "beaches/numerics.hpp"

namespace beaches {

enum class ScanVariant { Exact, Hw };

struct ScanResult {
    double tau_star = 0.0;
    double sure_min = 0.0;
};

struct HwScanResult {
    double tau_star = 0.0;
    // Objective scaled by B with the constant E0 term dropped, i.e.
    // B*SURE - B*E0; argmin-equivalent to SURE.
    double scaled_sure_min = 0.0;
};

struct DenoiseResult {
    ComplexVector h_star;     // denoised antenna-domain vector
    ComplexVector h_hat_star; // denoised beamspace vector
    double tau_star = 0.0;
    double sure_min = 0.0;
};

namespace detail {

inline void require_nonneg(double x, const char *who, const char *what)
{
    if (!(x >= 0.0))
        throw std::invalid_argument(std::string(who) + ": " + what + " must be nonnegative");
}

inline void require_sorted_magnitudes(const std::vector<double> &m, const char *who)
{
    if (m.empty())
        throw std::invalid_argument(std::string(who) + ": empty magnitude vector");
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (!(m[i] >= 0.0) || !std::isfinite(m[i]))
            throw std::invalid_argument(std::string(who) +
                                        ": magnitudes must be finite and nonnegative");
        if (i > 0 && m[i] < m[i - 1])
            throw std::invalid_argument(std::string(who) + ": magnitudes must be sorted ascending");
    }
}

// Magnitudes below this cutoff are excluded from the reciprocal sum V and
// treated as always below the threshold; the 1/|y| term in SURE diverges at
// zero while such entries never influence the shrinkage decision.
inline double zero_cutoff(double max_mag)
{
    return max_mag > 0.0 ? 1e-12 * max_mag : 1e-300;
}

} // namespace detail

/// Entrywise complex soft-thresholding: magnitudes shrink by tau (clipping
/// at zero), phases are preserved; 0/|0| is taken as 0.
inline ComplexVector soft_threshold(const ComplexVector &y_hat, double tau)
{
    detail::require_nonneg(tau, "soft_threshold", "tau");
    ComplexVector out(y_hat.size());
    for (std::size_t i = 0; i < y_hat.size(); ++i)
    {
        const double mag = std::abs(y_hat[i]);
        out[i] = (mag > tau) ? y_hat[i] * ((mag - tau) / mag) : Complex{0.0, 0.0};
    }
    return out;
}

/**
 * SURE for complex soft-thresholding at threshold tau, evaluated by direct
 * summation over the magnitudes:
 *
 *   (1/B) sum_{|y|<tau} |y|^2 + (1/B) sum_{|y|>tau} tau^2 + E0
 *   - (E0/B) tau sum_{|y|>tau} 1/|y| - (2 E0/B) #{ |y| < tau }.
 *
 * SURE is undefined when tau equals one of the magnitudes; entries exactly
 * equal to tau contribute to neither sum here, so callers should evaluate
 * away from the magnitudes (the scan handles boundaries by one-sided
 * limits instead).
 */
inline double sure_value(const std::vector<double> &magnitudes, double tau, double e0)
{
    detail::require_nonneg(tau, "sure_value", "tau");
    detail::require_nonneg(e0, "sure_value", "e0");
    if (magnitudes.empty())
        throw std::invalid_argument("sure_value: empty magnitude vector");

    double max_mag = 0.0;
    for (double m : magnitudes)
    {
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("sure_value: magnitudes must be finite and nonnegative");
        max_mag = std::max(max_mag, m);
    }
    const double eps_z = detail::zero_cutoff(max_mag);

    const double b = static_cast<double>(magnitudes.size());
    double below_sq = 0.0;
    double recip = 0.0;
    double below_n = 0.0;
    double above_n = 0.0;
    for (double m : magnitudes)
    {
        if (m < eps_z)
        {
            below_n += 1.0; // always below threshold, excluded from V
        }
        else if (m < tau)
        {
            below_sq += m * m;
            below_n += 1.0;
        }
        else if (m > tau)
        {
            recip += 1.0 / m;
            above_n += 1.0;
        }
    }
    return (below_sq + above_n * tau * tau) / b + e0 - (e0 * tau * recip) / b -
           2.0 * e0 * below_n / b;
}

/**
 * O(B) scan for the SURE-optimal threshold over magnitudes sorted ascending.
 *
 * Intervals between consecutive sorted magnitudes are visited in order while
 * maintaining S (sum of squared magnitudes below the interval) and V (sum of
 * reciprocals at or above it). In interval k the quadratic's minimizer
 * tau_q = E0*V / (2*#above) is clamped to the interval and the quadratic is
 * evaluated there; endpoint values are the continuous extension of the
 * interval quadratic (the one-sided limits of SURE, which is undefined at the
 * magnitudes themselves). Ties keep the smallest tau.
 */
inline ScanResult scan_optimal_tau(const std::vector<double> &sorted, double e0)
{
    detail::require_sorted_magnitudes(sorted, "scan_optimal_tau");
    detail::require_nonneg(e0, "scan_optimal_tau", "e0");

    const std::size_t b_total = sorted.size();
    const double inv_b = 1.0 / static_cast<double>(b_total);
    const double eps_z = detail::zero_cutoff(sorted.back());

    // sorted[zeros..] are the magnitudes that participate in V.
    std::size_t zeros = 0;
    while (zeros < b_total && sorted[zeros] < eps_z)
        ++zeros;
    const std::size_t m_count = b_total - zeros;

    // Suffix reciprocal sums: v_suffix[k] = sum_{i >= k} 1/m_i over the
    // nonzero block (accumulated backward; monotone, no cancellation).
    std::vector<double> v_suffix(m_count + 1, 0.0);
    for (std::size_t i = m_count; i-- > 0;)
        v_suffix[i] = v_suffix[i + 1] + 1.0 / sorted[zeros + i];

    double best_tau = 0.0;
    double best_sure = std::numeric_limits<double>::infinity();
    double s = 0.0;    // sum of squared magnitudes below the current interval
    double prev = 0.0; // left interval edge (0 for the first interval)

    const auto consider = [&](double tau, double v, double above, double below) {
        const double val =
            inv_b * (s + above * tau * tau) + e0 - inv_b * e0 * tau * v - 2.0 * e0 * inv_b * below;
        if (val < best_sure)
        {
            best_sure = val;
            best_tau = tau;
        }
    };

    for (std::size_t k = 1; k <= m_count; ++k)
    {
        const double cur = sorted[zeros + k - 1];
        const double v = v_suffix[k - 1];
        const double above = static_cast<double>(m_count - k + 1);
        const double below = static_cast<double>(zeros + k - 1);
        const double tau_q = e0 * v / (2.0 * above);
        const double tau_k = std::max(prev, std::min(cur, tau_q));
        consider(tau_k, v, above, below);
        s += cur * cur;
        prev = cur;
    }

    // Final interval (largest magnitude, infinity): V = 0 so the quadratic
    // minimizer 0 clamps to the left edge; no +infinity sentinel needed.
    consider(prev, 0.0, 0.0, static_cast<double>(b_total));

    return {best_tau, best_sure};
}

/**
 * Hardware-variant scan: iterates all B sorted magnitudes and uses the k-th
 * magnitude itself as the threshold candidate, evaluating the objective
 * scaled by B with the constant E0 dropped (argmin-equivalent). Reciprocals
 * of near-zero magnitudes are excluded from V as in the exact scan.
 */
inline HwScanResult scan_optimal_tau_hw(const std::vector<double> &sorted, double e0)
{
    detail::require_sorted_magnitudes(sorted, "scan_optimal_tau_hw");
    detail::require_nonneg(e0, "scan_optimal_tau_hw", "e0");

    const std::size_t b_total = sorted.size();
    const double eps_z = detail::zero_cutoff(sorted.back());

    std::vector<double> v_suffix(b_total + 1, 0.0);
    for (std::size_t i = b_total; i-- > 0;)
        v_suffix[i] = v_suffix[i + 1] + (sorted[i] >= eps_z ? 1.0 / sorted[i] : 0.0);

    double best_tau = 0.0;
    double best_obj = std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t k = 1; k <= b_total; ++k)
    {
        const double tau = sorted[k - 1];
        const double above = static_cast<double>(b_total - k + 1);
        const double below = static_cast<double>(k - 1);
        const double obj = s + above * tau * tau - e0 * tau * v_suffix[k - 1] - 2.0 * e0 * below;
        if (obj < best_obj)
        {
            best_obj = obj;
            best_tau = tau;
        }
        s += tau * tau;
    }
    return {best_tau, best_obj};
}

/**
 * Threshold minimizing the exact MSE || eta(y_hat, tau) - h_hat ||^2 / B
 * against a known beamspace truth. The per-entry squared error is piecewise
 * quadratic in tau with breakpoints at the sorted magnitudes, so the minimum
 * is found with the same clamp-and-compare interval walk as the SURE scan.
 * Unrealizable in practice (needs the truth); serves as the lower-bound
 * baseline for soft-threshold denoisers.
 */
inline double oracle_mse_tau(const ComplexVector &y_hat, const ComplexVector &h_hat_true)
{
    if (y_hat.size() != h_hat_true.size())
        throw std::invalid_argument("oracle_mse_tau: length mismatch");
    if (y_hat.empty())
        throw std::invalid_argument("oracle_mse_tau: empty input");

    const std::size_t b_total = y_hat.size();
    double max_mag = 0.0;
    for (const auto &y : y_hat)
        max_mag = std::max(max_mag, std::abs(y));
    const double eps_z = detail::zero_cutoff(max_mag);

    // For |y| above tau the entry error is tau^2 - 2 tau Re(d conj(u)) + |d|^2
    // with d = y - h and u = y/|y|; once tau passes |y| it freezes at |h|^2.
    struct Entry {
        double mag;
        double lin; // -2 Re(d conj(u))
        double d2;
        double h2;
    };
    std::vector<Entry> entries;
    entries.reserve(b_total);
    double frozen = 0.0; // entries with |y| ~ 0 contribute |h|^2 for every tau
    for (std::size_t i = 0; i < b_total; ++i)
    {
        const double mag = std::abs(y_hat[i]);
        const double h2 = std::norm(h_hat_true[i]);
        if (mag < eps_z)
        {
            frozen += h2;
            continue;
        }
        const Complex d = y_hat[i] - h_hat_true[i];
        const Complex u = y_hat[i] / mag;
        entries.push_back({mag, -2.0 * (d.real() * u.real() + d.imag() * u.imag()),
                           std::norm(d), h2});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry &a, const Entry &b) { return a.mag < b.mag; });
    const std::size_t m_count = entries.size();

    // Suffix sums over the active (above-threshold) set.
    std::vector<double> lin_suffix(m_count + 1, 0.0), d2_suffix(m_count + 1, 0.0);
    for (std::size_t i = m_count; i-- > 0;)
    {
        lin_suffix[i] = lin_suffix[i + 1] + entries[i].lin;
        d2_suffix[i] = d2_suffix[i + 1] + entries[i].d2;
    }

    double best_tau = 0.0;
    double best_val = std::numeric_limits<double>::infinity();
    double h2_below = 0.0;
    double prev = 0.0;
    for (std::size_t k = 1; k <= m_count + 1; ++k)
    {
        const double above = static_cast<double>(m_count - k + 1);
        const double a1 = lin_suffix[k - 1];
        const double a0 = d2_suffix[k - 1] + h2_below + frozen;
        double tau_k;
        if (k <= m_count)
        {
            const double cur = entries[k - 1].mag;
            const double tau_q = above > 0.0 ? -a1 / (2.0 * above) : prev;
            tau_k = std::max(prev, std::min(cur, tau_q));
        }
        else
        {
            tau_k = prev; // last interval: constant objective, least shrinkage
        }
        const double val = above * tau_k * tau_k + a1 * tau_k + a0;
        if (val < best_val)
        {
            best_val = val;
            best_tau = tau_k;
        }
        if (k <= m_count)
        {
            h2_below += entries[k - 1].h2;
            prev = entries[k - 1].mag;
        }
    }
    return best_tau;
}

/**
 * End-to-end adaptive denoise of an antenna-domain observation:
 * transform to beamspace, pick the threshold with the selected scan over the
 * sorted magnitudes, soft-threshold, transform back.
 */
inline DenoiseResult denoise(const ComplexVector &y, double e0,
                             ScanVariant variant = ScanVariant::Exact)
{
    detail::require_nonneg(e0, "denoise", "e0");
    DenoiseResult result;
    ComplexVector y_hat = fft_unitary(y);

    std::vector<double> mags(y_hat.size());
    for (std::size_t i = 0; i < y_hat.size(); ++i)
        mags[i] = std::abs(y_hat[i]);
    std::sort(mags.begin(), mags.end());

    if (variant == ScanVariant::Exact)
    {
        const ScanResult scan = scan_optimal_tau(mags, e0);
        result.tau_star = scan.tau_star;
        result.sure_min = scan.sure_min;
    }
    else
    {
        const HwScanResult scan = scan_optimal_tau_hw(mags, e0);
        result.tau_star = scan.tau_star;
        result.sure_min = scan.scaled_sure_min / static_cast<double>(y.size()) + e0;
    }

    result.h_hat_star = soft_threshold(y_hat, result.tau_star);
    result.h_star = ifft_unitary(result.h_hat_star);
    return result;
}

} // namespace beaches

#endif // BEACHES_DENOISER_HPP
