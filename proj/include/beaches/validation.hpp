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
// Seeded property suites behind the `validate` subcommand, plus the shared
// statistical experiments (risk-estimate unbiasedness and large-B
// convergence, scan-versus-grid optimality, hardware-variant gap) that the
// acceptance suite runs at full size.

#ifndef BEACHES_VALIDATION_HPP
#define BEACHES_VALIDATION_HPP

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "beaches/channel.hpp"
#include "beaches/denoiser.hpp"
#include "beaches/fixedpoint.hpp"
#include "beaches/linksim.hpp"
#include "beaches/numerics.hpp"
#include "beaches/oracles.hpp"

namespace beaches::validation {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

inline bool all_passed(const std::vector<PropertyResult> &results)
{
    for (const auto &r : results)
        if (!r.pass)
            return false;
    return true;
}

inline void print_report(std::ostream &out, const std::string &suite,
                         const std::vector<PropertyResult> &results)
{
    std::size_t passed = 0;
    for (const auto &r : results)
    {
        out << (r.pass ? "[ ok ] " : "[FAIL] ") << suite << ": " << r.name;
        if (!r.detail.empty())
            out << " (" << r.detail << ")";
        out << '\n';
        passed += r.pass ? 1 : 0;
    }
    out << suite << ": " << passed << "/" << results.size() << " properties passed\n";
}

// ---------------------------------------------------------------------------
// shared experiment helpers
// ---------------------------------------------------------------------------

/// Fixed exactly-sparse beamspace truth used by the statistical checks:
/// three on-grid paths with descending gains, ||h||^2 = B.
inline ComplexVector sparse_beamspace_truth(std::size_t b)
{
    ChannelScenario scenario;
    scenario.antennas = b;
    const double two_pi = 2.0 * M_PI;
    scenario.paths = {
        {Complex{1.0, 0.0}, two_pi * static_cast<double>(b / 8) / static_cast<double>(b)},
        {std::polar(0.5, 1.0), two_pi * static_cast<double>(b / 3) / static_cast<double>(b)},
        {std::polar(0.25, 2.0), two_pi * static_cast<double>((2 * b) / 3) / static_cast<double>(b)}};
    ComplexVector h = synthesize_channel(scenario);
    double energy = 0.0;
    for (const auto &v : h)
        energy += std::norm(v);
    const double scale = std::sqrt(static_cast<double>(b) / energy);
    for (auto &v : h)
        v *= scale;
    return fft_unitary(h);
}

struct UnbiasednessStats {
    double mean_sure = 0.0;
    double mean_mse = 0.0;
    double se_combined = 0.0;
    double tau = 0.0;
};

/// Draws `draws` noisy observations of a fixed sparse beamspace truth and
/// compares the sample means of the risk estimate and the realized squared
/// error at a fixed threshold.
inline UnbiasednessStats sure_unbiasedness_experiment(std::size_t b, double e0, std::size_t draws,
                                                      std::uint64_t seed)
{
    const ComplexVector h_hat = sparse_beamspace_truth(b);
    double max_mag = 0.0;
    for (const auto &v : h_hat)
        max_mag = std::max(max_mag, std::abs(v));
    const double tau = 0.5 * max_mag;

    double sum_s = 0.0, sum_s2 = 0.0, sum_m = 0.0, sum_m2 = 0.0;
    std::vector<double> mags(b);
    RngStream rng(seed, 0);
    for (std::size_t d = 0; d < draws; ++d)
    {
        ComplexVector y_hat = h_hat;
        double mse = 0.0;
        for (std::size_t i = 0; i < b; ++i)
        {
            y_hat[i] += rng.cscg(e0);
            mags[i] = std::abs(y_hat[i]);
            const double shrunk = std::max(mags[i] - tau, 0.0);
            Complex denoised{0.0, 0.0};
            if (shrunk > 0.0)
                denoised = y_hat[i] * (shrunk / mags[i]);
            mse += std::norm(denoised - h_hat[i]);
        }
        mse /= static_cast<double>(b);
        const double sure = sure_value(mags, tau, e0);
        sum_s += sure;
        sum_s2 += sure * sure;
        sum_m += mse;
        sum_m2 += mse * mse;
    }
    const double n = static_cast<double>(draws);
    UnbiasednessStats stats;
    stats.tau = tau;
    stats.mean_sure = sum_s / n;
    stats.mean_mse = sum_m / n;
    const double var_s = std::max(sum_s2 / n - stats.mean_sure * stats.mean_sure, 0.0);
    const double var_m = std::max(sum_m2 / n - stats.mean_mse * stats.mean_mse, 0.0);
    stats.se_combined = std::sqrt(var_s / n + var_m / n);
    return stats;
}

struct ConvergenceStats {
    double median_small = 0.0;
    double median_large = 0.0;
    double ratio = 0.0;
};

/// |SURE - realized MSE| medians under a fixed per-entry channel
/// distribution (sparse mixture) at two array sizes; the deviation should
/// shrink roughly like 1/sqrt(B).
inline ConvergenceStats sure_convergence_experiment(std::size_t b_small, std::size_t b_large,
                                                    std::size_t trials, double tau, double e0,
                                                    std::uint64_t seed)
{
    const auto median_dev = [&](std::size_t b, std::uint64_t salt) {
        std::vector<double> devs(trials);
        std::vector<double> mags(b);
        for (std::size_t t = 0; t < trials; ++t)
        {
            RngStream rng(seed, (salt << 32) + t);
            double mse = 0.0;
            for (std::size_t i = 0; i < b; ++i)
            {
                // per-entry channel distribution: nonzero w.p. 5%, CN(0,20)
                const Complex h = (rng.uniform() < 0.05) ? rng.cscg(20.0) : Complex{0.0, 0.0};
                const Complex y = h + rng.cscg(e0);
                mags[i] = std::abs(y);
                const double shrunk = std::max(mags[i] - tau, 0.0);
                Complex denoised{0.0, 0.0};
                if (shrunk > 0.0)
                    denoised = y * (shrunk / mags[i]);
                mse += std::norm(denoised - h);
            }
            mse /= static_cast<double>(b);
            devs[t] = std::abs(sure_value(mags, tau, e0) - mse);
        }
        std::nth_element(devs.begin(), devs.begin() + trials / 2, devs.end());
        return devs[trials / 2];
    };
    ConvergenceStats stats;
    stats.median_small = median_dev(b_small, 1);
    stats.median_large = median_dev(b_large, 2);
    stats.ratio = stats.median_small / stats.median_large;
    return stats;
}

/// Random magnitude instances spanning dense, sparse, tied and zero cases;
/// used for scan-versus-grid optimality (an algebraic property that must
/// hold for arbitrary inputs).
inline std::vector<double> mixed_magnitudes(RngStream &rng, std::size_t b)
{
    std::vector<double> mags(b);
    const double pick = rng.uniform();
    if (pick < 0.4)
    {
        for (auto &m : mags)
            m = std::abs(rng.cscg(1.0));
    }
    else if (pick < 0.7)
    {
        for (auto &m : mags)
            m = std::abs(rng.cscg(0.05));
        const std::size_t strong = 1 + static_cast<std::size_t>(rng.next_u64() % 4);
        for (std::size_t i = 0; i < strong && i < b; ++i)
            mags[rng.next_u64() % b] = 1.0 + 5.0 * rng.uniform();
    }
    else
    {
        for (auto &m : mags)
            m = 3.0 * rng.uniform();
    }
    if (rng.uniform() < 0.25 && b >= 4)
    {
        mags[rng.next_u64() % b] = 0.0;
        mags[1] = mags[0];
    }
    std::sort(mags.begin(), mags.end());
    return mags;
}

/// Noisy sparse beamspace observation whose noise level matches the e0
/// handed to the scan; the instance class a deployed denoiser sees.
inline std::vector<double> observation_magnitudes(RngStream &rng, std::size_t b, double e0)
{
    ComplexVector h_hat(b, Complex{0.0, 0.0});
    const std::size_t n_paths = 1 + rng.next_u64() % 12;
    for (std::size_t p = 0; p < n_paths; ++p)
        h_hat[rng.next_u64() % b] = rng.cscg(static_cast<double>(b) / static_cast<double>(n_paths));
    std::vector<double> mags(b);
    for (std::size_t i = 0; i < b; ++i)
        mags[i] = std::abs(h_hat[i] + rng.cscg(e0));
    std::sort(mags.begin(), mags.end());
    return mags;
}

struct ScanGridStats {
    int instances = 0;
    int failures = 0;
    double worst_excess = 0.0; // max of (scan_min - grid_min) / (|grid_min| + e0)
};

/// Scan optimality against the dense-grid oracle over random instances with
/// B in {8,...,512} and E0 log-uniform in [1e-3, 10].
inline ScanGridStats scan_grid_experiment(int instances, std::size_t grid_points,
                                          std::uint64_t seed)
{
    ScanGridStats stats;
    stats.instances = instances;
    RngStream rng(seed, 0);
    for (int inst = 0; inst < instances; ++inst)
    {
        const std::size_t b = std::size_t{8} << (rng.next_u64() % 7);
        const std::vector<double> mags = mixed_magnitudes(rng, b);
        const double e0 = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
        const ScanResult scan = scan_optimal_tau(mags, e0);
        const auto grid = oracles::sure_grid_minimum(mags, e0, grid_points, 1.01);
        const double excess = (scan.sure_min - grid.value) / (std::abs(grid.value) + e0);
        stats.worst_excess = std::max(stats.worst_excess, excess);
        if (excess > 1e-9)
            ++stats.failures;
    }
    return stats;
}

struct HwGapStats {
    int instances = 0;
    int within_one_percent = 0;
    int negative_gap = 0; // hw below exact would be a bug
    double worst_rel_gap = 0.0;
};

/// Gap between the hardware-variant threshold and the exact scan on
/// observation-consistent instances.
inline HwGapStats hw_gap_experiment(std::size_t b, int instances, std::uint64_t seed)
{
    HwGapStats stats;
    stats.instances = instances;
    RngStream rng(seed, 0);
    for (int inst = 0; inst < instances; ++inst)
    {
        const double e0 = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
        const std::vector<double> mags = observation_magnitudes(rng, b, e0);
        const ScanResult exact = scan_optimal_tau(mags, e0);
        const HwScanResult hw = scan_optimal_tau_hw(mags, e0);
        const double sure_hw = hw.scaled_sure_min / static_cast<double>(b) + e0;
        const double gap = sure_hw - exact.sure_min;
        if (gap < -1e-12 * (std::abs(exact.sure_min) + e0))
            ++stats.negative_gap;
        const double rel = gap / (exact.sure_min + e0);
        stats.worst_rel_gap = std::max(stats.worst_rel_gap, rel);
        if (rel <= 0.01)
            ++stats.within_one_percent;
    }
    return stats;
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double x)
{
    std::ostringstream out;
    out.precision(4);
    out << x;
    return out.str();
}

inline double rel_l2_error(const ComplexVector &a, const ComplexVector &b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace detail

inline std::vector<PropertyResult> run_fft_suite(std::uint64_t seed)
{
    std::vector<PropertyResult> results;
    RngStream rng(seed, 0);

    {
        double worst = 0.0;
        for (std::size_t b : {2u, 8u, 64u, 512u})
        {
            for (int rep = 0; rep < 10; ++rep)
            {
                const ComplexVector x = draw_cscg(b, 1.0, rng);
                double nx = 0.0, ny = 0.0;
                const ComplexVector y = fft_unitary(x);
                for (std::size_t i = 0; i < b; ++i)
                {
                    nx += std::norm(x[i]);
                    ny += std::norm(y[i]);
                }
                worst = std::max(worst, std::abs(std::sqrt(ny) - std::sqrt(nx)) / std::sqrt(nx));
            }
        }
        results.push_back({"unitarity (norm preserved)", worst < 1e-12,
                           "worst rel " + detail::fmt(worst)});
    }
    {
        double worst = 0.0;
        for (std::size_t b : {4u, 32u, 128u, 1024u})
        {
            const ComplexVector x = draw_cscg(b, 1.0, rng);
            worst = std::max(worst, detail::rel_l2_error(ifft_unitary(fft_unitary(x)), x));
        }
        results.push_back({"perfect reconstruction", worst < 1e-12, "worst rel " + detail::fmt(worst)});
    }
    {
        double worst = 0.0;
        for (std::size_t b : {8u, 64u, 256u})
        {
            const ComplexVector x = draw_cscg(b, 1.0, rng);
            worst = std::max(worst,
                             detail::rel_l2_error(fft_unitary(x), oracles::dft_matrix_multiply(x)));
        }
        results.push_back({"matrix-oracle equivalence (B <= 256)", worst < 1e-10,
                           "worst rel " + detail::fmt(worst)});
    }
    {
        const ComplexVector dc = fft_unitary({{1.0, 0.0}, {1.0, 0.0}});
        const ComplexVector flat = fft_unitary({{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
        bool ok = std::abs(dc[0] - Complex{std::sqrt(2.0), 0.0}) < 1e-15 && std::abs(dc[1]) < 1e-15;
        for (const auto &v : flat)
            ok = ok && std::abs(v - Complex{0.5, 0.0}) < 1e-15;
        results.push_back({"closed forms (DC bin, impulse)", ok, ""});
    }
    {
        bool threw = false;
        try
        {
            fft_unitary(ComplexVector(12));
        }
        catch (const std::invalid_argument &)
        {
            threw = true;
        }
        results.push_back({"non-power-of-two rejected", threw, ""});
    }
    return results;
}

inline std::vector<PropertyResult> run_sure_suite(std::uint64_t seed)
{
    std::vector<PropertyResult> results;

    {
        const double val = sure_value({1.0, 3.0}, 2.0, 1.0);
        results.push_back({"hand-worked objective value", std::abs(val - 13.0 / 6.0) < 1e-14,
                           "got " + detail::fmt(val) + " want 13/6"});
    }
    {
        RngStream rng(seed, 1);
        double worst = 0.0;
        for (int inst = 0; inst < 50; ++inst)
        {
            const std::size_t b = 64;
            std::vector<double> mags(b);
            for (auto &m : mags)
                m = 0.01 + std::abs(rng.cscg(1.0));
            std::sort(mags.begin(), mags.end());
            const double e0 = std::pow(10.0, -2.0 + 3.0 * rng.uniform());
            const std::size_t k = 1 + rng.next_u64() % (b + 1);
            const double lo = (k == 1) ? 0.0 : mags[k - 2];
            const double hi = (k == b + 1) ? mags.back() * 2.0 : mags[k - 1];
            if (hi - lo < 1e-9)
                continue;
            const double tau = lo + 0.5 * (hi - lo);
            double s = 0.0, v = 0.0;
            for (std::size_t i = 0; i + 1 < k; ++i)
                s += mags[i] * mags[i];
            for (std::size_t i = k - 1; i < b; ++i)
                v += 1.0 / mags[i];
            const double interval = s / b + static_cast<double>(b - k + 1) / b * tau * tau + e0 -
                                    e0 / b * tau * v - 2.0 * e0 / b * static_cast<double>(k - 1);
            const double direct = sure_value(mags, tau, e0);
            worst = std::max(worst, std::abs(interval - direct) / std::max(std::abs(direct), 1e-30));
        }
        results.push_back({"interval form equals direct summation", worst < 1e-10,
                           "worst rel " + detail::fmt(worst)});
    }
    {
        const UnbiasednessStats stats = sure_unbiasedness_experiment(64, 0.1, 30000, seed + 2);
        const double diff = std::abs(stats.mean_sure - stats.mean_mse);
        results.push_back({"unbiasedness: mean risk estimate tracks mean error",
                           diff < 3.0 * stats.se_combined,
                           "|diff| " + detail::fmt(diff) + " vs 3se " +
                               detail::fmt(3.0 * stats.se_combined)});
    }
    {
        const ConvergenceStats stats = sure_convergence_experiment(64, 1024, 500, 1.0, 0.1, seed + 3);
        const bool ok = stats.median_large < stats.median_small && stats.ratio >= 2.0 &&
                        stats.ratio <= 8.0;
        results.push_back({"convergence: deviation shrinks like 1/sqrt(B)", ok,
                           "medians " + detail::fmt(stats.median_small) + " -> " +
                               detail::fmt(stats.median_large) + ", ratio " +
                               detail::fmt(stats.ratio)});
    }
    return results;
}

inline std::vector<PropertyResult> run_scan_suite(std::uint64_t seed)
{
    std::vector<PropertyResult> results;

    {
        const ScanGridStats stats = scan_grid_experiment(1000, 10000, seed);
        results.push_back({"scan optimality vs dense grid (1000 instances)", stats.failures == 0,
                           std::to_string(stats.instances - stats.failures) + "/" +
                               std::to_string(stats.instances) + ", worst excess " +
                               detail::fmt(stats.worst_excess)});
    }
    {
        const ScanResult zero = scan_optimal_tau(std::vector<double>(16, 0.0), 1.0);
        const ScanResult clean = scan_optimal_tau({0.5, 1.0, 2.0}, 0.0);
        const bool ok = zero.tau_star == 0.0 && std::abs(zero.sure_min + 1.0) < 1e-14 &&
                        clean.tau_star == 0.0 && clean.sure_min == 0.0;
        results.push_back({"degenerate cases (all-zero input, E0 = 0)", ok, ""});
    }
    {
        RngStream rng(seed, 4);
        bool monotone = true;
        for (int inst = 0; inst < 30 && monotone; ++inst)
        {
            const std::vector<double> mags = mixed_magnitudes(rng, 128);
            double prev = -1.0;
            for (double e0 : {0.0, 0.01, 0.1, 1.0, 10.0})
            {
                const double tau = scan_optimal_tau(mags, e0).tau_star;
                if (tau < prev)
                    monotone = false;
                prev = tau;
            }
        }
        results.push_back({"threshold nondecreasing in E0", monotone, ""});
    }
    {
        const HwGapStats stats = hw_gap_experiment(256, 1000, seed + 5);
        const bool ok = stats.negative_gap == 0 &&
                        stats.within_one_percent >= stats.instances * 99 / 100;
        results.push_back({"hw-variant gap <= 1% on >= 99% of observations", ok,
                           std::to_string(stats.within_one_percent) + "/" +
                               std::to_string(stats.instances) + ", worst rel gap " +
                               detail::fmt(stats.worst_rel_gap)});
    }
    {
        const HwScanResult hw = scan_optimal_tau_hw({0.1, 0.1, 0.1, 10.0}, 0.04);
        results.push_back({"hw variant picks a sorted-magnitude candidate",
                           hw.tau_star == 0.1 || hw.tau_star == 10.0,
                           "tau " + detail::fmt(hw.tau_star)});
    }
    return results;
}

inline std::vector<PropertyResult> run_fixedpoint_suite(std::uint64_t seed)
{
    namespace fp = beaches::fixedpoint;
    std::vector<PropertyResult> results;

    {
        fp::SaturationTally tally;
        const bool ok = fp::quantize(0.0, fp::kAntennaFmt) == 0.0 &&
                        fp::quantize(1.5, fp::QFormat{4, 1, true}) == 1.5 &&
                        fp::quantize(100.0, fp::kBeamspaceFmt, &tally) == 2.0 - 1.0 / 256.0 &&
                        tally.events == 1;
        results.push_back({"quantizer anchors and saturation", ok, ""});
    }
    {
        bool ok = fp::reciprocal_lut(256) == 4 && fp::reciprocal_lut(0) == 2047 &&
                  fp::reciprocal_lut(128) == 8;
        std::int64_t prev = fp::reciprocal_lut(0);
        for (std::int64_t raw = 1; raw < 1024 && ok; ++raw)
        {
            const std::int64_t cur = fp::reciprocal_lut(raw);
            ok = cur <= prev;
            prev = cur;
        }
        results.push_back({"reciprocal LUT anchors and monotonicity", ok, ""});
    }
    {
        ComplexVector impulse(64, Complex{0.0, 0.0});
        impulse[0] = Complex{1.0, 0.0};
        const fp::FixedVector out =
            fp::fft_scaled_fixed(fp::quantize_vector(impulse, fp::kAntennaFmt));
        bool ok = true;
        for (const auto &e : out.entries)
            ok = ok && e.re == 4 && e.im == 0;
        results.push_back({"scaled FFT: impulse spreads flat at 1/B", ok, ""});
    }
    {
        RngStream rng(seed, 6);
        double worst = 0.0;
        for (int inst = 0; inst < 10; ++inst)
        {
            const ComplexVector x = draw_cscg(64, 1.0, rng);
            const fp::FixedVector x_q = fp::quantize_vector(x, fp::kAntennaFmt);
            const ComplexVector got = fp::dequantize_vector(fp::fft_scaled_fixed(x_q));
            ComplexVector ref = fft_unitary(fp::dequantize_vector(x_q));
            for (auto &v : ref)
                v *= 1.0 / 8.0;
            for (std::size_t i = 0; i < got.size(); ++i)
                worst = std::max({worst, std::abs(got[i].real() - ref[i].real()),
                                  std::abs(got[i].imag() - ref[i].imag())});
        }
        results.push_back({"scaled FFT tracks float within 2 LSB of Q(10,8)",
                           worst <= std::ldexp(1.0, -7), "worst " + detail::fmt(worst * 256.0) +
                                                             " LSB of Q(16,8)"});
    }
    {
        const fp::PolarFixed p = fp::to_polar_fixed({154, 205}); // ~(0.6, 0.8)
        const fp::PolarFixed unit = fp::to_polar_fixed({256, 0});
        const bool ok = std::abs(p.mag_raw - 256) <= 1 && unit.mag_raw == 256 &&
                        unit.phase_raw == 0 && fp::to_polar_fixed({0, 0}).mag_raw == 0;
        results.push_back({"polar conversion anchors", ok, ""});
    }
    {
        RngStream rng(seed, 7);
        double worst = 0.0;
        for (int inst = 0; inst < 100; ++inst)
        {
            // single on-grid path: the tau = 0 identity path of the pipeline
            const std::size_t b = 128;
            const std::size_t bin = rng.next_u64() % b;
            const Complex gain = std::polar(1.0, 2.0 * M_PI * rng.uniform());
            ComplexVector h(b);
            for (std::size_t n = 0; n < b; ++n)
                h[n] = gain * std::polar(1.0, 2.0 * M_PI * static_cast<double>(bin) *
                                                  static_cast<double>(n) / static_cast<double>(b));
            const ComplexVector h_q = fp::dequantize_vector(fp::quantize_vector(h, fp::kAntennaFmt));
            const DenoiseResult res = fp::denoise_fixed(h, 0.0);
            for (std::size_t i = 0; i < b; ++i)
                worst = std::max({worst, std::abs(res.h_star[i].real() - h_q[i].real()),
                                  std::abs(res.h_star[i].imag() - h_q[i].imag())});
        }
        results.push_back({"noiseless round trip within 2 LSB of Q(16,8)",
                           worst <= 2.0 * std::ldexp(1.0, -8),
                           "worst " + detail::fmt(worst * 256.0) + " LSB"});
    }
    {
        RngStream rng(seed, 8);
        const ComplexVector y = draw_cscg(128, 1.5, rng);
        const DenoiseResult a = fp::denoise_fixed(y, 0.4);
        const DenoiseResult b = fp::denoise_fixed(y, 0.4);
        results.push_back({"bit determinism across runs",
                           a.h_star == b.h_star && a.tau_star == b.tau_star, ""});
    }
    {
        fp::SaturationTally tally;
        for (int draw = 0; draw < 50; ++draw)
        {
            RngStream rng(seed, 9000 + static_cast<std::uint64_t>(draw));
            const ComplexVector h =
                synthesize_channel(sample_scenario(ScenarioLabel::LosLike, 128, rng));
            ComplexVector y = h;
            for (auto &v : y)
                v += rng.cscg(10.0); // SNR -10 dB
            fp::denoise_fixed(y, 10.0, &tally);
        }
        results.push_back({"no saturation at SNR >= -10 dB under unit-gain normalization",
                           tally.events == 0, std::to_string(tally.events) + " events"});
    }
    return results;
}

inline std::vector<PropertyResult> run_linksim_suite(std::uint64_t seed)
{
    std::vector<PropertyResult> results;

    {
        RngStream rng(seed, 10);
        double worst = 0.0;
        for (int inst = 0; inst < 100; ++inst)
        {
            const std::size_t b = 64, u = 4;
            ChannelMatrix h;
            for (std::size_t j = 0; j < u; ++j)
                h.columns.push_back(draw_cscg(b, 1.0, rng));
            const ComplexVector r = draw_cscg(b, 2.0, rng);
            const ComplexVector fast = lmmse_detect(h, r, 0.1, 0.5);
            const ComplexVector slow = oracles::lmmse_explicit(h.columns, r, 0.1, 0.5);
            worst = std::max(worst, detail::rel_l2_error(fast, slow));
        }
        results.push_back({"L-MMSE matches explicit-inverse oracle (100 systems)", worst < 1e-10,
                           "worst rel " + detail::fmt(worst)});
    }
    {
        bool ok = true;
        for (Constellation c : {Constellation::Qpsk, Constellation::Qam16})
        {
            const std::size_t bps = bits_per_symbol(c);
            std::vector<std::uint8_t> all_bits;
            for (std::size_t p = 0; p < (std::size_t{1} << bps); ++p)
                for (std::size_t bit = 0; bit < bps; ++bit)
                    all_bits.push_back((p >> (bps - 1 - bit)) & 1u);
            const ComplexVector pts = map_bits(all_bits, c);
            double energy = 0.0;
            for (const auto &s : pts)
                energy += std::norm(s);
            ok = ok && std::abs(energy / static_cast<double>(pts.size()) - 1.0) < 1e-15 &&
                 demap_symbols(pts, c) == all_bits;
        }
        results.push_back({"constellations: unit energy and hard-decision round trip", ok, ""});
    }
    {
        LinkConfig cfg;
        cfg.antennas = 64;
        cfg.users = 4;
        cfg.snr_db_grid = {0.0};
        cfg.trials = 150;
        cfg.slots_per_trial = 5;
        cfg.estimators = {Estimator::PerfectCsi, Estimator::OracleMse, Estimator::BeachesExact,
                          Estimator::Ml};
        cfg.seed = seed;
        const auto pts = run_link_sweep(cfg);
        const double e0 = 1.0;
        const bool ok = pts[0].mse == 0.0 && pts[1].mse <= pts[2].mse &&
                        pts[2].mse <= 0.6 * pts[3].mse && std::abs(pts[3].mse - e0) < 0.1 * e0;
        results.push_back({"estimator ordering: perfect <= oracle <= adaptive <= raw", ok,
                           "mse " + detail::fmt(pts[1].mse) + " / " + detail::fmt(pts[2].mse) +
                               " / " + detail::fmt(pts[3].mse)});
    }
    {
        LinkConfig cfg;
        cfg.antennas = 32;
        cfg.users = 2;
        cfg.snr_db_grid = {4.0};
        cfg.trials = 10;
        cfg.slots_per_trial = 8;
        cfg.estimators = {Estimator::Ml, Estimator::BeachesHw};
        cfg.seed = seed + 11;
        const auto a = run_link_sweep(cfg);
        cfg.threads = 4;
        const auto b = run_link_sweep(cfg);
        bool ok = a.size() == b.size();
        for (std::size_t i = 0; ok && i < a.size(); ++i)
            ok = a[i].ber == b[i].ber && a[i].mse == b[i].mse;
        results.push_back({"seed determinism, independent of worker count", ok, ""});
    }
    {
        LinkConfig cfg;
        cfg.antennas = 64;
        cfg.users = 4;
        cfg.snr_db_grid = {60.0};
        cfg.trials = 700;
        cfg.slots_per_trial = 10;
        cfg.estimators = {Estimator::PerfectCsi};
        cfg.seed = seed + 12;
        const auto pts = run_link_sweep(cfg);
        results.push_back({"no error floor at high SNR under perfect CSI", pts[0].ber < 1e-4,
                           "ber " + detail::fmt(pts[0].ber)});
    }
    return results;
}

/// Runs the named suite; throws std::invalid_argument for unknown names.
inline std::vector<PropertyResult> run_suite(const std::string &suite, std::uint64_t seed = 1)
{
    if (suite == "fft")
        return run_fft_suite(seed);
    if (suite == "sure")
        return run_sure_suite(seed);
    if (suite == "scan")
        return run_scan_suite(seed);
    if (suite == "fixedpoint")
        return run_fixedpoint_suite(seed);
    if (suite == "linksim")
        return run_linksim_suite(seed);
    throw std::invalid_argument("unknown validation suite '" + suite +
                                "' (valid: sure, scan, fft, fixedpoint, linksim)");
}

} // namespace beaches::validation

#endif // BEACHES_VALIDATION_HPP
