// SPDX-License-Identifier: Apache-2.0
//
// Unit tests for soft-thresholding, the SURE objective, the interval scans
// and the end-to-end denoise pipeline. Expected values are either worked by
// hand from the direct-summation objective or checked against the dense
// grid-search oracles.

#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "beaches/denoiser.hpp"
#include "beaches/numerics.hpp"
#include "beaches/oracles.hpp"

using namespace beaches;

namespace {

// Random magnitude instances covering dense, sparse, tied and zero cases.
std::vector<double> random_magnitudes(RngStream &rng, std::size_t b)
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
        // sparse: a few strong entries over a noise floor
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
        mags[rng.next_u64() % b] = 0.0; // inject an exact zero
        mags[1] = mags[0];              // and a tie
    }
    std::sort(mags.begin(), mags.end());
    return mags;
}

double log_uniform_e0(RngStream &rng)
{
    return std::pow(10.0, -3.0 + 4.0 * rng.uniform()); // [1e-3, 10]
}

} // namespace

TEST_CASE("soft_threshold - shrink, kill, identity")
{
    const ComplexVector y{{3.0, 4.0}, {0.0, 0.5}, {-1.0, 0.0}};

    const ComplexVector shrunk = soft_threshold(y, 2.0);
    CHECK(std::abs(shrunk[0] - Complex{1.8, 2.4}) < 1e-14);

    const ComplexVector killed = soft_threshold({{0.0, 0.5}}, 1.0);
    CHECK(killed[0] == Complex{0.0, 0.0});

    const ComplexVector same = soft_threshold(y, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(same[i] == y[i]);

    CHECK_THROWS_AS(soft_threshold(y, -0.1), std::invalid_argument);
}

TEST_CASE("sure_value - hand-worked example and limits")
{
    // magnitudes {1,3}, tau 2, E0 1: 1/2 + 4/2 + 1 - (1/2)*2*(1/3) - (2/2)*1 = 13/6
    CHECK(sure_value({1.0, 3.0}, 2.0, 1.0) == Approx(13.0 / 6.0).epsilon(1e-14));

    // E0 = 0, tau -> 0+: both penalty terms vanish
    CHECK(sure_value({0.3, 1.0, 2.5}, 0.0, 0.0) == 0.0);

    // all magnitudes far above tau with E0 = 0: only the tau^2 sum survives
    CHECK(sure_value({10.0, 20.0, 30.0}, 1.5, 0.0) == Approx(1.5 * 1.5).epsilon(1e-14));

    CHECK_THROWS_AS(sure_value({1.0}, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sure_value({1.0}, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("scan_optimal_tau - degenerate all-zero input")
{
    const ScanResult res = scan_optimal_tau(std::vector<double>(8, 0.0), 1.0);
    CHECK(res.tau_star == 0.0);
    CHECK(res.sure_min == Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("scan_optimal_tau - noiseless observation keeps tau at zero")
{
    RngStream rng(11, 0);
    std::vector<double> mags = random_magnitudes(rng, 64);
    const ScanResult res = scan_optimal_tau(mags, 0.0);
    CHECK(res.tau_star == 0.0);
    CHECK(res.sure_min == 0.0);
}

TEST_CASE("scan_optimal_tau - three-weak-one-strong instance vs grid oracle")
{
    const std::vector<double> mags{0.1, 0.1, 0.1, 10.0};
    const double e0 = 0.04;
    const ScanResult res = scan_optimal_tau(mags, e0);
    CHECK(res.tau_star >= 0.1);
    CHECK(res.tau_star <= 0.2);

    const auto grid = oracles::sure_grid_minimum(mags, e0, 100000, 1.01);
    CHECK(res.sure_min <= grid.value + 1e-9 * (std::abs(grid.value) + e0));
    CHECK(std::abs(res.tau_star - grid.tau) < 10.0 * 1.01 / 100000 * 2.0 + 1e-12);
}

TEST_CASE("scan_optimal_tau - matches dense grid on random instances")
{
    RngStream rng(2024, 1);
    for (int inst = 0; inst < 150; ++inst)
    {
        const std::size_t b = std::size_t{8} << (rng.next_u64() % 7); // 8..512
        const std::vector<double> mags = random_magnitudes(rng, b);
        const double e0 = log_uniform_e0(rng);
        const ScanResult res = scan_optimal_tau(mags, e0);
        const auto grid = oracles::sure_grid_minimum(mags, e0, 10000, 1.01);
        const double tol = 1e-9 * (std::abs(grid.value) + e0);
        INFO("instance " << inst << " B=" << b << " e0=" << e0);
        CHECK(res.sure_min <= grid.value + tol);
        // the grid can only sit above the true minimum
        CHECK(grid.value >= res.sure_min - 1e-10 * (std::abs(grid.value) + e0 + 1.0));
    }
}

TEST_CASE("scan_optimal_tau - tau_star never decreases with E0")
{
    RngStream rng(555, 2);
    for (int inst = 0; inst < 50; ++inst)
    {
        const std::vector<double> mags = random_magnitudes(rng, 128);
        double prev_tau = -1.0;
        for (double e0 : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0})
        {
            const double tau = scan_optimal_tau(mags, e0).tau_star;
            CHECK(tau >= prev_tau);
            prev_tau = tau;
        }
    }
}

TEST_CASE("scan_optimal_tau_hw - candidate set and small instance")
{
    const std::vector<double> mags{0.1, 0.1, 0.1, 10.0};
    const double e0 = 0.04;
    const HwScanResult res = scan_optimal_tau_hw(mags, e0);
    CHECK((res.tau_star == 0.1 || res.tau_star == 10.0));

    // enumerate every candidate with the direct objective: candidate k uses
    // magnitude k as tau with entries >= k counted above
    double best_obj = 1e300;
    double best_tau = 0.0;
    double s = 0.0;
    double v = 0.0;
    for (double m : mags)
        v += 1.0 / m;
    for (std::size_t k = 1; k <= mags.size(); ++k)
    {
        const double tau = mags[k - 1];
        const double obj = s + static_cast<double>(mags.size() - k + 1) * tau * tau -
                           e0 * tau * v - 2.0 * e0 * static_cast<double>(k - 1);
        if (obj < best_obj)
        {
            best_obj = obj;
            best_tau = tau;
        }
        s += tau * tau;
        v -= 1.0 / tau;
    }
    CHECK(res.tau_star == best_tau);
    CHECK(res.scaled_sure_min == Approx(best_obj).margin(1e-12));
}

TEST_CASE("scan_optimal_tau_hw - noiseless corner has bounded gap")
{
    RngStream rng(77, 0);
    std::vector<double> mags = random_magnitudes(rng, 64);
    while (!mags.empty() && mags.front() <= 0.0)
        mags.erase(mags.begin());
    std::sort(mags.begin(), mags.end());
    const HwScanResult res = scan_optimal_tau_hw(mags, 0.0);
    CHECK(res.tau_star == mags.front());
    const double sure_hw =
        res.scaled_sure_min / static_cast<double>(mags.size()); // + e0 = 0
    CHECK(sure_hw >= 0.0);
    CHECK(sure_hw <= mags.front() * mags.front());
}

// Noisy sparse beamspace observation with noise variance matching the e0
// handed to the scan; the magnitudes a deployed denoiser actually sees.
static std::vector<double> observation_magnitudes(RngStream &rng, std::size_t b, double e0)
{
    ComplexVector h_hat(b, Complex{0.0, 0.0});
    const std::size_t n_paths = 1 + rng.next_u64() % 12;
    for (std::size_t p = 0; p < n_paths; ++p)
        h_hat[rng.next_u64() % b] =
            rng.cscg(static_cast<double>(b) / static_cast<double>(n_paths));
    std::vector<double> mags(b);
    for (std::size_t i = 0; i < b; ++i)
        mags[i] = std::abs(h_hat[i] + rng.cscg(e0));
    std::sort(mags.begin(), mags.end());
    return mags;
}

TEST_CASE("scan_optimal_tau_hw - never beats the exact scan, small gap on observations")
{
    RngStream rng(31337, 0);
    int within_one_percent = 0;
    const int instances = 300;
    for (int inst = 0; inst < instances; ++inst)
    {
        const double e0 = log_uniform_e0(rng);
        const std::vector<double> mags = observation_magnitudes(rng, 256, e0);
        const ScanResult exact = scan_optimal_tau(mags, e0);
        const HwScanResult hw = scan_optimal_tau_hw(mags, e0);
        const double sure_hw = hw.scaled_sure_min / static_cast<double>(mags.size()) + e0;
        CHECK(sure_hw >= exact.sure_min - 1e-12 * (std::abs(exact.sure_min) + e0));
        if (sure_hw - exact.sure_min <= 0.01 * (exact.sure_min + e0))
            ++within_one_percent;
    }
    CHECK(within_one_percent >= instances * 99 / 100);
}

TEST_CASE("oracle_mse_tau - trivial endpoints")
{
    RngStream rng(8, 8);
    const ComplexVector y_hat = draw_cscg(32, 1.0, rng);

    // no noise: shrinking only hurts
    CHECK(oracle_mse_tau(y_hat, y_hat) == 0.0);

    // zero target: full shrinkage
    const ComplexVector zeros(32, Complex{0.0, 0.0});
    double max_mag = 0.0;
    for (const auto &v : y_hat)
        max_mag = std::max(max_mag, std::abs(v));
    CHECK(oracle_mse_tau(y_hat, zeros) == Approx(max_mag).epsilon(1e-14));

    CHECK_THROWS_AS(oracle_mse_tau(y_hat, ComplexVector(8)), std::invalid_argument);
}

TEST_CASE("oracle_mse_tau - agrees with dense grid search")
{
    RngStream rng(451, 9);
    for (int inst = 0; inst < 40; ++inst)
    {
        ComplexVector h_hat(64, Complex{0.0, 0.0});
        for (int p = 0; p < 4; ++p)
            h_hat[rng.next_u64() % 64] = rng.cscg(16.0);
        const double e0 = 0.2;
        ComplexVector y_hat = h_hat;
        for (auto &v : y_hat)
            v += rng.cscg(e0);

        const double tau = oracle_mse_tau(y_hat, h_hat);
        const auto grid = oracles::mse_grid_minimum(y_hat, h_hat, 100000, 1.01);
        double max_mag = 0.0;
        for (const auto &v : y_hat)
            max_mag = std::max(max_mag, std::abs(v));
        const double step = 1.01 * max_mag / 99999.0;
        CHECK(oracles::mse_at_tau(y_hat, h_hat, tau) <= grid.value + 1e-12);
        CHECK(std::abs(tau - grid.tau) <= 2.0 * step + 1e-12);
    }
}

TEST_CASE("denoise - noiseless input is returned unchanged")
{
    RngStream rng(64, 64);
    const ComplexVector y = draw_cscg(64, 1.0, rng);
    const DenoiseResult res = denoise(y, 0.0);
    CHECK(res.tau_star == 0.0);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
    {
        err += std::norm(res.h_star[i] - y[i]);
        ref += std::norm(y[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-12);
}

TEST_CASE("denoise - on-grid single path concentrates in one beamspace bin")
{
    const std::size_t b = 64;
    const std::size_t bin = 5;
    const Complex alpha{0.8, -0.3};
    ComplexVector y(b);
    for (std::size_t n = 0; n < b; ++n)
        y[n] = alpha * std::polar(1.0, 2.0 * M_PI * static_cast<double>(bin) *
                                           static_cast<double>(n) / static_cast<double>(b));

    const DenoiseResult res = denoise(y, 0.0);
    const ComplexVector y_hat = fft_unitary(y);
    CHECK(std::abs(std::abs(y_hat[bin]) - std::sqrt(static_cast<double>(b)) * std::abs(alpha)) <
          1e-12);
    for (std::size_t k = 0; k < b; ++k)
        if (k != bin)
            CHECK(std::abs(y_hat[k]) < 1e-12);
    double err = 0.0;
    for (std::size_t i = 0; i < b; ++i)
        err += std::norm(res.h_star[i] - y[i]);
    CHECK(std::sqrt(err) < 1e-11);
}

TEST_CASE("denoise - single-path Monte-Carlo MSE clearly beats the raw observation")
{
    const std::size_t b = 64;
    const double e0 = 0.1;
    double mse_sum = 0.0;
    const int trials = 1000;
    RngStream path_rng(777, 0);
    for (int t = 0; t < trials; ++t)
    {
        const std::size_t bin = path_rng.next_u64() % b;
        const Complex alpha = std::polar(1.0, 2.0 * M_PI * path_rng.uniform());
        ComplexVector h(b);
        for (std::size_t n = 0; n < b; ++n)
            h[n] = alpha * std::polar(1.0, 2.0 * M_PI * static_cast<double>(bin) *
                                               static_cast<double>(n) / static_cast<double>(b));
        RngStream noise_rng(777, 1000 + static_cast<std::uint64_t>(t));
        ComplexVector y = h;
        for (auto &v : y)
            v += noise_rng.cscg(e0);
        const DenoiseResult res = denoise(y, e0);
        double err = 0.0;
        for (std::size_t i = 0; i < b; ++i)
            err += std::norm(res.h_star[i] - h[i]);
        mse_sum += err / static_cast<double>(b);
    }
    const double mean_mse = mse_sum / trials;
    CHECK(mean_mse < e0);
    CHECK(mean_mse < 0.5 * e0);
}

TEST_CASE("denoise - shrinkage contract: magnitudes shrink exactly, phases survive")
{
    RngStream rng(4242, 0);
    for (int inst = 0; inst < 20; ++inst)
    {
        const ComplexVector y = draw_cscg(128, 1.0, rng);
        const double e0 = log_uniform_e0(rng);
        const DenoiseResult res = denoise(y, e0);
        const ComplexVector y_hat = fft_unitary(y);
        for (std::size_t i = 0; i < y_hat.size(); ++i)
        {
            const double mag = std::abs(y_hat[i]);
            const double expected = std::max(mag - res.tau_star, 0.0);
            CHECK(std::abs(std::abs(res.h_hat_star[i]) - expected) <= 1e-12 * (mag + 1.0));
            if (expected > 1e-9)
            {
                const Complex ratio = res.h_hat_star[i] / y_hat[i];
                CHECK(std::abs(std::arg(ratio)) < 1e-12);
            }
        }
    }
}

TEST_CASE("denoise - hw variant SURE is never below the exact variant's")
{
    RngStream rng(90210, 0);
    for (int inst = 0; inst < 20; ++inst)
    {
        const ComplexVector y = draw_cscg(256, 1.0, rng);
        const double e0 = log_uniform_e0(rng);
        const DenoiseResult exact = denoise(y, e0, ScanVariant::Exact);
        const DenoiseResult hw = denoise(y, e0, ScanVariant::Hw);
        CHECK(hw.sure_min >= exact.sure_min - 1e-12 * (std::abs(exact.sure_min) + e0));
    }
}

TEST_CASE("interval form of SURE matches direct summation inside intervals")
{
    RngStream rng(1618, 0);
    for (int inst = 0; inst < 50; ++inst)
    {
        const std::size_t b = 64;
        std::vector<double> mags(b);
        for (auto &m : mags)
            m = 0.01 + std::abs(rng.cscg(1.0)); // keep magnitudes distinct and positive
        std::sort(mags.begin(), mags.end());
        const double e0 = log_uniform_e0(rng);

        const std::size_t k = 1 + rng.next_u64() % (b + 1); // interval 1..B+1
        const double lo = (k == 1) ? 0.0 : mags[k - 2];
        const double hi = (k == b + 1) ? mags.back() * 2.0 : mags[k - 1];
        if (hi - lo < 1e-9)
            continue;
        const double tau = lo + (0.25 + 0.5 * rng.uniform()) * (hi - lo);

        double s = 0.0, v = 0.0;
        for (std::size_t i = 0; i + 1 < k; ++i)
            s += mags[i] * mags[i];
        for (std::size_t i = k - 1; i < b; ++i)
            v += 1.0 / mags[i];
        const double interval_form =
            s / b + static_cast<double>(b - k + 1) / b * tau * tau + e0 - e0 / b * tau * v -
            2.0 * e0 / b * static_cast<double>(k - 1);
        const double direct = sure_value(mags, tau, e0);
        CHECK(interval_form == Approx(direct).epsilon(1e-10));
    }
}
