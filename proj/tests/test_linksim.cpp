// SPDX-License-Identifier: Apache-2.0
//
// Unit tests for modulation, L-MMSE detection, the training phase and the
// link sweep driver.

#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "beaches/linksim.hpp"
#include "beaches/oracles.hpp"

using namespace beaches;

namespace {

ChannelMatrix random_channel(RngStream &rng, std::size_t b, std::size_t u)
{
    ChannelMatrix h;
    for (std::size_t i = 0; i < u; ++i)
        h.columns.push_back(draw_cscg(b, 1.0, rng));
    return h;
}

double col_mse(const ChannelMatrix &a, const ChannelMatrix &b)
{
    double acc = 0.0;
    for (std::size_t u = 0; u < a.columns.size(); ++u)
        for (std::size_t i = 0; i < a.columns[u].size(); ++i)
            acc += std::norm(a.columns[u][i] - b.columns[u][i]);
    return acc / static_cast<double>(a.columns.size() * a.columns[0].size());
}

} // namespace

TEST_CASE("constellations - unit energy, round trip, corner symbol")
{
    for (Constellation c : {Constellation::Qpsk, Constellation::Qam16})
    {
        const std::size_t bps = bits_per_symbol(c);
        // average energy over all points
        std::vector<std::uint8_t> all_bits;
        const std::size_t n_points = std::size_t{1} << bps;
        for (std::size_t p = 0; p < n_points; ++p)
            for (std::size_t bit = 0; bit < bps; ++bit)
                all_bits.push_back((p >> (bps - 1 - bit)) & 1u);
        const ComplexVector points = map_bits(all_bits, c);
        double energy = 0.0;
        for (const auto &s : points)
            energy += std::norm(s);
        CHECK(energy / static_cast<double>(n_points) == Approx(1.0).epsilon(1e-15));

        CHECK(demap_symbols(points, c) == all_bits);

        // noisy round trip well inside the decision regions
        RngStream rng(1, static_cast<std::uint64_t>(bps));
        ComplexVector noisy = points;
        for (auto &s : noisy)
            s += rng.cscg(0.002);
        CHECK(demap_symbols(noisy, c) == all_bits);
    }

    const ComplexVector corner = map_bits(std::vector<std::uint8_t>(8, 0), Constellation::Qam16);
    CHECK(corner[0] == corner[1]);
    CHECK(std::abs(std::abs(corner[0].real()) - std::abs(corner[0].imag())) < 1e-15);
    CHECK(std::norm(corner[0]) == Approx(1.8).epsilon(1e-12)); // (9+9)/10

    CHECK_THROWS_AS(map_bits(std::vector<std::uint8_t>(3, 0), Constellation::Qam16),
                    std::invalid_argument);
}

TEST_CASE("lmmse_detect - single user at zero noise reduces to the matched filter")
{
    RngStream rng(2, 0);
    ChannelMatrix h = random_channel(rng, 32, 1);
    const Complex s{0.7, -0.4};
    ComplexVector r(32);
    for (std::size_t i = 0; i < 32; ++i)
        r[i] = h.columns[0][i] * s + 0.05 * rng.cscg(1.0);

    const ComplexVector s_hat = lmmse_detect(h, r, 0.0, 1.0);

    Complex mf{0.0, 0.0};
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < 32; ++i)
    {
        mf += std::conj(h.columns[0][i]) * r[i];
        norm_sq += std::norm(h.columns[0][i]);
    }
    CHECK(std::abs(s_hat[0] - mf / norm_sq) < 1e-12);
}

TEST_CASE("lmmse_detect - orthogonal channel recovers symbols exactly at n0 = 0")
{
    const std::size_t b = 16, u = 4;
    ChannelMatrix h;
    for (std::size_t j = 0; j < u; ++j)
    {
        ComplexVector col(b, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < b; ++i)
            col[i] = std::polar(1.0, 2.0 * M_PI * static_cast<double>(i * j) /
                                         static_cast<double>(b));
        h.columns.push_back(col); // scaled-sqrt(B) orthogonal columns
    }
    const ComplexVector s{{1.0, 0.5}, {-0.3, 0.2}, {0.0, -1.0}, {0.8, 0.8}};
    ComplexVector r(b, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < u; ++j)
            r[i] += h.columns[j][i] * s[j];
    const ComplexVector s_hat = lmmse_detect(h, r, 0.0, 1.0);
    for (std::size_t j = 0; j < u; ++j)
        CHECK(std::abs(s_hat[j] - s[j]) < 1e-12);
}

TEST_CASE("lmmse_detect - matches the explicit-inverse oracle")
{
    RngStream rng(3, 0);
    for (int inst = 0; inst < 100; ++inst)
    {
        const std::size_t b = 64, u = 4;
        ChannelMatrix h = random_channel(rng, b, u);
        const ComplexVector r = draw_cscg(b, 2.0, rng);
        const double n0 = 0.1, es = 0.5;
        const ComplexVector fast = lmmse_detect(h, r, n0, es);
        const ComplexVector slow = oracles::lmmse_explicit(h.columns, r, n0, es);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < u; ++j)
        {
            num += std::norm(fast[j] - slow[j]);
            den += std::norm(slow[j]);
        }
        CHECK(std::sqrt(num / den) < 1e-10);
    }
}

TEST_CASE("lmmse_detect - rank-deficient Gram at n0 = 0 raises singular-system error")
{
    RngStream rng(4, 0);
    ChannelMatrix h = random_channel(rng, 16, 2);
    h.columns[1] = h.columns[0]; // exactly repeated column
    const ComplexVector r = draw_cscg(16, 1.0, rng);
    CHECK_THROWS_AS(lmmse_detect(h, r, 0.0, 1.0), singular_system_error);
    CHECK_NOTHROW(lmmse_detect(h, r, 0.05, 1.0)); // regularization rescues it
}

TEST_CASE("run_training_phase - perfect CSI and noiseless ML are exact")
{
    RngStream rng(5, 0);
    const ChannelMatrix h = random_channel(rng, 64, 3);

    RngStream train_rng(5, 1);
    const ChannelMatrix perfect =
        run_training_phase(h, PilotModel{0.5, 1.0}, Estimator::PerfectCsi, train_rng);
    CHECK(col_mse(perfect, h) == 0.0);

    RngStream train_rng2(5, 2);
    const ChannelMatrix ml =
        run_training_phase(h, PilotModel{0.0, 1.0}, Estimator::Ml, train_rng2);
    CHECK(col_mse(ml, h) == 0.0);
}

TEST_CASE("run_training_phase - adaptive denoising beats raw pilots on LoS channels")
{
    const std::size_t b = 128, u = 2;
    const double e0 = 1.0; // SNR 0 dB
    double mse_ml = 0.0, mse_dn = 0.0, mse_or = 0.0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t)
    {
        ChannelMatrix h;
        for (std::size_t j = 0; j < u; ++j)
        {
            RngStream rng(6, static_cast<std::uint64_t>(t) * 100 + j);
            h.columns.push_back(synthesize_channel(sample_scenario(ScenarioLabel::LosLike, b, rng)));
        }
        const PilotModel pilot{e0, 1.0};
        RngStream r1(7, static_cast<std::uint64_t>(t) * 4 + 0);
        RngStream r2(7, static_cast<std::uint64_t>(t) * 4 + 0); // same pilot noise
        RngStream r3(7, static_cast<std::uint64_t>(t) * 4 + 0);
        mse_ml += col_mse(run_training_phase(h, pilot, Estimator::Ml, r1), h);
        mse_dn += col_mse(run_training_phase(h, pilot, Estimator::BeachesExact, r2), h);
        mse_or += col_mse(run_training_phase(h, pilot, Estimator::OracleMse, r3), h);
    }
    mse_ml /= trials;
    mse_dn /= trials;
    mse_or /= trials;
    CHECK(mse_ml == Approx(e0).epsilon(0.05)); // raw observation MSE is E0
    CHECK(mse_dn <= 0.5 * mse_ml);
    CHECK(mse_or <= mse_dn); // oracle dominates per realization
}

TEST_CASE("run_link_sweep - deterministic and thread-count independent")
{
    LinkConfig cfg;
    cfg.antennas = 32;
    cfg.users = 2;
    cfg.snr_db_grid = {0.0, 6.0};
    cfg.trials = 12;
    cfg.slots_per_trial = 10;
    cfg.estimators = {Estimator::Ml, Estimator::BeachesExact};
    cfg.seed = 99;

    const auto run1 = run_link_sweep(cfg);
    const auto run2 = run_link_sweep(cfg);
    cfg.threads = 3;
    const auto run3 = run_link_sweep(cfg);
    REQUIRE(run1.size() == 4);
    REQUIRE(run2.size() == run1.size());
    REQUIRE(run3.size() == run1.size());
    for (std::size_t i = 0; i < run1.size(); ++i)
    {
        CHECK(run1[i].ber == run2[i].ber);
        CHECK(run1[i].mse == run2[i].mse);
        CHECK(run1[i].ber == run3[i].ber);
        CHECK(run1[i].mse == run3[i].mse);
    }

    std::ostringstream csv1, csv2;
    write_sweep_csv(csv1, run1, cfg);
    write_sweep_csv(csv2, run3, cfg);
    CHECK(csv1.str() == csv2.str());
    CHECK(csv1.str().rfind("snr_db,estimator,ber,mse,trials,seed\n", 0) == 0);
}

TEST_CASE("run_link_sweep - perfect CSI at high SNR has no error floor")
{
    LinkConfig cfg;
    cfg.antennas = 64;
    cfg.users = 4;
    cfg.snr_db_grid = {60.0};
    cfg.trials = 700;
    cfg.slots_per_trial = 10; // 700*10*16 = 112k bits
    cfg.estimators = {Estimator::PerfectCsi};
    cfg.seed = 123;
    const auto points = run_link_sweep(cfg);
    REQUIRE(points.size() == 1);
    CHECK(points[0].ber < 1e-4);
    CHECK(points[0].mse == 0.0);
}

TEST_CASE("run_link_sweep - ML channel MSE equals the estimation-error variance")
{
    LinkConfig cfg;
    cfg.antennas = 64;
    cfg.users = 4;
    cfg.snr_db_grid = {3.0};
    cfg.trials = 200;
    cfg.slots_per_trial = 2;
    cfg.estimators = {Estimator::Ml};
    cfg.seed = 321;
    const auto points = run_link_sweep(cfg);
    const double e0 = std::pow(10.0, -0.3);
    CHECK(points[0].mse == Approx(e0).epsilon(0.03));
}

TEST_CASE("run_link_sweep - all six estimators produce a sane ordering")
{
    LinkConfig cfg;
    cfg.antennas = 64;
    cfg.users = 4;
    cfg.snr_db_grid = {0.0};
    cfg.trials = 30;
    cfg.slots_per_trial = 5;
    cfg.estimators = {Estimator::PerfectCsi, Estimator::OracleMse,  Estimator::BeachesExact,
                      Estimator::BeachesHw,  Estimator::BeachesFixedpoint, Estimator::Ml};
    cfg.seed = 2112;
    const auto pts = run_link_sweep(cfg);
    REQUIRE(pts.size() == 6);
    CHECK(pts[0].mse == 0.0);               // perfect CSI
    CHECK(pts[1].mse <= pts[2].mse);        // oracle dominates per realization
    CHECK(pts[2].mse <= 0.7 * pts[5].mse);  // adaptive clearly beats raw pilots
    CHECK(pts[3].mse == Approx(pts[2].mse).epsilon(0.05));  // hw close to exact
    CHECK(pts[4].mse == Approx(pts[3].mse).epsilon(0.05));  // fixed point close to hw
    CHECK(pts[0].ber <= pts[5].ber);
}

TEST_CASE("LinkConfig validation rejects bad settings")
{
    LinkConfig cfg;
    cfg.antennas = 48; // not a power of two
    cfg.users = 4;
    cfg.snr_db_grid = {0.0};
    cfg.estimators = {Estimator::Ml};
    CHECK_THROWS_AS(run_link_sweep(cfg), std::invalid_argument);
    cfg.antennas = 64;
    cfg.users = 128; // U > B
    CHECK_THROWS_AS(run_link_sweep(cfg), std::invalid_argument);
    cfg.users = 4;
    cfg.estimators.clear();
    CHECK_THROWS_AS(run_link_sweep(cfg), std::invalid_argument);

    CHECK_THROWS_AS(estimator_from_string("nomp"), std::invalid_argument);
    CHECK(estimator_from_string("beaches-hw") == Estimator::BeachesHw);
}

TEST_CASE("PilotModel keeps E0 = n0/rho2 exactly")
{
    const PilotModel pilot{0.3, 2.5};
    CHECK(pilot.e0() == 0.3 / 2.5);
}
