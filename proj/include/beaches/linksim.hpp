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
// Link-level Monte-Carlo harness. Per trial: sample one channel per user,
// run sequential pilot training (one user active per slot, so each column
// sees additive noise with per-entry variance E0 = N0/rho^2), denoise the
// columns with the selected estimator, then push data slots through
// r = H s + n with L-MMSE detection and accumulate uncoded BER and channel
// MSE. SNR is the per-receive-antenna average rho^2/N0 under the unit-gain
// normalization E||h||^2 = B and E||s||^2 = rho^2. Every random draw comes
// from a substream keyed by (snr index, trial, role, user), so results are
// a pure function of the seed regardless of worker count; estimators share
// the per-trial channel, pilot-noise, bit and noise streams (paired
// comparisons).

#ifndef BEACHES_LINKSIM_HPP
#define BEACHES_LINKSIM_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "beaches/channel.hpp"
#include "beaches/csvio.hpp"
#include "beaches/denoiser.hpp"
#include "beaches/fixedpoint.hpp"
#include "beaches/modulation.hpp"
#include "beaches/numerics.hpp"

namespace beaches {

enum class Estimator { Ml, BeachesExact, BeachesHw, BeachesFixedpoint, OracleMse, PerfectCsi };

inline const char *to_string(Estimator e)
{
    switch (e)
    {
    case Estimator::Ml: return "ml";
    case Estimator::BeachesExact: return "beaches-exact";
    case Estimator::BeachesHw: return "beaches-hw";
    case Estimator::BeachesFixedpoint: return "beaches-fixedpoint";
    case Estimator::OracleMse: return "oracle-mse";
    case Estimator::PerfectCsi: return "perfect-csi";
    }
    return "?";
}

inline constexpr const char *kValidEstimatorNames =
    "ml, beaches-exact, beaches-hw, beaches-fixedpoint, oracle-mse, perfect-csi";

inline Estimator estimator_from_string(const std::string &s)
{
    if (s == "ml")
        return Estimator::Ml;
    if (s == "beaches-exact")
        return Estimator::BeachesExact;
    if (s == "beaches-hw")
        return Estimator::BeachesHw;
    if (s == "beaches-fixedpoint")
        return Estimator::BeachesFixedpoint;
    if (s == "oracle-mse")
        return Estimator::OracleMse;
    if (s == "perfect-csi")
        return Estimator::PerfectCsi;
    throw std::invalid_argument("unknown estimator '" + s + "' (valid: " +
                                std::string(kValidEstimatorNames) + ")");
}

struct ChannelMatrix {
    std::vector<ComplexVector> columns; // one length-B channel per user
};

struct LinkConfig {
    std::size_t antennas = 64; // B, power of two
    std::size_t users = 4;     // U <= B
    Constellation constellation = Constellation::Qam16;
    std::vector<double> snr_db_grid;
    std::size_t trials = 100;
    double rho2 = 1.0;
    std::vector<Estimator> estimators;
    std::uint64_t seed = 1;
    ScenarioLabel scenario = ScenarioLabel::LosLike;
    std::size_t slots_per_trial = 100;
    std::size_t threads = 1;
};

struct MetricAccumulator {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_total = 0;
    double mse_sum = 0.0;
    std::uint64_t vectors_total = 0;

    void merge(const MetricAccumulator &o)
    {
        bit_errors += o.bit_errors;
        bits_total += o.bits_total;
        mse_sum += o.mse_sum;
        vectors_total += o.vectors_total;
    }
    double ber() const
    {
        return bits_total ? static_cast<double>(bit_errors) / static_cast<double>(bits_total) : 0.0;
    }
    double mse() const
    {
        return vectors_total ? mse_sum / static_cast<double>(vectors_total) : 0.0;
    }
};

struct SweepPoint {
    double snr_db = 0.0;
    Estimator estimator = Estimator::Ml;
    double ber = 0.0;
    double mse = 0.0;
};

struct singular_system_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * L-MMSE detector (H^H H + (n0/es) I)^{-1} H^H r via Cholesky of the
 * regularized Gram matrix; the factorization is reusable across data slots
 * of one channel realization.
 */
class LmmseDetector {
public:
    LmmseDetector(const ChannelMatrix &h_star, double n0, double es)
        : columns_(&h_star.columns), users_(h_star.columns.size())
    {
        if (users_ == 0)
            throw std::invalid_argument("LmmseDetector: empty channel");
        if (!(es > 0.0))
            throw std::invalid_argument("LmmseDetector: es must be positive");
        if (n0 < 0.0)
            throw std::invalid_argument("LmmseDetector: n0 must be nonnegative");
        antennas_ = (*columns_)[0].size();
        for (const auto &col : *columns_)
            if (col.size() != antennas_)
                throw std::invalid_argument("LmmseDetector: ragged channel matrix");

        // A = H^H H + (n0/es) I, Hermitian; only the lower triangle is used.
        std::vector<Complex> a(users_ * users_, Complex{0.0, 0.0});
        double max_diag = 0.0;
        for (std::size_t i = 0; i < users_; ++i)
        {
            for (std::size_t j = 0; j <= i; ++j)
            {
                Complex acc{0.0, 0.0};
                for (std::size_t b = 0; b < antennas_; ++b)
                    acc += std::conj((*columns_)[i][b]) * (*columns_)[j][b];
                if (i == j)
                {
                    acc += n0 / es;
                    max_diag = std::max(max_diag, acc.real());
                }
                a[i * users_ + j] = acc;
            }
        }

        // Cholesky A = L L^H with real positive diagonal.
        chol_.assign(users_ * users_, Complex{0.0, 0.0});
        for (std::size_t j = 0; j < users_; ++j)
        {
            double d = a[j * users_ + j].real();
            for (std::size_t k = 0; k < j; ++k)
                d -= std::norm(chol_[j * users_ + k]);
            if (!(d > 1e-13 * max_diag))
                throw singular_system_error("lmmse: singular regularized Gram matrix");
            const double l_jj = std::sqrt(d);
            chol_[j * users_ + j] = l_jj;
            for (std::size_t i = j + 1; i < users_; ++i)
            {
                Complex acc = a[i * users_ + j];
                for (std::size_t k = 0; k < j; ++k)
                    acc -= chol_[i * users_ + k] * std::conj(chol_[j * users_ + k]);
                chol_[i * users_ + j] = acc / l_jj;
            }
        }
    }

    ComplexVector detect(const ComplexVector &r) const
    {
        if (r.size() != antennas_)
            throw std::invalid_argument("LmmseDetector: observation length mismatch");
        // w = H^H r
        ComplexVector w(users_, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < users_; ++i)
            for (std::size_t b = 0; b < antennas_; ++b)
                w[i] += std::conj((*columns_)[i][b]) * r[b];
        // forward solve L z = w
        for (std::size_t i = 0; i < users_; ++i)
        {
            for (std::size_t k = 0; k < i; ++k)
                w[i] -= chol_[i * users_ + k] * w[k];
            w[i] /= chol_[i * users_ + i].real();
        }
        // backward solve L^H s = z
        for (std::size_t i = users_; i-- > 0;)
        {
            for (std::size_t k = i + 1; k < users_; ++k)
                w[i] -= std::conj(chol_[k * users_ + i]) * w[k];
            w[i] /= chol_[i * users_ + i].real();
        }
        return w;
    }

private:
    const std::vector<ComplexVector> *columns_;
    std::size_t users_;
    std::size_t antennas_ = 0;
    std::vector<Complex> chol_;
};

/// One-shot L-MMSE detection.
inline ComplexVector lmmse_detect(const ChannelMatrix &h_star, const ComplexVector &r, double n0,
                                  double es)
{
    return LmmseDetector(h_star, n0, es).detect(r);
}

/// Column estimate for one user given its noisy pilot observation.
inline ComplexVector apply_estimator(Estimator est, const ComplexVector &y,
                                     const ComplexVector &h_true, double e0)
{
    switch (est)
    {
    case Estimator::Ml:
        return y;
    case Estimator::PerfectCsi:
        return h_true;
    case Estimator::BeachesExact:
        return denoise(y, e0, ScanVariant::Exact).h_star;
    case Estimator::BeachesHw:
        return denoise(y, e0, ScanVariant::Hw).h_star;
    case Estimator::BeachesFixedpoint:
        return fixedpoint::denoise_fixed(y, e0).h_star;
    case Estimator::OracleMse:
    {
        const ComplexVector y_hat = fft_unitary(y);
        const ComplexVector h_hat = fft_unitary(h_true);
        const double tau = oracle_mse_tau(y_hat, h_hat);
        return ifft_unitary(soft_threshold(y_hat, tau));
    }
    }
    throw std::logic_error("apply_estimator: unhandled estimator");
}

/// Sequential pilot training: each column observed as y_u = h_u + e_u with
/// per-entry variance E0 = n0/rho^2, then denoised by the chosen estimator.
inline ChannelMatrix run_training_phase(const ChannelMatrix &h, const PilotModel &pilot,
                                        Estimator est, RngStream &rng)
{
    ChannelMatrix out;
    out.columns.reserve(h.columns.size());
    for (const auto &column : h.columns)
    {
        const ComplexVector y = observe_pilot(column, pilot, rng);
        out.columns.push_back(apply_estimator(est, y, column, pilot.e0()));
    }
    return out;
}

namespace detail {

enum StreamRole : std::uint64_t { kScenarioRole = 0, kPilotRole = 1, kBitsRole = 2, kNoiseRole = 3 };

inline std::uint64_t stream_id(std::size_t snr_idx, std::size_t trial, StreamRole role,
                               std::size_t user)
{
    return (static_cast<std::uint64_t>(snr_idx) << 48) |
           (static_cast<std::uint64_t>(trial) << 16) | (static_cast<std::uint64_t>(user) << 4) |
           static_cast<std::uint64_t>(role);
}

inline void validate(const LinkConfig &cfg)
{
    if (!is_power_of_two(cfg.antennas))
        throw std::invalid_argument("LinkConfig: antenna count must be a power of two");
    if (cfg.users == 0 || cfg.users > cfg.antennas)
        throw std::invalid_argument("LinkConfig: need 1 <= U <= B");
    if (cfg.trials == 0)
        throw std::invalid_argument("LinkConfig: need at least one trial");
    if (cfg.snr_db_grid.empty())
        throw std::invalid_argument("LinkConfig: empty SNR grid");
    if (cfg.estimators.empty())
        throw std::invalid_argument("LinkConfig: no estimators selected");
    if (!(cfg.rho2 > 0.0))
        throw std::invalid_argument("LinkConfig: rho2 must be positive");
    if (cfg.slots_per_trial == 0)
        throw std::invalid_argument("LinkConfig: need at least one data slot per trial");
    if (cfg.threads == 0)
        throw std::invalid_argument("LinkConfig: thread count must be positive");
    if (cfg.users >= (1u << 12))
        throw std::invalid_argument("LinkConfig: user count too large for stream derivation");
}

// Per-trial metrics for every estimator at one SNR point.
inline void run_trial(const LinkConfig &cfg, std::size_t snr_idx, std::size_t trial, double n0,
                      std::vector<MetricAccumulator> &metrics_out)
{
    const std::size_t b = cfg.antennas;
    const std::size_t u_count = cfg.users;
    const double e0 = n0 / cfg.rho2;
    const double es = cfg.rho2 / static_cast<double>(u_count);
    const double amp = std::sqrt(es);
    const PilotModel pilot{n0, cfg.rho2};

    ChannelMatrix h;
    h.columns.reserve(u_count);
    std::vector<ComplexVector> y_columns(u_count);
    for (std::size_t u = 0; u < u_count; ++u)
    {
        RngStream scen_rng(cfg.seed, stream_id(snr_idx, trial, kScenarioRole, u));
        h.columns.push_back(synthesize_channel(sample_scenario(cfg.scenario, b, scen_rng)));
        RngStream pilot_rng(cfg.seed, stream_id(snr_idx, trial, kPilotRole, u));
        y_columns[u] = observe_pilot(h.columns[u], pilot, pilot_rng);
    }

    const std::size_t n_est = cfg.estimators.size();
    std::vector<ChannelMatrix> h_star(n_est);
    std::vector<LmmseDetector> detectors;
    detectors.reserve(n_est);
    for (std::size_t e = 0; e < n_est; ++e)
    {
        h_star[e].columns.reserve(u_count);
        double mse_cols = 0.0;
        for (std::size_t u = 0; u < u_count; ++u)
        {
            h_star[e].columns.push_back(
                apply_estimator(cfg.estimators[e], y_columns[u], h.columns[u], e0));
            double err = 0.0;
            for (std::size_t i = 0; i < b; ++i)
                err += std::norm(h_star[e].columns[u][i] - h.columns[u][i]);
            mse_cols += err / static_cast<double>(b);
        }
        metrics_out[e].mse_sum += mse_cols;
        metrics_out[e].vectors_total += u_count;
        detectors.emplace_back(h_star[e], n0, es);
    }

    const std::size_t bps = bits_per_symbol(cfg.constellation);
    RngStream bits_rng(cfg.seed, stream_id(snr_idx, trial, kBitsRole, 0));
    RngStream noise_rng(cfg.seed, stream_id(snr_idx, trial, kNoiseRole, 0));
    std::vector<std::uint8_t> bits(u_count * bps);
    ComplexVector r(b);
    for (std::size_t slot = 0; slot < cfg.slots_per_trial; ++slot)
    {
        for (auto &bit : bits)
            bit = static_cast<std::uint8_t>(bits_rng.next_u64() & 1u);
        const ComplexVector symbols = map_bits(bits, cfg.constellation);
        for (std::size_t i = 0; i < b; ++i)
        {
            Complex acc = noise_rng.cscg(n0);
            for (std::size_t u = 0; u < u_count; ++u)
                acc += h.columns[u][i] * (amp * symbols[u]);
            r[i] = acc;
        }
        for (std::size_t e = 0; e < n_est; ++e)
        {
            ComplexVector s_hat = detectors[e].detect(r);
            for (auto &v : s_hat)
                v /= amp;
            const std::vector<std::uint8_t> decided = demap_symbols(s_hat, cfg.constellation);
            std::uint64_t errors = 0;
            for (std::size_t i = 0; i < bits.size(); ++i)
                errors += decided[i] != bits[i];
            metrics_out[e].bit_errors += errors;
            metrics_out[e].bits_total += bits.size();
        }
    }
}

} // namespace detail

/**
 * Per-trial metrics for one SNR point: metrics[trial][estimator]. Trials
 * may be dispatched across cfg.threads workers without changing a bit of
 * the result (every draw comes from a substream keyed by the trial index).
 * Estimators within a trial share the channel, pilot noise, bits and data
 * noise, so cross-estimator comparisons are paired.
 */
inline std::vector<std::vector<MetricAccumulator>> run_link_trials(const LinkConfig &cfg,
                                                                   std::size_t snr_index)
{
    detail::validate(cfg);
    if (snr_index >= cfg.snr_db_grid.size())
        throw std::invalid_argument("run_link_trials: SNR index out of range");
    const double n0 = cfg.rho2 * std::pow(10.0, -cfg.snr_db_grid[snr_index] / 10.0);

    std::vector<std::vector<MetricAccumulator>> metrics(
        cfg.trials, std::vector<MetricAccumulator>(cfg.estimators.size()));

    const std::size_t n_workers = std::min(cfg.threads, cfg.trials);
    if (n_workers <= 1)
    {
        for (std::size_t t = 0; t < cfg.trials; ++t)
            detail::run_trial(cfg, snr_index, t, n0, metrics[t]);
    }
    else
    {
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
        {
            workers.emplace_back([&, w] {
                for (std::size_t t = w; t < cfg.trials; t += n_workers)
                    detail::run_trial(cfg, snr_index, t, n0, metrics[t]);
            });
        }
        for (auto &worker : workers)
            worker.join();
    }
    return metrics;
}

/**
 * Runs the full sweep: every SNR point, every trial, every estimator.
 * Output rows are ordered SNR-major, estimator-minor (config order) and are
 * a pure function of the config (per-trial accumulators are reduced in
 * trial order regardless of worker count).
 */
inline std::vector<SweepPoint> run_link_sweep(const LinkConfig &cfg)
{
    detail::validate(cfg);
    std::vector<SweepPoint> points;
    points.reserve(cfg.snr_db_grid.size() * cfg.estimators.size());

    for (std::size_t snr_idx = 0; snr_idx < cfg.snr_db_grid.size(); ++snr_idx)
    {
        const auto metrics = run_link_trials(cfg, snr_idx);
        for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
        {
            MetricAccumulator total;
            for (std::size_t t = 0; t < cfg.trials; ++t)
                total.merge(metrics[t][e]);
            points.push_back({cfg.snr_db_grid[snr_idx], cfg.estimators[e], total.ber(), total.mse()});
        }
    }
    return points;
}

/// CSV with header `snr_db,estimator,ber,mse,trials,seed`.
inline void write_sweep_csv(std::ostream &out, const std::vector<SweepPoint> &points,
                            const LinkConfig &cfg)
{
    out << "snr_db,estimator,ber,mse,trials,seed\n";
    for (const auto &p : points)
    {
        out << format_double(p.snr_db) << ',' << to_string(p.estimator) << ','
            << format_double(p.ber) << ',' << format_double(p.mse) << ',' << cfg.trials << ','
            << cfg.seed << '\n';
    }
}

} // namespace beaches

#endif // BEACHES_LINKSIM_HPP
