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
// Command implementations behind the `beaches` executable: single-vector
// denoising, link-level sweeps driven by a JSON config, the seeded
// validation suites and a denoise throughput benchmark. Kept separate from
// the argv parsing so tests can drive the commands directly.

#ifndef BEACHES_CLI_HPP
#define BEACHES_CLI_HPP

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beaches/csvio.hpp"
#include "beaches/denoiser.hpp"
#include "beaches/linksim.hpp"
#include "beaches/validation.hpp"

namespace beaches::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitConfigError = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sweep config schema: required keys B, U, constellation, snr_db, trials,
/// estimators, seed; optional scenario ("los"/"nlos", default los), rho2
/// (default 1), slots (default 100), threads (default 1). Flat structure,
/// unknown keys rejected.
inline LinkConfig parse_sweep_config(const nlohmann::json &j)
{
    static const std::vector<std::string> known = {"B",     "U",          "constellation",
                                                   "snr_db", "trials",    "estimators",
                                                   "seed",  "scenario",   "rho2",
                                                   "slots", "threads"};
    for (auto it = j.begin(); it != j.end(); ++it)
    {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config key '" + it.key() + "'");
    }
    const auto require = [&](const char *key) -> const nlohmann::json & {
        auto it = j.find(key);
        if (it == j.end())
            throw ConfigError(std::string("missing config key '") + key + "'");
        return *it;
    };

    LinkConfig cfg;
    try
    {
        cfg.antennas = require("B").get<std::size_t>();
        cfg.users = require("U").get<std::size_t>();
        cfg.constellation = constellation_from_string(require("constellation").get<std::string>());
        cfg.snr_db_grid = require("snr_db").get<std::vector<double>>();
        cfg.trials = require("trials").get<std::size_t>();
        for (const auto &name : require("estimators"))
            cfg.estimators.push_back(estimator_from_string(name.get<std::string>()));
        cfg.seed = require("seed").get<std::uint64_t>();
        if (j.contains("scenario"))
            cfg.scenario = scenario_label_from_string(j["scenario"].get<std::string>());
        if (j.contains("rho2"))
            cfg.rho2 = j["rho2"].get<double>();
        if (j.contains("slots"))
            cfg.slots_per_trial = j["slots"].get<std::size_t>();
        if (j.contains("threads"))
            cfg.threads = j["threads"].get<std::size_t>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline LinkConfig load_sweep_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return parse_sweep_config(j);
}

inline ScanVariant variant_from_string(const std::string &name)
{
    if (name == "exact")
        return ScanVariant::Exact;
    if (name == "hw")
        return ScanVariant::Hw;
    throw ConfigError("unknown variant '" + name + "' (expected 'exact' or 'hw')");
}

/// Denoises one vector read as re,im CSV rows; writes the denoised rows
/// followed by a `tau_star=...,sure_min=...` footer line.
inline int cmd_denoise(const std::string &input_path, double e0, const std::string &variant_name,
                       const std::string &output_path)
{
    const ScanVariant variant = variant_from_string(variant_name);
    std::ifstream in(input_path);
    if (!in)
        throw ConfigError("cannot open input file '" + input_path + "'");
    ComplexVector y;
    try
    {
        y = read_complex_csv(in);
    }
    catch (const CsvParseError &e)
    {
        throw ConfigError(input_path + ": " + e.what());
    }
    if (!is_power_of_two(y.size()))
        throw std::invalid_argument("denoise: row count must be a power of two, got " +
                                    std::to_string(y.size()));

    const DenoiseResult result = denoise(y, e0, variant);

    std::ofstream out(output_path);
    if (!out)
        throw ConfigError("cannot open output file '" + output_path + "'");
    write_complex_csv(out, result.h_star);
    out << "tau_star=" << format_double(result.tau_star)
        << ",sure_min=" << format_double(result.sure_min) << '\n';
    return kExitOk;
}

inline int cmd_sweep(const std::string &config_path, const std::string &output_path,
                     std::optional<std::uint64_t> seed_override,
                     std::optional<std::size_t> threads_override)
{
    LinkConfig cfg = load_sweep_config(config_path);
    if (seed_override)
        cfg.seed = *seed_override;
    if (threads_override)
        cfg.threads = *threads_override;

    const std::vector<SweepPoint> points = run_link_sweep(cfg);

    std::ofstream out(output_path);
    if (!out)
        throw ConfigError("cannot open output file '" + output_path + "'");
    write_sweep_csv(out, points, cfg);
    return kExitOk;
}

inline int cmd_validate(const std::string &suite, std::ostream &out, std::uint64_t seed = 1)
{
    const auto results = validation::run_suite(suite, seed);
    validation::print_report(out, suite, results);
    return validation::all_passed(results) ? kExitOk : kExitValidationFailure;
}

struct BenchPoint {
    std::size_t antennas = 0;
    double median_ns = 0.0;
};

/// Times the full denoise pipeline (FFT, sort, scan, shrink, inverse FFT)
/// and reports the median over `reps` calls per size.
inline std::vector<BenchPoint> run_bench(const std::vector<std::size_t> &b_list,
                                         std::size_t reps = 100)
{
    using clock = std::chrono::steady_clock;
    std::vector<BenchPoint> points;
    for (std::size_t b : b_list)
    {
        if (!is_power_of_two(b))
            throw std::invalid_argument("bench: sizes must be powers of two, got " +
                                        std::to_string(b));
        RngStream rng(0xBE5Cu, b);
        const ComplexVector y = draw_cscg(b, 1.0, rng);
        volatile double sink = 0.0; // keep the optimizer honest
        for (int warm = 0; warm < 3; ++warm)
            sink = sink + denoise(y, 0.1).tau_star;
        std::vector<double> times(reps);
        for (std::size_t r = 0; r < reps; ++r)
        {
            const auto start = clock::now();
            sink = sink + denoise(y, 0.1).tau_star;
            const auto stop = clock::now();
            times[r] =
                static_cast<double>(std::chrono::nanoseconds(stop - start).count());
        }
        std::nth_element(times.begin(), times.begin() + reps / 2, times.end());
        points.push_back({b, times[reps / 2]});
    }
    return points;
}

inline int cmd_bench(const std::vector<std::size_t> &b_list, const std::string &output_path,
                     std::size_t reps = 100)
{
    const auto points = run_bench(b_list, reps);
    std::ostringstream csv;
    csv << "B,median_ns_per_denoise\n";
    for (const auto &p : points)
        csv << p.antennas << ',' << format_double(p.median_ns) << '\n';
    if (output_path.empty() || output_path == "-")
    {
        std::cout << csv.str();
    }
    else
    {
        std::ofstream out(output_path);
        if (!out)
            throw ConfigError("cannot open output file '" + output_path + "'");
        out << csv.str();
    }
    return kExitOk;
}

} // namespace beaches::cli

#endif // BEACHES_CLI_HPP
