// SPDX-License-Identifier: Apache-2.0
//
// beaches: adaptive beamspace channel denoising for massive MIMO systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "beaches/cli.hpp"

int main(int argc, char **argv)
{
    CLI::App app{"beaches: adaptive SURE-threshold beamspace channel denoising toolkit"};
    app.require_subcommand(1);

    // denoise
    std::string den_input, den_output, den_variant = "exact";
    double den_e0 = 0.0;
    auto *den = app.add_subcommand("denoise", "denoise one channel vector (CSV of re,im rows)");
    den->add_option("input", den_input, "input CSV, one re,im row per antenna")->required();
    den->add_option("--e0", den_e0, "estimation-error variance per complex entry")->required();
    den->add_option("--variant", den_variant, "threshold search variant")
        ->check(CLI::IsMember({"exact", "hw"}));
    den->add_option("--out", den_output, "output CSV path")->required();

    // sweep
    std::string sweep_config, sweep_output;
    std::optional<std::uint64_t> sweep_seed;
    std::optional<std::size_t> sweep_threads;
    auto *sweep = app.add_subcommand("sweep", "run a link-level BER/MSE sweep from a JSON config");
    sweep->add_option("--config", sweep_config, "JSON config file")->required();
    sweep->add_option("--out", sweep_output, "output CSV path")->required();
    sweep->add_option("--seed", sweep_seed, "override the config seed");
    sweep->add_option("--threads", sweep_threads, "worker threads (results are unaffected)");

    // validate
    std::string suite;
    std::uint64_t validate_seed = 1;
    auto *validate = app.add_subcommand("validate", "run a seeded property suite");
    validate->add_option("suite", suite, "one of: sure, scan, fft, fixedpoint, linksim")
        ->required();
    validate->add_option("--seed", validate_seed, "suite seed");

    // bench
    std::vector<std::size_t> bench_sizes{256, 512, 1024, 2048, 4096, 8192};
    std::string bench_output = "-";
    std::size_t bench_reps = 100;
    auto *bench = app.add_subcommand("bench", "time the denoise pipeline across vector sizes");
    bench->add_option("--b", bench_sizes, "antenna counts to time (powers of two)");
    bench->add_option("--reps", bench_reps, "timed calls per size")->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_output, "output CSV path ('-' for stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return beaches::cli::kExitConfigError;
    }

    try
    {
        if (den->parsed())
            return beaches::cli::cmd_denoise(den_input, den_e0, den_variant, den_output);
        if (sweep->parsed())
            return beaches::cli::cmd_sweep(sweep_config, sweep_output, sweep_seed, sweep_threads);
        if (validate->parsed())
            return beaches::cli::cmd_validate(suite, std::cout, validate_seed);
        if (bench->parsed())
            return beaches::cli::cmd_bench(bench_sizes, bench_output, bench_reps);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return beaches::cli::kExitConfigError;
    }
    return beaches::cli::kExitConfigError;
}
