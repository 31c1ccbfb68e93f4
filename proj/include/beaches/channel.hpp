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
// Parametric plane-wave channel generation for a uniform linear array and a
// pilot-observation model. Scenario sampling provides two qualitative
// shapes: an LoS-like profile with one dominant path plus two weak
// reflections, and an nLoS-like profile with many comparable paths spread
// over angle. Channels are normalized to unit average per-antenna gain
// (||h||^2 = B), modeling ideal power control.

#ifndef BEACHES_CHANNEL_HPP
#define BEACHES_CHANNEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beaches/numerics.hpp"

namespace beaches {

struct PathComponent {
    Complex gain;       // complex path gain
    double omega = 0.0; // spatial frequency in [0, 2*pi), radians per antenna
};

enum class ScenarioLabel { LosLike, NLosLike };

inline const char *to_string(ScenarioLabel label)
{
    return label == ScenarioLabel::LosLike ? "LoS-like" : "nLoS-like";
}

inline ScenarioLabel scenario_label_from_string(const std::string &s)
{
    if (s == "LoS-like" || s == "los")
        return ScenarioLabel::LosLike;
    if (s == "nLoS-like" || s == "nlos")
        return ScenarioLabel::NLosLike;
    throw std::invalid_argument("unknown scenario label '" + s +
                                "' (expected 'los'/'LoS-like' or 'nlos'/'nLoS-like')");
}

struct ChannelScenario {
    std::vector<PathComponent> paths;
    std::size_t antennas = 0; // B
    ScenarioLabel label = ScenarioLabel::LosLike;
};

/// Pilot model: thermal noise variance n0 and total transmit power rho^2.
/// The per-entry channel estimation error variance is e0() = n0 / rho2.
struct PilotModel {
    double n0 = 0.0;
    double rho2 = 1.0;

    double e0() const { return n0 / rho2; }
};

/// Steering vector a(omega): entry b equals exp(j*b*omega), b = 0..B-1.
inline ComplexVector steering_vector(double omega, std::size_t antennas)
{
    if (antennas == 0)
        throw std::invalid_argument("steering_vector: antenna count must be positive");
    ComplexVector a(antennas);
    for (std::size_t b = 0; b < antennas; ++b)
        a[b] = std::polar(1.0, omega * static_cast<double>(b));
    return a;
}

/// Superposition of steering vectors weighted by the path gains.
inline ComplexVector synthesize_channel(const ChannelScenario &scenario)
{
    if (scenario.paths.empty())
        throw std::invalid_argument("synthesize_channel: scenario must have at least one path");
    if (scenario.antennas == 0)
        throw std::invalid_argument("synthesize_channel: antenna count must be positive");
    ComplexVector h(scenario.antennas, Complex{0.0, 0.0});
    for (const auto &path : scenario.paths)
    {
        for (std::size_t b = 0; b < scenario.antennas; ++b)
            h[b] += path.gain * std::polar(1.0, path.omega * static_cast<double>(b));
    }
    return h;
}

/**
 * Draws a random scenario of the requested shape.
 *
 * LoS-like: 3 paths, one dominant (carrying roughly 90% of the path power)
 * and two reflections 10-20 dB weaker, angles uniform (off-grid almost
 * surely). nLoS-like: 8-16 paths with i.i.d. complex Gaussian gains. The
 * gains are rescaled so that the synthesized channel has ||h||^2 = B
 * exactly.
 */
inline ChannelScenario sample_scenario(ScenarioLabel label, std::size_t antennas, RngStream &rng)
{
    if (antennas == 0)
        throw std::invalid_argument("sample_scenario: antenna count must be positive");

    ChannelScenario scenario;
    scenario.antennas = antennas;
    scenario.label = label;

    for (;;)
    {
        scenario.paths.clear();
        if (label == ScenarioLabel::LosLike)
        {
            if (antennas < 3)
                throw std::invalid_argument("sample_scenario: LoS-like shape needs B >= 3 (L = 3)");
            // Reflection-to-LoS power ratios, uniform in [-20, -10] dB.
            const double r1 = std::pow(10.0, -(10.0 + 10.0 * rng.uniform()) / 10.0);
            const double r2 = std::pow(10.0, -(10.0 + 10.0 * rng.uniform()) / 10.0);
            const double p_los = 1.0 / (1.0 + r1 + r2);
            const double powers[3] = {p_los, p_los * r1, p_los * r2};
            for (double p : powers)
            {
                PathComponent path;
                path.gain = std::polar(std::sqrt(p), 2.0 * M_PI * rng.uniform());
                path.omega = 2.0 * M_PI * rng.uniform();
                scenario.paths.push_back(path);
            }
        }
        else
        {
            // L uniform in [8, 16], clamped so L <= B holds on small arrays
            const std::size_t lo = std::min<std::size_t>(8, antennas);
            const std::size_t hi = std::min<std::size_t>(16, antennas);
            const std::size_t n_paths = lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
            for (std::size_t l = 0; l < n_paths; ++l)
            {
                PathComponent path;
                path.gain = rng.cscg(1.0);
                path.omega = 2.0 * M_PI * rng.uniform();
                scenario.paths.push_back(path);
            }
        }

        // Exact unit-power normalization: scale gains so ||h||^2 = B.
        const ComplexVector h = synthesize_channel(scenario);
        double energy = 0.0;
        for (const auto &v : h)
            energy += std::norm(v);
        if (energy > 1e-12 * static_cast<double>(antennas))
        {
            const double scale = std::sqrt(static_cast<double>(antennas) / energy);
            for (auto &path : scenario.paths)
                path.gain *= scale;
            return scenario;
        }
        // Degenerate cancellation; redraw (deterministic given the stream).
    }
}

/// Noisy pilot observation y = h + e with e ~ CN(0, E0 I), E0 = n0/rho2.
inline ComplexVector observe_pilot(const ComplexVector &h, const PilotModel &pilot, RngStream &rng)
{
    if (pilot.n0 < 0.0 || pilot.rho2 <= 0.0)
        throw std::invalid_argument("observe_pilot: need n0 >= 0 and rho2 > 0");
    ComplexVector y = h;
    const double e0 = pilot.e0();
    for (auto &v : y)
        v += rng.cscg(e0);
    return y;
}

/// Scenario serialization for reproducible regression fixtures.
inline nlohmann::json scenario_to_json(const ChannelScenario &scenario)
{
    nlohmann::json j;
    j["B"] = scenario.antennas;
    j["label"] = to_string(scenario.label);
    j["L"] = scenario.paths.size();
    auto &alpha = j["alpha"] = nlohmann::json::array();
    auto &omega = j["omega"] = nlohmann::json::array();
    for (const auto &path : scenario.paths)
    {
        alpha.push_back({path.gain.real(), path.gain.imag()});
        omega.push_back(path.omega);
    }
    return j;
}

inline ChannelScenario scenario_from_json(const nlohmann::json &j)
{
    ChannelScenario scenario;
    scenario.antennas = j.at("B").get<std::size_t>();
    scenario.label = scenario_label_from_string(j.at("label").get<std::string>());
    const auto &alpha = j.at("alpha");
    const auto &omega = j.at("omega");
    if (alpha.size() != omega.size() || alpha.size() != j.at("L").get<std::size_t>())
        throw std::invalid_argument("scenario_from_json: inconsistent path counts");
    for (std::size_t l = 0; l < alpha.size(); ++l)
    {
        PathComponent path;
        path.gain = Complex{alpha[l][0].get<double>(), alpha[l][1].get<double>()};
        path.omega = omega[l].get<double>();
        if (!(path.omega >= 0.0) || path.omega >= 2.0 * M_PI)
            throw std::invalid_argument("scenario_from_json: omega must lie in [0, 2*pi)");
        if (!std::isfinite(std::abs(path.gain)))
            throw std::invalid_argument("scenario_from_json: gains must be finite");
        scenario.paths.push_back(path);
    }
    if (scenario.paths.empty() || scenario.paths.size() > scenario.antennas)
        throw std::invalid_argument("scenario_from_json: need 1 <= L <= B");
    return scenario;
}

} // namespace beaches

#endif // BEACHES_CHANNEL_HPP
