// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit tests.

#pragma once

#include <cmath>
#include <random>
#include <string>

#include "lptvsync/config.hpp"
#include "lptvsync/harness.hpp"

namespace testsupport {

inline std::string scenario_path(const std::string& name) {
    return std::string(LPTVSYNC_SCENARIO_DIR) + "/" + name + ".json";
}

inline lptvsync::ScenarioConfig load(const std::string& name) {
    return lptvsync::parse_config(scenario_path(name));
}

inline lptvsync::CVec random_cvec(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    lptvsync::CVec v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline lptvsync::LptvChannel scenario1_channel() {
    return lptvsync::LptvChannel(std::vector<lptvsync::CVec>{{{1.05, -0.82}, {0.71, 0.45}, {0.63, -0.72}}});
}

inline lptvsync::LptvChannel scenario2_channel() {
    return lptvsync::LptvChannel(std::vector<lptvsync::CVec>{{{1.05, -0.82}, {0.71, 0.45}, {0.63, -0.72}},
                                  {{0.53, 0.62}, {0.41, 0.37}, {0.20, -0.34}}});
}

inline lptvsync::NoiseModel scenario1_noise() {
    return lptvsync::NoiseModel({1.0}, {0.83366910392383942, 0.41892744020911332, 0.35985500552675725});
}

inline lptvsync::NoiseModel scenario2_noise() {
    std::vector<double> v(8);
    for (int m = 0; m < 8; ++m) v[m] = 2.0 + std::cos(2.0 * 3.14159265358979323846 * m / 8.0);
    return lptvsync::NoiseModel(v, {0.6, 0.2, 0.066});
}

}  // namespace testsupport
