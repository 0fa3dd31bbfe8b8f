// SPDX-License-Identifier: Apache-2.0
//
// Scenario description loaded from JSON. Every structural invariant is
// re-validated on load; violations raise ConfigError naming the field.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lptvsync/channel.hpp"
#include "lptvsync/cyclostat.hpp"
#include "lptvsync/detectors.hpp"
#include "lptvsync/estimation.hpp"
#include "lptvsync/frame.hpp"

namespace lptvsync {

struct NoiseSpec {
    std::vector<double> variance_profile{1.0};
    std::vector<double> shaping_fir{1.0};

    NoiseModel model() const { return NoiseModel(variance_profile, shaping_fir); }
    bool operator==(const NoiseSpec&) const = default;
};

struct ScenarioConfig {
    std::string name;
    std::string constellation_name;  // "bpsk", "qpsk" or "custom"
    CVec constellation_symbols;
    int N = 0;
    int M = 0;
    std::vector<CVec> channel_taps;
    NoiseSpec noise;
    /// Noise model the receiver assumes; defaults to the generating model.
    std::optional<NoiseSpec> receiver_noise;
    std::vector<std::size_t> sync_word;  // constellation indices, stored order
    int e_r0 = 0;
    int e_r1 = 0;
    std::uint64_t materialization_cap = std::uint64_t{1} << 20;
    double delta_p = 1e-3;
    int L_EQ = 0;
    std::optional<int> omega;
    std::vector<double> snr_db;
    double search_snr_db = -5.0;
    double validate_snr_db = 0.0;
    std::uint64_t trials_roc = 200000;
    std::uint64_t trials_search = 3000;
    std::uint64_t trials_validate = 100000;
    int histogram_bins = 50;
    std::uint64_t seed = 1;

    // derived on load
    Constellation constellation() const { return Constellation(constellation_symbols); }
    LptvChannel channel() const { return LptvChannel(channel_taps); }
    FrameGeometry geometry() const;
    SyncWord sw() const;
    EqualizerConfig equalizer() const;

    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

/// Human-readable echo of the derived quantities.
std::string describe_derived(const ScenarioConfig& cfg);

}  // namespace lptvsync
