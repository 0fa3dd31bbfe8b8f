// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo evaluation: statistic sampling under both hypotheses,
// empirical ROC/AUC, synchronization-word search, closed-form complexity
// tables and the statistical model checks.
//
// Every window draws from its own generators keyed by (seed, trial,
// hypothesis, stream), so results do not depend on the worker count.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lptvsync/config.hpp"
#include "lptvsync/detectors.hpp"

namespace lptvsync {

/// Deterministic per-window generators.
WindowRng window_rng(std::uint64_t seed, std::uint64_t trial, Hypothesis hyp);

/// Runs fn(i) for i in [0, n) on up to `parallelism` threads (0 = hardware).
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned parallelism, const std::function<void(std::size_t)>& fn);

/// Runtime view of a scenario: channel, geometry, candidate maps and the
/// receiver model at one SNR.
class Scenario {
public:
    explicit Scenario(ScenarioConfig cfg);

    const ScenarioConfig& config() const noexcept { return cfg_; }
    const Constellation& constellation() const noexcept { return constellation_; }
    const LptvChannel& channel() const noexcept { return channel_; }
    const FrameGeometry& geometry() const noexcept { return geom_; }
    const CandidateIndexing& indexing() const noexcept { return idx_; }
    const EqualizerConfig& equalizer() const noexcept { return eq_; }
    const SyncWord& sync_word() const noexcept { return sw_; }
    void set_sync_word(const SyncWord& sw) { sw_ = sw; }

    /// Generating noise scaled so that the SNR equals snr_db.
    NoiseModel noise_at(double snr_db) const;
    /// Noise model assumed by the receiver at snr_db (same scale factor).
    NoiseModel receiver_noise_at(double snr_db) const;

private:
    ScenarioConfig cfg_;
    Constellation constellation_;
    LptvChannel channel_;
    NoiseModel noise_shape_;
    NoiseModel receiver_shape_;
    FrameGeometry geom_;
    CandidateIndexing idx_;
    EqualizerConfig eq_;
    SyncWord sw_;
};

struct StatisticSamples {
    DetectorId detector = DetectorId::LRT;
    Orientation orientation = Orientation::LargeFavorsH0;
    std::vector<double> h0;
    std::vector<double> h1;
};

struct SamplingOptions {
    unsigned parallelism = 0;
    /// Optional per-window hook (trial, truth, detector, value); called from
    /// the aggregating thread in trial order.
    std::function<void(std::uint64_t, Hypothesis, DetectorId, double)> on_value;
};

/// Evaluates every requested detector on the same n_trials windows per hypothesis.
std::vector<StatisticSamples> sample_statistics(const Scenario& scenario,
                                                const std::vector<DetectorId>& detectors,
                                                double snr_db, std::uint64_t n_trials,
                                                std::uint64_t seed,
                                                const SamplingOptions& opts = {});

StatisticSamples sample_statistics(const Scenario& scenario, DetectorId detector, double snr_db,
                                   std::uint64_t n_trials, std::uint64_t seed,
                                   const SamplingOptions& opts = {});

struct RocPoint {
    double threshold;  // in the statistic's own units
    double p_fa;
    double p_d;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) to (1,1)
    std::size_t n_h0 = 0;
    std::size_t n_h1 = 0;
};

RocCurve empirical_roc(const std::vector<double>& h0, const std::vector<double>& h1,
                       Orientation orientation);
double auc(const RocCurve& curve);

struct AucResult {
    SyncWord sw;
    double auc = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
    std::vector<double> pdf;  // density, integrates to 1
    std::vector<double> cdf;  // value at the upper bin edge
};

Histogram make_histogram(const std::vector<double>& values, int bins);

struct SearchResult {
    std::vector<AucResult> ranked;  // descending AUC, ties by candidate order
    Histogram histogram;
};

/// Candidate modes: "exhaustive", "sample:n", or "list:w1;w2;..." where each
/// word is a +1/-1 string or a comma-separated list of symbol indices.
struct SearchSpec {
    std::string mode = "exhaustive";
    std::uint64_t sample_size = 0;
    std::vector<std::string> words;
    static SearchSpec parse(const std::string& text);
};

std::vector<SyncWord> search_candidates(const Scenario& scenario, const SearchSpec& spec,
                                        std::uint64_t seed);

SearchResult sw_search(const Scenario& scenario, const std::vector<SyncWord>& candidates,
                       std::uint64_t trials_per_sw, std::uint64_t seed, double snr_db,
                       DetectorId detector = DetectorId::SALRT, unsigned parallelism = 0,
                       const std::function<void(std::size_t, const AucResult&)>& progress = {});

struct ComplexityRow {
    DetectorId detector;
    std::uint64_t cm;
    std::uint64_t ca;
};

/// Closed-form multiplication/addition counts per detector.
std::vector<ComplexityRow> complexity_report(const FrameGeometry& geom, std::uint64_t q0,
                                             std::uint64_t q1, const EqualizerConfig& eq,
                                             int N_s, std::uint64_t c1, std::uint64_t c2);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double max_abs_z = 0.0;  // worst standardized deviation
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const noexcept;
};

/// Monte-Carlo property suite: H0 mean, H0 cross-block covariance,
/// conditional block covariance against the receiver's C_z, and noise
/// pseudo-autocorrelation. Each check fails on any deviation above z_limit.
ValidationReport run_validation(const Scenario& scenario, std::uint64_t n_draws,
                                std::uint64_t seed, double z_limit = 5.0,
                                unsigned parallelism = 0);

}  // namespace lptvsync
