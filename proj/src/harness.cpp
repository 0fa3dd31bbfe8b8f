// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "lptvsync/estimation.hpp"

namespace lptvsync {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t hyp, std::uint64_t stream) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ trial);
    k = splitmix64(k ^ (hyp + 1));
    return splitmix64(k ^ (stream + 0x51ED27ULL));
}

// Re-throws a library error with the trial index prepended, keeping its type.
[[noreturn]] void rethrow_with_trial(std::uint64_t trial, Hypothesis hyp) {
    const std::string where = "trial " + std::to_string(trial) + " (" + to_string(hyp) + "): ";
    try {
        throw;
    } catch (const DivergenceError& e) {
        throw DivergenceError(where + e.what());
    } catch (const EstimationError& e) {
        throw EstimationError(where + e.what());
    } catch (const LinearAlgebraError& e) {
        throw LinearAlgebraError(where + e.what());
    } catch (const ResourceError& e) {
        throw ResourceError(where + e.what());
    }
}

struct RunningMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
    }
    void merge(const RunningMoments& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    // standardized deviation of the sample mean from `target`
    double z(double target, double n) const {
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        const double se = std::sqrt(var / n);
        const double dev = mean - target;
        if (se == 0.0) return std::abs(dev) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
        return dev / se;
    }
};

// Complex accumulators, one per tracked entry, summed chunk by chunk in a
// fixed order so the result does not depend on scheduling.
struct ComplexMoments {
    std::vector<RunningMoments> re;
    std::vector<RunningMoments> im;
    explicit ComplexMoments(std::size_t n = 0) : re(n), im(n) {}
    void add(std::size_t i, const cplx& v) {
        re[i].add(v.real());
        im[i].add(v.imag());
    }
    void merge(const ComplexMoments& o) {
        for (std::size_t i = 0; i < re.size(); ++i) {
            re[i].merge(o.re[i]);
            im[i].merge(o.im[i]);
        }
    }
};

ValidationCheck finish_check(const std::string& name, const ComplexMoments& acc,
                             const std::vector<cplx>& target, double n, double z_limit) {
    ValidationCheck c;
    c.name = name;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double zr = std::abs(acc.re[i].z(target[i].real(), n));
        const double zi = std::abs(acc.im[i].z(target[i].imag(), n));
        const double z = std::max(zr, zi);
        if (z > c.max_abs_z) {
            c.max_abs_z = z;
            worst = i;
        }
    }
    c.passed = c.max_abs_z <= z_limit;
    std::ostringstream os;
    os << target.size() << " complex entries, max |z| = " << c.max_abs_z << " at entry " << worst;
    c.detail = os.str();
    return c;
}

template <typename Chunk>
std::vector<Chunk> run_chunks(std::uint64_t n_draws, unsigned parallelism, std::uint64_t chunk,
                              const std::function<Chunk(std::uint64_t, std::uint64_t)>& body) {
    const std::uint64_t n_chunks = (n_draws + chunk - 1) / chunk;
    std::vector<Chunk> parts(n_chunks);
    parallel_for(n_chunks, parallelism, [&](std::size_t c) {
        const std::uint64_t begin = c * chunk;
        parts[c] = body(begin, std::min(n_draws, begin + chunk));
    });
    return parts;
}

}  // namespace

WindowRng window_rng(std::uint64_t seed, std::uint64_t trial, Hypothesis hyp) {
    const std::uint64_t h = hyp == Hypothesis::H0 ? 0 : 1;
    return WindowRng{std::mt19937_64(stream_key(seed, trial, h, 0)),
                     std::mt19937_64(stream_key(seed, trial, h, 1))};
}

void parallel_for(std::size_t n, unsigned parallelism, const std::function<void(std::size_t)>& fn) {
    unsigned workers = parallelism ? parallelism : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------

Scenario::Scenario(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      constellation_(cfg_.constellation()),
      channel_(cfg_.channel()),
      noise_shape_(cfg_.noise.model()),
      receiver_shape_(cfg_.receiver_noise ? cfg_.receiver_noise->model() : cfg_.noise.model()),
      geom_(cfg_.geometry()),
      idx_(geom_, constellation_),
      eq_(cfg_.equalizer()),
      sw_(cfg_.sw()) {}

NoiseModel Scenario::noise_at(double snr_db) const {
    return noise_shape_.scaled(
        calibrate_noise_power(channel_, geom_, noise_shape_, constellation_.sigma2(), snr_db));
}

NoiseModel Scenario::receiver_noise_at(double snr_db) const {
    return receiver_shape_.scaled(
        calibrate_noise_power(channel_, geom_, noise_shape_, constellation_.sigma2(), snr_db));
}

std::vector<StatisticSamples> sample_statistics(const Scenario& scenario,
                                                const std::vector<DetectorId>& detectors,
                                                double snr_db, std::uint64_t n_trials,
                                                std::uint64_t seed, const SamplingOptions& opts) {
    if (n_trials == 0) throw StructuralError("n_trials must be at least 1");
    if (detectors.empty()) throw StructuralError("no detectors requested");
    const FrameGeometry& g = scenario.geometry();
    const ScenarioConfig& cfg = scenario.config();
    const NoiseModel noise = scenario.noise_at(snr_db);
    const CMatrix C_inv = invert_covariance(noise_cov_matrix(scenario.receiver_noise_at(snr_db), g.K, g.N));
    const CMatrix B = build_B_matrix(scenario.channel(), g);
    const SyncWord& sw = scenario.sync_word();
    const CandidateIndexing& idx = scenario.indexing();

    const bool need_model = std::any_of(detectors.begin(), detectors.end(), [](DetectorId d) {
        return d == DetectorId::LRT || d == DetectorId::ALRT || d == DetectorId::RALRT;
    });
    const bool need_salrt = std::find(detectors.begin(), detectors.end(), DetectorId::SALRT) != detectors.end();
    std::optional<BlockModel> model;
    if (need_model) {
        if (idx.block_count() > cfg.materialization_cap) {
            throw ResourceError("per-block candidate table exceeds the materialization cap");
        }
        model.emplace(B, C_inv, idx, sw);
    }
    const std::size_t extra = need_salrt ? static_cast<std::size_t>(scenario.equalizer().L_EQ) : 0;

    const std::size_t nd = detectors.size();
    // values[(trial * 2 + hyp) * nd + d]
    std::vector<double> values(static_cast<std::size_t>(n_trials) * 2 * nd);
    parallel_for(static_cast<std::size_t>(n_trials) * 2, opts.parallelism, [&](std::size_t task) {
        const std::uint64_t trial = task / 2;
        const Hypothesis hyp = task % 2 == 0 ? Hypothesis::H0 : Hypothesis::H1;
        try {
            WindowRng rng = window_rng(seed, trial, hyp);
            const ObservationWindow w =
                draw_window(hyp, sw, g, scenario.channel(), noise, scenario.constellation(), rng, extra);
            const CVector r_post = post_process(w.samples, g);
            std::optional<GridSets> grids;
            auto get_grids = [&]() -> const GridSets& {
                if (!grids) grids = build_grid_sets(hard_decision(w.samples, idx), idx, cfg.e_r0, cfg.e_r1);
                return *grids;
            };
            for (std::size_t d = 0; d < nd; ++d) {
                double v = 0.0;
                switch (detectors[d]) {
                    case DetectorId::LRT: v = lrt_log_statistic(r_post, *model); break;
                    case DetectorId::ALRT: v = alrt_statistic(r_post, *model); break;
                    case DetectorId::RALRT: v = ralrt_statistic(r_post, *model, get_grids()); break;
                    case DetectorId::SALRT: {
                        const CMatrix B_hat = estimate_B(w.trailing, scenario.equalizer(),
                                                         scenario.constellation(), g);
                        v = salrt_statistic(r_post, B_hat, C_inv, get_grids(), idx, sw);
                        break;
                    }
                    case DetectorId::Correlator: v = correlator_statistic(w.samples, sw); break;
                }
                if (!std::isfinite(v)) throw LinearAlgebraError("non-finite statistic");
                values[task * nd + d] = v;
            }
        } catch (const Error&) {
            rethrow_with_trial(trial, hyp);
        }
    });

    std::vector<StatisticSamples> out(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        out[d].detector = detectors[d];
        out[d].orientation = orientation_of(detectors[d]);
        out[d].h0.reserve(n_trials);
        out[d].h1.reserve(n_trials);
    }
    for (std::size_t task = 0; task < static_cast<std::size_t>(n_trials) * 2; ++task) {
        const Hypothesis hyp = task % 2 == 0 ? Hypothesis::H0 : Hypothesis::H1;
        for (std::size_t d = 0; d < nd; ++d) {
            const double v = values[task * nd + d];
            (hyp == Hypothesis::H0 ? out[d].h0 : out[d].h1).push_back(v);
            if (opts.on_value) opts.on_value(task / 2, hyp, detectors[d], v);
        }
    }
    return out;
}

StatisticSamples sample_statistics(const Scenario& scenario, DetectorId detector, double snr_db,
                                   std::uint64_t n_trials, std::uint64_t seed,
                                   const SamplingOptions& opts) {
    return sample_statistics(scenario, std::vector<DetectorId>{detector}, snr_db, n_trials, seed, opts)
        .front();
}

// ---------------------------------------------------------------------------

RocCurve empirical_roc(const std::vector<double>& h0, const std::vector<double>& h1,
                       Orientation orientation) {
    if (h0.empty() || h1.empty()) throw StructuralError("ROC needs samples under both hypotheses");
    const double sign = orientation == Orientation::LargeFavorsH1 ? 1.0 : -1.0;
    std::vector<double> s0(h0.size());
    std::vector<double> s1(h1.size());
    std::transform(h0.begin(), h0.end(), s0.begin(), [&](double v) { return sign * v; });
    std::transform(h1.begin(), h1.end(), s1.begin(), [&](double v) { return sign * v; });
    std::sort(s0.begin(), s0.end(), std::greater<>());
    std::sort(s1.begin(), s1.end(), std::greater<>());

    RocCurve curve;
    curve.n_h0 = s0.size();
    curve.n_h1 = s1.size();
    const double n0 = static_cast<double>(s0.size());
    const double n1 = static_cast<double>(s1.size());
    curve.points.push_back({sign * std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    // declare H1 when score >= t; sweep t down through every distinct score
    while (i0 < s0.size() || i1 < s1.size()) {
        double t = -std::numeric_limits<double>::infinity();
        if (i0 < s0.size()) t = std::max(t, s0[i0]);
        if (i1 < s1.size()) t = std::max(t, s1[i1]);
        while (i0 < s0.size() && s0[i0] >= t) ++i0;
        while (i1 < s1.size() && s1[i1] >= t) ++i1;
        curve.points.push_back({sign * t, static_cast<double>(i0) / n0, static_cast<double>(i1) / n1});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.p_fa - a.p_fa) * (a.p_d + b.p_d) / 2.0;
    }
    return area;
}

Histogram make_histogram(const std::vector<double>& values, int bins) {
    if (bins <= 0) throw StructuralError("histogram needs at least one bin");
    if (values.empty()) throw StructuralError("histogram of an empty sample");
    Histogram h;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo_it;
    h.hi = *hi_it;
    if (h.hi <= h.lo) {
        h.lo -= 0.5e-3;
        h.hi += 0.5e-3;
    }
    const double width = (h.hi - h.lo) / bins;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<int>((v - h.lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[b];
    }
    const double n = static_cast<double>(values.size());
    std::size_t cum = 0;
    for (int b = 0; b < bins; ++b) {
        cum += h.counts[b];
        h.pdf.push_back(static_cast<double>(h.counts[b]) / (n * width));
        h.cdf.push_back(static_cast<double>(cum) / n);
    }
    return h;
}

SearchSpec SearchSpec::parse(const std::string& text) {
    SearchSpec s;
    if (text == "exhaustive") {
        s.mode = "exhaustive";
    } else if (text.rfind("sample:", 0) == 0) {
        s.mode = "sample";
        try {
            std::size_t used = 0;
            const long long n = std::stoll(text.substr(7), &used);
            if (used != text.size() - 7 || n <= 0) throw std::invalid_argument("n");
            s.sample_size = static_cast<std::uint64_t>(n);
        } catch (const std::exception&) {
            throw ConfigError("mode", "sample size must be a positive integer");
        }
    } else if (text.rfind("list:", 0) == 0) {
        s.mode = "list";
        std::stringstream ss(text.substr(5));
        std::string word;
        while (std::getline(ss, word, ';')) {
            if (!word.empty()) s.words.push_back(word);
        }
        if (s.words.empty()) throw ConfigError("mode", "list mode needs at least one word");
    } else {
        throw ConfigError("mode", "expected 'exhaustive', 'sample:n' or 'list:w1;w2'");
    }
    return s;
}

std::vector<SyncWord> search_candidates(const Scenario& scenario, const SearchSpec& spec,
                                        std::uint64_t seed) {
    const FrameGeometry& g = scenario.geometry();
    const Constellation& c = scenario.constellation();
    std::vector<SyncWord> out;
    if (spec.mode == "list") {
        for (const auto& w : spec.words) {
            if (w.find_first_of("+-") != std::string::npos) {
                out.push_back(SyncWord::from_bpsk_string(w, c, g));
                continue;
            }
            CVec f;
            std::stringstream ss(w);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                const auto i = std::stoul(tok);
                if (i >= c.size()) throw ConfigError("mode", "symbol index out of range in '" + w + "'");
                f.push_back(c[i]);
            }
            out.emplace_back(std::move(f), c, g);
        }
        return out;
    }
    const std::uint64_t total = ipow(c.size(), static_cast<unsigned>(g.L_sw));
    if (spec.mode == "exhaustive") {
        if (total > scenario.config().materialization_cap) {
            throw ResourceError("exhaustive search over " + std::to_string(total) +
                                " words exceeds the materialization cap");
        }
        out.reserve(total);
        for (std::uint64_t i = 0; i < total; ++i) out.push_back(SyncWord::from_index(i, c, g));
        return out;
    }
    if (spec.mode == "sample") {
        const std::uint64_t n = std::min(spec.sample_size, total);
        std::mt19937_64 rng(stream_key(seed, 0, 7, 2));
        std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
        std::set<std::uint64_t> seen;
        while (out.size() < n) {
            const std::uint64_t i = pick(rng);
            if (seen.insert(i).second) out.push_back(SyncWord::from_index(i, c, g));
        }
        return out;
    }
    throw ConfigError("mode", "unknown search mode '" + spec.mode + "'");
}

SearchResult sw_search(const Scenario& scenario, const std::vector<SyncWord>& candidates,
                       std::uint64_t trials_per_sw, std::uint64_t seed, double snr_db,
                       DetectorId detector, unsigned parallelism,
                       const std::function<void(std::size_t, const AucResult&)>& progress) {
    if (candidates.empty()) throw StructuralError("sync word search needs at least one candidate");
    Scenario local = scenario;
    std::vector<AucResult> results;
    results.reserve(candidates.size());
    SamplingOptions opts;
    opts.parallelism = parallelism;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        local.set_sync_word(candidates[i]);
        // same seed for every candidate: the words are compared on common noise draws
        const StatisticSamples s = sample_statistics(local, detector, snr_db, trials_per_sw, seed, opts);
        AucResult r{candidates[i], auc(empirical_roc(s.h0, s.h1, s.orientation)), trials_per_sw, seed};
        if (progress) progress(i, r);
        results.push_back(std::move(r));
    }
    std::vector<double> aucs;
    aucs.reserve(results.size());
    for (const auto& r : results) aucs.push_back(r.auc);
    SearchResult out;
    out.histogram = make_histogram(aucs, scenario.config().histogram_bins);
    std::stable_sort(results.begin(), results.end(),
                     [](const AucResult& a, const AucResult& b) { return a.auc > b.auc; });
    out.ranked = std::move(results);
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ComplexityRow> complexity_report(const FrameGeometry& g, std::uint64_t q0,
                                             std::uint64_t q1, const EqualizerConfig& eq,
                                             int N_s, std::uint64_t c1, std::uint64_t c2) {
    using u64 = std::uint64_t;
    const u64 M = g.M, N = g.N, K = g.K, L_ch = g.L_ch, L_tot = g.L_tot, L_sw = g.L_sw;
    const u64 ns = static_cast<u64>(N_s);
    const u64 full = ipow(ns, static_cast<unsigned>(L_tot)) + ipow(ns, static_cast<unsigned>(M * L_ch));
    const u64 reduced = q0 + q1;
    const u64 P_h = eq.P_h, J = eq.J, omega = eq.omega, L_EQ = eq.L_EQ;

    const u64 alrt_cm_unit = M * K * (N + 1) + 1;
    const u64 alrt_ca_unit = M * ((N - 1) * K + K - 1);

    std::vector<ComplexityRow> rows;
    rows.push_back({DetectorId::LRT, M * K * (N + K + 1) * full + 1,
                    M * (K * N + (K - 1) * (K + 1)) * full});
    rows.push_back({DetectorId::ALRT, alrt_cm_unit * full + 1, alrt_ca_unit * full + 1});
    rows.push_back({DetectorId::RALRT, alrt_cm_unit * reduced + 1, alrt_ca_unit * reduced + 1});

    const u64 L_est = L_EQ - P_h * L_ch;
    const u64 salrt_cm = (alrt_cm_unit + N * N * N) * reduced + K * N * (K + N) + 1 +
                         P_h * (J - L_ch - 1) * (2 * (L_ch + 1) + 3) +
                         P_h * (L_ch + 2) * ((omega + 1) * (L_ch + 1) + (L_ch + 1) * (L_ch + 1)) +
                         L_est * (ns + L_ch + 1) + (c1 + c2) * L_tot;
    const u64 salrt_ca = (alrt_ca_unit + (N - 1) * N * N + N) * reduced + N * (K - 1) * (K + N) + 1 +
                         P_h * (J - L_ch - 1) * 2 * (L_ch + 1) +
                         P_h * (omega * (L_ch + 1) * (L_ch + 2) + L_ch * (L_ch + 1) + L_ch * L_ch * L_ch) +
                         L_est * (ns + L_ch) + (c1 + c2) * (2 * L_tot - 1);
    rows.push_back({DetectorId::SALRT, salrt_cm, salrt_ca});
    rows.push_back({DetectorId::Correlator, L_sw + 1, L_sw - 1});
    return rows;
}

// ---------------------------------------------------------------------------

bool ValidationReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

ValidationReport run_validation(const Scenario& scenario, std::uint64_t n_draws, std::uint64_t seed,
                                double z_limit, unsigned parallelism) {
    if (n_draws < 2) throw StructuralError("validation needs at least two draws");
    const FrameGeometry& g = scenario.geometry();
    const double snr = scenario.config().validate_snr_db;
    const NoiseModel noise = scenario.noise_at(snr);
    const CMatrix C = noise_cov_matrix(scenario.receiver_noise_at(snr), g.K, g.N);
    const CMatrix B = build_B_matrix(scenario.channel(), g);
    const SyncWord& sw = scenario.sync_word();
    const double n = static_cast<double>(n_draws);
    constexpr std::uint64_t chunk = 1024;
    ValidationReport report;

    // (a) H0 post-processed mean and (b) cross-block second moment
    {
        const std::size_t n_mean = g.L_sw;
        const std::size_t n_cross = g.M > 1 ? static_cast<std::size_t>(g.K * g.K) : 0;
        using Pair = std::pair<ComplexMoments, ComplexMoments>;
        const auto parts = run_chunks<Pair>(n_draws, parallelism, chunk, [&](std::uint64_t b, std::uint64_t e) {
            Pair acc{ComplexMoments(n_mean), ComplexMoments(n_cross)};
            for (std::uint64_t t = b; t < e; ++t) {
                WindowRng rng = window_rng(seed, t, Hypothesis::H0);
                const auto w = draw_window(Hypothesis::H0, sw, g, scenario.channel(), noise,
                                           scenario.constellation(), rng, 0);
                const CVector r = post_process(w.samples, g);
                for (std::size_t i = 0; i < n_mean; ++i) acc.first.add(i, r(static_cast<Eigen::Index>(i)));
                if (n_cross) {
                    for (int a = 0; a < g.K; ++a) {
                        for (int c = 0; c < g.K; ++c) acc.second.add(a * g.K + c, r(a) * std::conj(r(g.K + c)));
                    }
                }
            }
            return acc;
        });
        ComplexMoments mean(n_mean);
        ComplexMoments cross(n_cross);
        for (const auto& p : parts) {
            mean.merge(p.first);
            cross.merge(p.second);
        }
        report.checks.push_back(finish_check("h0_mean", mean, std::vector<cplx>(n_mean), n, z_limit));
        if (n_cross) {
            report.checks.push_back(
                finish_check("h0_cross_block_covariance", cross, std::vector<cplx>(n_cross), n, z_limit));
        }
    }

    // (c) per-block covariance given fixed symbols equals the receiver's C_z
    {
        WindowRng fixed = window_rng(seed ^ 0xC0FFEEULL, 0, Hypothesis::H1);
        const auto ref = draw_window(Hypothesis::H1, sw, g, scenario.channel(), noise,
                                     scenario.constellation(), fixed, 0);
        std::vector<CVector> mean_blocks;
        for (int m = 0; m < g.M; ++m) {
            CVector a(g.N);
            for (int k = 0; k < g.N; ++k) a(k) = ref.symbols[m * g.N + k];
            mean_blocks.push_back(B * a);
        }
        const std::size_t n_cov = static_cast<std::size_t>(g.M * g.K * g.K);
        const auto parts = run_chunks<ComplexMoments>(n_draws, parallelism, chunk, [&](std::uint64_t b, std::uint64_t e) {
            ComplexMoments acc(n_cov);
            for (std::uint64_t t = b; t < e; ++t) {
                // symbols from the fixed reference stream, fresh noise per draw
                WindowRng same = window_rng(seed ^ 0xC0FFEEULL, 0, Hypothesis::H1);
                same.noise = window_rng(seed, t, Hypothesis::H1).noise;
                const auto w = draw_window(Hypothesis::H1, sw, g, scenario.channel(), noise,
                                           scenario.constellation(), same, 0);
                const CVector r = post_process(w.samples, g);
                for (int m = 0; m < g.M; ++m) {
                    const CVector e_m = r.segment(m * g.K, g.K) - mean_blocks[m];
                    for (int a = 0; a < g.K; ++a) {
                        for (int c = 0; c < g.K; ++c) {
                            acc.add(static_cast<std::size_t>((m * g.K + a) * g.K + c), e_m(a) * std::conj(e_m(c)));
                        }
                    }
                }
            }
            return acc;
        });
        ComplexMoments cov(n_cov);
        for (const auto& p : parts) cov.merge(p);
        std::vector<cplx> target(n_cov);
        for (int m = 0; m < g.M; ++m) {
            for (int a = 0; a < g.K; ++a) {
                for (int c = 0; c < g.K; ++c) target[(m * g.K + a) * g.K + c] = C(a, c);
            }
        }
        report.checks.push_back(finish_check("conditional_covariance", cov, target, n, z_limit));
    }

    // (d) generated noise is proper: E{z[t+l] z[t]} = 0
    {
        const int L = g.L_tot;
        const int lags = noise.memory() + 1;
        const std::size_t n_pseudo = static_cast<std::size_t>(L * lags);
        const auto parts = run_chunks<ComplexMoments>(n_draws, parallelism, chunk, [&](std::uint64_t b, std::uint64_t e) {
            ComplexMoments acc(n_pseudo);
            for (std::uint64_t t = b; t < e; ++t) {
                WindowRng rng = window_rng(seed ^ 0x9E37ULL, t, Hypothesis::H0);
                const CVec z = generate_acgn(noise, static_cast<std::size_t>(L + lags), rng.noise,
                                             -(static_cast<long long>(L) - 1));
                for (int i = 0; i < L; ++i) {
                    for (int l = 0; l < lags; ++l) acc.add(static_cast<std::size_t>(i * lags + l), z[i + l] * z[i]);
                }
            }
            return acc;
        });
        ComplexMoments pseudo(n_pseudo);
        for (const auto& p : parts) pseudo.merge(p);
        report.checks.push_back(
            finish_check("noise_pseudo_autocorrelation", pseudo, std::vector<cplx>(n_pseudo), n, z_limit));
    }
    return report;
}

}  // namespace lptvsync
