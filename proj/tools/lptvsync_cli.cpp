// SPDX-License-Identifier: Apache-2.0
//
// lptvsync command-line front end.
//
//   lptvsync roc --config scenarios/scenario1.json --out roc.csv
//   lptvsync search-sw --config ... --mode sample:100 --out search
//   lptvsync complexity --config ... --out complexity.csv
//   lptvsync validate --config ...
//   lptvsync estimate-channel --config ...
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical error,
// 4 validation failure.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lptvsync/config.hpp"
#include "lptvsync/estimation.hpp"
#include "lptvsync/harness.hpp"

using namespace lptvsync;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string detectors;
    unsigned parallelism = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_detectors) {
    cmd->add_option("--config", o.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
    cmd->add_option("--seed", o.seed, "Override the master seed");
    cmd->add_option("--trials", o.trials, "Override the trial count");
    cmd->add_option("--parallelism", o.parallelism, "Worker threads (0 = all cores)");
    if (with_detectors) {
        cmd->add_option("--detectors", o.detectors, "Comma-separated detector list (default: all)");
    }
}

// Writes to a file when a path is given, to stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ConfigError("--out", "cannot open '" + path + "' for writing");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<DetectorId> parse_detector_list(const std::string& text) {
    if (text.empty()) return all_detectors();
    std::vector<DetectorId> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_detector(tok));
    }
    if (out.empty()) throw ConfigError("--detectors", "empty detector list");
    return out;
}

std::string format_threshold(double t) {
    if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << t;
    return os.str();
}

int cmd_roc(const CommonOptions& o, const std::vector<double>& snr_override, const std::string& dump) {
    ScenarioConfig cfg = parse_config(o.config);
    std::cerr << "scenario " << cfg.name << ": " << describe_derived(cfg) << "\n";
    const Scenario sc(cfg);
    const auto detectors = parse_detector_list(o.detectors);
    const std::vector<double> snrs = snr_override.empty() ? cfg.snr_db : snr_override;
    if (snrs.empty()) throw ConfigError("snr_db", "no SNR values to evaluate");
    const std::uint64_t trials = o.trials.value_or(cfg.trials_roc);
    const std::uint64_t seed = o.seed.value_or(cfg.seed);

    Sink sink(o.out);
    std::unique_ptr<std::ofstream> dump_file;
    if (!dump.empty()) {
        dump_file = std::make_unique<std::ofstream>(dump);
        if (!*dump_file) throw ConfigError("--dump-stats", "cannot open '" + dump + "'");
        *dump_file << "snr_db,window_id,truth,detector,value\n" << std::setprecision(17);
    }
    sink.os() << "detector,snr_db,threshold,p_fa,p_d\n" << std::setprecision(12);
    for (double snr : snrs) {
        SamplingOptions opts;
        opts.parallelism = o.parallelism;
        if (dump_file) {
            opts.on_value = [&](std::uint64_t t, Hypothesis h, DetectorId d, double v) {
                *dump_file << snr << ',' << t << ',' << to_string(h) << ',' << to_string(d) << ',' << v << '\n';
            };
        }
        const auto samples = sample_statistics(sc, detectors, snr, trials, seed, opts);
        for (const auto& s : samples) {
            const RocCurve curve = empirical_roc(s.h0, s.h1, s.orientation);
            for (const auto& p : curve.points) {
                sink.os() << to_string(s.detector) << ',' << snr << ',' << format_threshold(p.threshold) << ','
                          << p.p_fa << ',' << p.p_d << '\n';
            }
            std::cerr << "snr " << snr << " dB  " << std::setw(10) << to_string(s.detector)
                      << "  AUC " << std::fixed << std::setprecision(4) << auc(curve) << std::defaultfloat
                      << "  (" << trials << " trials/hypothesis)\n";
        }
    }
    return 0;
}

int cmd_search(const CommonOptions& o, const std::string& mode, std::optional<double> snr_opt,
               const std::string& detector_name) {
    ScenarioConfig cfg = parse_config(o.config);
    const Scenario sc(cfg);
    const SearchSpec spec = SearchSpec::parse(mode);
    const std::uint64_t seed = o.seed.value_or(cfg.seed);
    const std::uint64_t trials = o.trials.value_or(cfg.trials_search);
    const double snr = snr_opt.value_or(cfg.search_snr_db);
    const DetectorId det = parse_detector(detector_name);
    const auto candidates = search_candidates(sc, spec, seed);
    std::cerr << "searching " << candidates.size() << " sync words at " << snr << " dB, " << trials
              << " trials/hypothesis each\n";

    const SearchResult res = sw_search(sc, candidates, trials, seed, snr, det, o.parallelism,
                                       [&](std::size_t i, const AucResult&) {
                                           if ((i + 1) % 256 == 0) std::cerr << "  " << (i + 1) << " done\n";
                                       });

    const std::string prefix = o.out.empty() ? "" : o.out;
    {
        Sink lines(prefix.empty() ? "" : prefix + ".jsonl");
        for (const auto& r : res.ranked) {
            nlohmann::json j{{"sw", r.sw.to_string()}, {"auc", r.auc}, {"trials", r.trials}, {"seed", r.seed}};
            lines.os() << j.dump() << '\n';
        }
    }
    if (!prefix.empty()) {
        std::ofstream hist(prefix + "_hist.csv");
        if (!hist) throw ConfigError("--out", "cannot write histogram file");
        const Histogram& h = res.histogram;
        const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        hist << "bin_lo,bin_hi,count,pdf,cdf\n" << std::setprecision(12);
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            hist << h.lo + b * width << ',' << h.lo + (b + 1) * width << ',' << h.counts[b] << ','
                 << h.pdf[b] << ',' << h.cdf[b] << '\n';
        }
    }
    const auto& best = res.ranked.front();
    const auto& worst = res.ranked.back();
    std::cerr << "best  " << best.sw.to_string() << "  AUC " << best.auc << "\n"
              << "worst " << worst.sw.to_string() << "  AUC " << worst.auc << "\n";
    return 0;
}

int cmd_complexity(const CommonOptions& o, std::uint64_t c1, std::uint64_t c2) {
    const ScenarioConfig cfg = parse_config(o.config);
    const FrameGeometry g = cfg.geometry();
    const int ns = static_cast<int>(cfg.constellation().size());
    const std::uint64_t q0 = ipow(grid_block_size(g.N, cfg.e_r0, ns), static_cast<unsigned>(g.M));
    const std::uint64_t q1 = ipow(grid_block_size(g.L_ch, cfg.e_r1, ns), static_cast<unsigned>(g.M));
    Sink sink(o.out);
    sink.os() << "detector,cm,ca\n";
    for (const auto& row : complexity_report(g, q0, q1, cfg.equalizer(), ns, c1, c2)) {
        sink.os() << to_string(row.detector) << ',' << row.cm << ',' << row.ca << '\n';
    }
    std::cerr << "|Q0|=" << q0 << " |Q1|=" << q1 << " omega=" << cfg.equalizer().omega << "\n";
    return 0;
}

int cmd_validate(const CommonOptions& o) {
    const ScenarioConfig cfg = parse_config(o.config);
    const Scenario sc(cfg);
    const std::uint64_t draws = o.trials.value_or(cfg.trials_validate);
    const ValidationReport rep = run_validation(sc, draws, o.seed.value_or(cfg.seed), 5.0, o.parallelism);
    Sink sink(o.out);
    for (const auto& c : rep.checks) {
        sink.os() << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    sink.os() << (rep.passed() ? "validation passed" : "validation FAILED") << " (" << draws << " draws)\n";
    return rep.passed() ? 0 : kExitValidation;
}

int cmd_estimate(const CommonOptions& o, std::optional<double> snr_opt) {
    const ScenarioConfig cfg = parse_config(o.config);
    const Scenario sc(cfg);
    const FrameGeometry& g = sc.geometry();
    const EqualizerConfig& eq = sc.equalizer();
    const double snr = snr_opt.value_or(cfg.snr_db.empty() ? 0.0 : cfg.snr_db.front());
    WindowRng rng = window_rng(o.seed.value_or(cfg.seed), 0, Hypothesis::H1);
    const auto w = draw_window(Hypothesis::H1, sc.sync_word(), g, sc.channel(), sc.noise_at(snr),
                               sc.constellation(), rng, static_cast<std::size_t>(eq.L_EQ));
    const EqualizerState st = cma_train(w.trailing, eq);
    const SlicedSymbols s = equalize_and_slice(w.trailing, st, eq, sc.constellation());
    const auto h_hat = lsse_cir(w.trailing, s, eq);

    std::size_t agree = 0;
    for (std::size_t i = 0; i < s.symbols.size(); ++i) {
        if (std::abs(s.symbols[i] - w.trailing_symbols[s.first_time - 1 + static_cast<long long>(i)]) < 1e-9) ++agree;
    }
    Sink sink(o.out);
    auto& os = sink.os();
    os << "snr_db " << snr << "  " << describe_derived(cfg) << "\n";
    os << "symbol agreement " << agree << "/" << s.symbols.size() << "\n";
    os << std::setprecision(6);
    for (int i = 0; i < g.P_h; ++i) {
        double err = 0.0;
        double ref = 0.0;
        os << "phase " << i << " (h[-" << i << "])\n";
        for (int l = 0; l <= g.L_ch; ++l) {
            const cplx t = sc.channel().tap(-i, l);
            const cplx e = h_hat[i][l];
            err += std::norm(e - t);
            ref += std::norm(t);
            os << "  tap " << l << "  est " << e << "  true " << t << "\n";
        }
        os << "  nmse " << err / ref << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frame-synchronization detectors for periodically time-varying channels"};
    app.require_subcommand(1);

    CommonOptions roc_o, search_o, cx_o, val_o, est_o;
    std::vector<double> roc_snr;
    std::string dump;
    auto* roc = app.add_subcommand("roc", "Empirical ROC curves per detector and SNR");
    add_common(roc, roc_o, true);
    roc->add_option("--snr", roc_snr, "Override the SNR list (dB)");
    roc->add_option("--dump-stats", dump, "Write per-window statistics CSV");

    std::string mode = "sample:100";
    std::optional<double> search_snr;
    std::string search_det = "salrt";
    auto* search = app.add_subcommand("search-sw", "Rank sync words by AUC");
    add_common(search, search_o, false);
    search->add_option("--mode", mode, "exhaustive | sample:n | list:w1;w2");
    search->add_option("--snr", search_snr, "SNR in dB (default: search_snr_db)");
    search->add_option("--detector", search_det, "Detector used for ranking");

    std::uint64_t c1 = 1;
    std::uint64_t c2 = 1;
    auto* cx = app.add_subcommand("complexity", "Closed-form multiplication/addition counts");
    add_common(cx, cx_o, false);
    cx->add_option("--c1", c1, "Constellation constant c1");
    cx->add_option("--c2", c2, "Constellation constant c2");

    auto* val = app.add_subcommand("validate", "Monte-Carlo statistical model checks");
    add_common(val, val_o, false);

    std::optional<double> est_snr;
    auto* est = app.add_subcommand("estimate-channel", "Run the blind channel estimator once");
    add_common(est, est_o, false);
    est->add_option("--snr", est_snr, "SNR in dB (default: first snr_db entry)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*roc) return cmd_roc(roc_o, roc_snr, dump);
        if (*search) return cmd_search(search_o, mode, search_snr, search_det);
        if (*cx) return cmd_complexity(cx_o, c1, c2);
        if (*val) return cmd_validate(val_o);
        if (*est) return cmd_estimate(est_o, est_snr);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StructuralError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
