// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "lptvsync/harness.hpp"
#include "support.hpp"

using namespace lptvsync;

namespace {

// Mann-Whitney estimate of P(score1 > score0) with ties counted half.
double rank_auc(const std::vector<double>& h0, const std::vector<double>& h1) {
    double wins = 0.0;
    for (double a : h1) {
        for (double b : h0) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    }
    return wins / (double(h0.size()) * double(h1.size()));
}

void check_curve_shape(const RocCurve& c) {
    REQUIRE(!c.points.empty());
    CHECK(c.points.front().p_fa == 0.0);
    CHECK(c.points.front().p_d == 0.0);
    CHECK(c.points.back().p_fa == 1.0);
    CHECK(c.points.back().p_d == 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        CHECK(c.points[i].p_fa >= c.points[i - 1].p_fa);
        CHECK(c.points[i].p_d >= c.points[i - 1].p_d);
    }
}

}  // namespace

TEST_CASE("empirical ROC") {
    SUBCASE("perfect separation") {
        const RocCurve c = empirical_roc({1.0, 2.0}, {3.0, 4.0}, Orientation::LargeFavorsH1);
        check_curve_shape(c);
        bool corner = false;
        for (const auto& p : c.points) corner = corner || (p.p_fa == 0.0 && p.p_d == 1.0);
        CHECK(corner);
        CHECK(auc(c) == 1.0);
    }
    SUBCASE("identical samples sit on the diagonal") {
        const std::vector<double> v{0.3, 1.0, 1.0, 2.5, 7.0};
        const RocCurve c = empirical_roc(v, v, Orientation::LargeFavorsH0);
        check_curve_shape(c);
        CHECK(auc(c) == doctest::Approx(0.5));
    }
    SUBCASE("orientation flips the curve") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> h0(300), h1(200);
        for (auto& x : h0) x = g(rng);
        for (auto& x : h1) x = g(rng) + 0.7;
        const double up = auc(empirical_roc(h0, h1, Orientation::LargeFavorsH1));
        const double down = auc(empirical_roc(h0, h1, Orientation::LargeFavorsH0));
        CHECK(up == doctest::Approx(rank_auc(h0, h1)).epsilon(1e-12));
        CHECK(up + down == doctest::Approx(1.0));
        check_curve_shape(empirical_roc(h0, h1, Orientation::LargeFavorsH0));
    }
    SUBCASE("ties between hypotheses count half") {
        std::vector<double> h0{1, 1, 2, 3, 3, 3}, h1{1, 2, 2, 3, 4};
        CHECK(auc(empirical_roc(h0, h1, Orientation::LargeFavorsH1)) ==
              doctest::Approx(rank_auc(h0, h1)).epsilon(1e-12));
    }
    SUBCASE("thresholds reproduce the decision rule") {
        const std::vector<double> h0{5.0, 1.0, 3.0}, h1{0.5, 2.0, -1.0, 3.0};
        const RocCurve c = empirical_roc(h0, h1, Orientation::LargeFavorsH0);
        for (const auto& p : c.points) {
            if (!std::isfinite(p.threshold)) continue;
            double fa = 0, d = 0;
            for (double v : h0) fa += decide({DetectorId::LRT, v, Orientation::LargeFavorsH0}, p.threshold) == Hypothesis::H1;
            for (double v : h1) d += decide({DetectorId::LRT, v, Orientation::LargeFavorsH0}, p.threshold) == Hypothesis::H1;
            CHECK(fa / 3.0 == doctest::Approx(p.p_fa));
            CHECK(d / 4.0 == doctest::Approx(p.p_d));
        }
    }
    CHECK_THROWS_AS(empirical_roc({}, {1.0}, Orientation::LargeFavorsH1), StructuralError);
}

TEST_CASE("statistic sampling is deterministic") {
    const Scenario sc(testsupport::load("scenario1"));
    SamplingOptions one, many;
    one.parallelism = 1;
    many.parallelism = 3;
    const auto a = sample_statistics(sc, all_detectors(), 0.0, 12, 99, one);
    const auto b = sample_statistics(sc, all_detectors(), 0.0, 12, 99, many);
    const auto c = sample_statistics(sc, all_detectors(), 0.0, 12, 99, one);
    REQUIRE(a.size() == 5);
    for (std::size_t d = 0; d < a.size(); ++d) {
        CHECK(a[d].h0 == b[d].h0);
        CHECK(a[d].h1 == b[d].h1);
        CHECK(a[d].h0 == c[d].h0);
        CHECK(a[d].h1.size() == 12);
    }
    const auto single = sample_statistics(sc, DetectorId::RALRT, 0.0, 12, 99, one);
    CHECK(single.h1 == a[2].h1);
    const auto other = sample_statistics(sc, DetectorId::RALRT, 0.0, 12, 100, one);
    CHECK(other.h1 != a[2].h1);

    std::size_t calls = 0;
    SamplingOptions hook;
    hook.on_value = [&](std::uint64_t, Hypothesis, DetectorId, double) { ++calls; };
    (void)sample_statistics(sc, DetectorId::Correlator, 0.0, 7, 1, hook);
    CHECK(calls == 14);
}

TEST_CASE("noise-free correlator values follow the transmitted symbols") {
    const Scenario sc(testsupport::load("scenario1"));
    const auto samples = sample_statistics(sc, DetectorId::Correlator, 300.0, 20, 5);
    const FrameGeometry& g = sc.geometry();
    const CMatrix A = build_A_matrix(sc.channel(), g);
    for (std::uint64_t t = 0; t < 20; ++t) {
        WindowRng rng = window_rng(5, t, Hypothesis::H1);
        const ObservationWindow w = draw_window(Hypothesis::H1, sc.sync_word(), g, sc.channel(),
                                                sc.noise_at(300.0), sc.constellation(), rng);
        CVector s(w.symbols.size());
        for (std::size_t k = 0; k < w.symbols.size(); ++k) s[k] = w.symbols[k];
        const CVector r = A * s;
        cplx acc = 0.0;
        for (int k = 0; k < g.L_sw; ++k) acc += std::conj(r[k]) * sc.sync_word().f_sw()[k];
        CHECK(samples.h1[t] == doctest::Approx(std::norm(acc)).epsilon(1e-9));
    }
}

TEST_CASE("exact LRT separates hypotheses at high SNR") {
    const Scenario sc(testsupport::load("scenario1"));
    const auto s = sample_statistics(sc, DetectorId::LRT, 30.0, 100, 3);
    CHECK(*std::min_element(s.h0.begin(), s.h0.end()) > *std::max_element(s.h1.begin(), s.h1.end()));
    CHECK(auc(empirical_roc(s.h0, s.h1, s.orientation)) == 1.0);
}

TEST_CASE("noise calibration") {
    const Scenario sc(testsupport::load("scenario2"));
    const double snr = compute_snr(sc.channel(), sc.geometry(), sc.noise_at(-5.0), sc.constellation().sigma2());
    CHECK(10.0 * std::log10(snr) == doctest::Approx(-5.0).epsilon(1e-9));
    CHECK(sc.receiver_noise_at(-5.0) == sc.noise_at(-5.0));
}

TEST_CASE("complexity report") {
    const Scenario sc(testsupport::load("scenario1"));
    const auto rows = complexity_report(sc.geometry(), 8649, 16, sc.equalizer(), 2, 1, 1);
    REQUIRE(rows.size() == 5);
    auto row = [&](DetectorId id) {
        return *std::find_if(rows.begin(), rows.end(), [&](const ComplexityRow& r) { return r.detector == id; });
    };
    CHECK(row(DetectorId::LRT).cm == 11799361);
    CHECK(row(DetectorId::ALRT).cm == 7145169);
    CHECK(row(DetectorId::RALRT).cm == 944486);
    CHECK(row(DetectorId::Correlator).cm == 13);
    CHECK(row(DetectorId::Correlator).ca == 11);
    const auto two_sig = [](double v) {
        const double p = std::pow(10.0, std::floor(std::log10(v)) - 1);
        return std::round(v / p) * p;
    };
    CHECK(two_sig(double(row(DetectorId::SALRT).cm)) == doctest::Approx(two_sig(5.38e6)));
    CHECK(two_sig(double(row(DetectorId::SALRT).ca)) == doctest::Approx(two_sig(4.77e6)));
}

TEST_CASE("histogram") {
    const std::vector<double> v{0.90, 0.91, 0.95, 0.95, 0.99, 1.0};
    const Histogram h = make_histogram(v, 5);
    CHECK(h.lo == 0.90);
    CHECK(h.hi == 1.0);
    std::size_t total = 0;
    double mass = 0.0;
    for (int b = 0; b < 5; ++b) {
        total += h.counts[b];
        mass += h.pdf[b] * (h.hi - h.lo) / 5;
    }
    CHECK(total == v.size());
    CHECK(mass == doctest::Approx(1.0));
    CHECK(h.cdf.back() == doctest::Approx(1.0));
    CHECK(h.counts.back() == 2);
    const Histogram flat = make_histogram({0.5, 0.5}, 3);
    CHECK(flat.cdf.back() == doctest::Approx(1.0));
    CHECK_THROWS(make_histogram({}, 3));
}

TEST_CASE("search candidates and ranking") {
    const Scenario sc(testsupport::load("scenario1"));
    CHECK(search_candidates(sc, SearchSpec::parse("exhaustive"), 1).size() == 4096);

    const auto sample = search_candidates(sc, SearchSpec::parse("sample:100"), 1);
    REQUIRE(sample.size() == 100);
    std::set<std::string> distinct;
    for (const auto& s : sample) distinct.insert(s.to_string());
    CHECK(distinct.size() == 100);
    CHECK(search_candidates(sc, SearchSpec::parse("sample:100"), 1)[7].to_string() == sample[7].to_string());

    const auto listed = search_candidates(
        sc, SearchSpec::parse("list:+1+1+1+1+1+1+1+1+1+1+1+1;0,1,0,1,0,1,1,0,1,0,1,0"), 1);
    REQUIRE(listed.size() == 2);
    CHECK(listed[0].to_string() == "+1+1+1+1+1+1+1+1+1+1+1+1");
    CHECK(listed[1].to_string() == "-1+1-1+1-1+1+1-1+1-1+1-1");

    CHECK_THROWS_AS(SearchSpec::parse("sample:0"), ConfigError);
    CHECK_THROWS_AS(SearchSpec::parse("sample:x"), ConfigError);
    CHECK_THROWS_AS(SearchSpec::parse("list:"), ConfigError);
    CHECK_THROWS_AS(SearchSpec::parse("best"), ConfigError);

    std::size_t seen = 0;
    const SearchResult res = sw_search(sc, listed, 40, 11, 0.0, DetectorId::RALRT, 0,
                                       [&](std::size_t, const AucResult&) { ++seen; });
    CHECK(seen == 2);
    REQUIRE(res.ranked.size() == 2);
    CHECK(res.ranked[0].auc >= res.ranked[1].auc);
    CHECK(res.ranked[0].trials == 40);
    CHECK(res.ranked[0].seed == 11);
    const SearchResult again = sw_search(sc, listed, 40, 11, 0.0, DetectorId::RALRT, 1);
    CHECK(again.ranked[0].auc == res.ranked[0].auc);
    CHECK(again.ranked[0].sw.to_string() == res.ranked[0].sw.to_string());
}

TEST_CASE("model validation") {
    SUBCASE("white noise passes") {
        const Scenario sc(testsupport::load("white_noise"));
        const ValidationReport rep = run_validation(sc, sc.config().trials_validate, sc.config().seed);
        CHECK(rep.checks.size() == 4);
        for (const auto& c : rep.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
        CHECK(rep.passed());
    }
    SUBCASE("a mismatched receiver model fails the conditional covariance check") {
        ScenarioConfig cfg = testsupport::load("scenario1");
        cfg.receiver_noise = NoiseSpec{{1.0}, {1.0}};
        const Scenario sc(cfg);
        const ValidationReport rep = run_validation(sc, 5000, 3);
        CHECK_FALSE(rep.passed());
        for (const auto& c : rep.checks) {
            if (c.name == "conditional_covariance") CHECK_FALSE(c.passed);
            else CHECK(c.passed);
        }
    }
}

TEST_CASE("parallel_for propagates errors") {
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] = 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 50);
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                        if (i == 3) throw ResourceError("boom");
                    }),
                    ResourceError);
}
