// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference computations shared by the unit tests and the
// acceptance runner. Nothing here calls the per-block evaluation paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lptvsync/detectors.hpp"
#include "lptvsync/estimation.hpp"

namespace oracle {

using namespace lptvsync;

struct Instance {
    Constellation cons;
    FrameGeometry geom;
    LptvChannel ch;
    NoiseModel noise;
    SyncWord sw;
    CandidateIndexing idx;
    CMatrix B;
    CMatrix C;
    CMatrix C_inv;
    BlockModel model;

    Instance(Constellation c, FrameGeometry g, LptvChannel h, NoiseModel n, SyncWord s)
        : cons(std::move(c)), geom(g), ch(std::move(h)), noise(std::move(n)), sw(std::move(s)),
          idx(geom, cons), B(build_B_matrix(ch, geom)), C(noise_cov_matrix(noise, geom.K, geom.N)),
          C_inv(invert_covariance(C)), model(B, C_inv, idx, sw) {}
};

// N=2, K=1, M=1, L_ch=1, BPSK.
inline Instance tiny() {
    const LptvChannel ch(std::vector<CVec>{{{0.9, 0.3}, {0.4, -0.5}}, {{0.7, -0.2}, {0.3, 0.6}}});
    const NoiseModel nm({1.0, 1.7}, {1.0, 0.4});
    const FrameGeometry g = FrameGeometry::from(ch, nm, 2, 1, SwMargin::Relaxed);
    const Constellation b = Constellation::bpsk();
    return Instance(b, g, ch, nm, SyncWord(CVec{{1, 0}}, b, g));
}

inline CVector to_vector(const CVec& v) {
    CVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

// Symbol vectors of the full window (entry k = s[-k]) for every joint
// hypothesis, built directly from the frame layout.
inline std::vector<CVector> joint_data_vectors(const Instance& in) {
    const int L = in.geom.L_tot + in.geom.L_ch;
    const std::uint64_t ns = in.cons.size();
    std::vector<CVector> out;
    std::uint64_t total = 1;
    for (int i = 0; i < in.geom.L_tot; ++i) total *= ns;
    for (std::uint64_t j = 0; j < total; ++j) {
        CVector s = CVector::Zero(L);
        std::uint64_t rem = j;
        for (int k = 0; k < in.geom.L_tot; ++k) {
            s[k] = in.cons[rem % ns];
            rem /= ns;
        }
        out.push_back(s);
    }
    return out;
}

inline std::vector<CVector> joint_sw_vectors(const Instance& in) {
    const auto& g = in.geom;
    const int L = g.L_tot + g.L_ch;
    const std::uint64_t ns = in.cons.size();
    std::uint64_t total = 1;
    for (int i = 0; i < g.M * g.L_ch; ++i) total *= ns;
    std::vector<CVector> out;
    for (std::uint64_t u = 0; u < total; ++u) {
        CVector s = CVector::Zero(L);
        std::uint64_t rem = u;
        for (int m = 0; m < g.M; ++m) {
            const CVec t = in.sw.block(g.M - 1 - m);
            for (int k = 0; k < g.K; ++k) s[m * g.N + k] = t[k];
            for (int k = g.K; k < g.N; ++k) {
                s[m * g.N + k] = in.cons[rem % ns];
                rem /= ns;
            }
        }
        out.push_back(s);
    }
    return out;
}

// Full quadratic form of the post-processed window against one hypothesis,
// block by block with the last block borrowing nothing beyond the window.
inline double quad_form(const Instance& in, const CVector& r_post, const CVector& s) {
    double q = 0.0;
    for (int m = 0; m < in.geom.M; ++m) {
        const CVector e = r_post.segment(m * in.geom.K, in.geom.K) - in.B * s.segment(m * in.geom.N, in.geom.N);
        q += (e.adjoint() * in.C_inv * e)(0, 0).real();
    }
    return q;
}

inline double log_sum_exp_neg(const std::vector<double>& q) {
    const double lo = *std::min_element(q.begin(), q.end());
    double acc = 0.0;
    for (double v : q) acc += std::exp(-(v - lo));
    return -lo + std::log(acc);
}

// Transmitted symbols for times 1-L_ch .. L_EQ and the received r[1..L_EQ].
struct Burst {
    CVec symbols;  // entry j is time j + 1 - L_ch
    CVec received;
    int L_ch = 0;
    cplx at(long long t) const { return symbols[static_cast<std::size_t>(t - 1 + L_ch)]; }
};

inline Burst make_burst(const LptvChannel& ch, const Constellation& cons, int L_EQ, double noise_var,
                 std::mt19937_64& rng) {
    Burst b;
    b.L_ch = ch.memory();
    b.symbols.resize(L_EQ + b.L_ch);
    for (auto& s : b.symbols) s = cons[cons.draw(rng)];
    CVec z(L_EQ);
    if (noise_var > 0.0) z = generate_acgn(NoiseModel::white(noise_var), L_EQ, rng, 1);
    b.received = apply_channel(ch, b.symbols, z, 1);
    return b;
}

inline SlicedSymbols true_symbols(const Burst& b, const EqualizerConfig& cfg) {
    SlicedSymbols s;
    s.first_time = static_cast<long long>(cfg.P_h) * cfg.L_ch + 1;
    for (long long t = s.first_time; t <= cfg.L_EQ; ++t) s.symbols.push_back(b.at(t));
    return s;
}

inline double channel_energy(const LptvChannel& ch, int phase) {
    double e = 0.0;
    for (const auto& h : ch.coeffs()[phase]) e += std::norm(h);
    return e;
}

// Noise variance that puts the received SNR of a unit-power alphabet at snr_db.
inline double noise_for(const LptvChannel& ch, double snr_db) {
    double e = 0.0;
    for (int p = 0; p < ch.period(); ++p) e += channel_energy(ch, p);
    return e / ch.period() / std::pow(10.0, snr_db / 10.0);
}

}  // namespace oracle
