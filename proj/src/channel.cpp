// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/channel.hpp"

#include <algorithm>
#include <cmath>

namespace lptvsync {

LptvChannel::LptvChannel(std::vector<CVec> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ModelError("channel needs at least one phase");
    const std::size_t len = coeffs_.front().size();
    if (len == 0) throw ModelError("channel phases must hold at least one tap");
    for (const auto& c : coeffs_) {
        if (c.size() != len) throw ModelError("all channel phases must have the same number of taps");
    }
    const auto nonzero_at = [&](std::size_t l) {
        return std::any_of(coeffs_.begin(), coeffs_.end(),
                           [l](const CVec& c) { return c[l] != cplx{}; });
    };
    if (!nonzero_at(0)) throw ModelError("channel tap 0 is zero at every phase");
    if (!nonzero_at(len - 1)) throw ModelError("last channel tap is zero at every phase");
}

LptvChannel LptvChannel::identity() { return LptvChannel({CVec{cplx{1.0, 0.0}}}); }

FrameGeometry FrameGeometry::make(int P_h, int P_z, int L_h, int L_z, int N, int M,
                                  SwMargin margin) {
    if (P_h <= 0 || P_z <= 0) throw StructuralError("periods must be positive");
    if (L_h < 0 || L_z < 0) throw StructuralError("memories must be non-negative");
    if (M <= 0) throw StructuralError("M must be positive");
    FrameGeometry g;
    g.P_h = P_h;
    g.P_z = P_z;
    g.L_h = L_h;
    g.L_z = L_z;
    g.N = N;
    g.M = M;
    g.L_ch = std::max(L_h, L_z);
    if (N <= g.L_ch) throw StructuralError("N > L_ch violated");
    if (N % P_h != 0 || N % P_z != 0) {
        throw StructuralError("N must be a common multiple of P_h and P_z");
    }
    g.K = N - g.L_ch;
    g.L_sw = g.K * M;
    g.L_tot = N * M;
    if (margin == SwMargin::Enforce && g.L_sw <= g.L_ch + 1) throw StructuralError("L_sw > L_ch + 1 violated");
    return g;
}

FrameGeometry FrameGeometry::from(const LptvChannel& ch, const NoiseModel& noise, int N, int M,
                                  SwMargin margin) {
    return make(ch.period(), noise.period(), ch.memory(), noise.memory(), N, M, margin);
}

CVec apply_channel(const LptvChannel& ch, const CVec& s, const CVec& z, long long start_time) {
    if (s.size() < z.size()) throw StructuralError("symbol sequence shorter than output");
    const std::size_t hist = s.size() - z.size();
    if (hist < static_cast<std::size_t>(ch.memory())) {
        throw StructuralError("insufficient symbol history for the channel memory");
    }
    const int mem = ch.memory();
    CVec r(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const long long m = start_time + static_cast<long long>(i);
        cplx acc = z[i];
        for (int l = 0; l <= mem; ++l) acc += ch.tap(m, l) * s[i + hist - l];
        r[i] = acc;
    }
    return r;
}

CMatrix build_B_matrix(const LptvChannel& ch, const FrameGeometry& geom,
                       long long block_start_time) {
    CMatrix b = CMatrix::Zero(geom.K, geom.N);
    for (int k = 0; k < geom.K; ++k) {
        for (int l = 0; l <= geom.L_ch; ++l) b(k, k + l) = ch.tap(block_start_time - k, l);
    }
    return b;
}

CMatrix build_A_matrix(const LptvChannel& ch, const FrameGeometry& geom) {
    CMatrix a = CMatrix::Zero(geom.L_tot, geom.L_tot + geom.L_ch);
    for (int k = 0; k < geom.L_tot; ++k) {
        for (int l = 0; l <= geom.L_ch; ++l) a(k, k + l) = ch.tap(-k, l);
    }
    return a;
}

double compute_snr(const LptvChannel& ch, const FrameGeometry& geom, const NoiseModel& noise,
                   double symbol_var) {
    if (!(symbol_var > 0.0)) throw StructuralError("symbol variance must be positive");
    const CMatrix a = build_A_matrix(ch, geom);
    const double signal = symbol_var * (a.adjoint() * a).trace().real();
    double noise_power = 0.0;
    for (int k = 0; k < geom.L_tot; ++k) noise_power += analytic_autocorrelation(noise, -k, 0).real();
    if (!(noise_power > 0.0)) throw ModelError("noise power is zero");
    return signal / noise_power;
}

double calibrate_noise_power(const LptvChannel& ch, const FrameGeometry& geom,
                             const NoiseModel& noise_shape, double symbol_var,
                             double target_snr_db) {
    if (!std::isfinite(target_snr_db)) throw StructuralError("target SNR must be finite");
    const double unit = compute_snr(ch, geom, noise_shape, symbol_var);
    return unit / std::pow(10.0, target_snr_db / 10.0);
}

}  // namespace lptvsync
