// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/estimation.hpp"

#include <cmath>

namespace lptvsync {

EqualizerConfig EqualizerConfig::make(double delta_p, int L_EQ, double gamma2, int P_h, int L_ch,
                                      std::optional<int> omega_override) {
    if (!(delta_p >= 0.0) || !std::isfinite(delta_p)) {
        throw ConfigError("equalizer.delta_p", "step size must be finite and non-negative");
    }
    if (P_h <= 0 || L_ch < 0) throw ConfigError("equalizer", "invalid channel period or memory");
    if (L_EQ <= 0 || L_EQ % P_h != 0) {
        throw ConfigError("equalizer.L_EQ", "L_EQ must be a positive multiple of P_h");
    }
    if (!(gamma2 > 0.0)) throw ConfigError("equalizer.gamma2", "dispersion constant must be positive");
    EqualizerConfig c;
    c.delta_p = delta_p;
    c.L_EQ = L_EQ;
    c.gamma2 = gamma2;
    c.P_h = P_h;
    c.L_ch = L_ch;
    c.omega_override = omega_override;
    c.J = L_EQ / P_h;
    if (c.J % (L_ch + 1) != 0 || c.J / (L_ch + 1) < 3) {
        throw ConfigError("equalizer.L_EQ", "J = L_EQ/P_h must equal xi*(L_ch+1) with xi >= 3");
    }
    c.xi = c.J / (L_ch + 1);
    // smallest psi with psi*P_h >= L_ch + P_h keeps every regressor row inside
    // the sliced symbol range
    c.psi = (L_ch + P_h - 1) / P_h + 1;
    const int max_omega = c.J - (L_ch + c.psi);
    if (omega_override) {
        if (*omega_override < 1 || *omega_override > max_omega) {
            throw ConfigError("equalizer.omega", "omega must lie in [1, " + std::to_string(max_omega) +
                                                     "] for this L_EQ");
        }
        c.omega = *omega_override;
    } else {
        c.omega = max_omega;
    }
    if (c.omega < 1) throw ConfigError("equalizer.L_EQ", "L_EQ too short for channel estimation");
    c.L_est = L_EQ - P_h * L_ch;
    return c;
}

namespace {

void check_length(const CVec& received, const EqualizerConfig& cfg) {
    if (static_cast<int>(received.size()) != cfg.L_EQ) {
        throw StructuralError("equalizer input must hold exactly L_EQ samples");
    }
}

// r at absolute time t in 1..L_EQ
inline const cplx& sample(const CVec& r, long long t) { return r[static_cast<std::size_t>(t - 1)]; }

cplx equalizer_output(const CVec& r, const CVec& u, long long t, int P_h) {
    cplx d{};
    for (std::size_t j = 0; j < u.size(); ++j) d += u[j] * sample(r, t - static_cast<long long>(j) * P_h);
    return d;
}

}  // namespace

EqualizerState cma_train(const CVec& received, const EqualizerConfig& cfg) {
    check_length(received, cfg);
    const long long n = cfg.L_EQ;
    const int taps = cfg.L_ch + 1;
    EqualizerState st;
    st.taps.assign(cfg.P_h, CVec(taps));
    for (int i = 0; i < cfg.P_h; ++i) {
        CVec& u = st.taps[i];
        u[0] = 1.0;
        for (int k = 0; k < cfg.training_iterations(); ++k) {
            const long long t = n - static_cast<long long>(k) * cfg.P_h - i;
            const cplx d = equalizer_output(received, u, t, cfg.P_h);
            const cplx g = cfg.delta_p * d * (cfg.gamma2 - std::norm(d));
            for (int j = 0; j < taps; ++j) {
                u[j] += std::conj(sample(received, t - static_cast<long long>(j) * cfg.P_h)) * g;
                if (!(std::abs(u[j]) <= cfg.divergence_limit)) {
                    throw DivergenceError("equalizer taps diverged at phase " + std::to_string(i) +
                                          ", iteration " + std::to_string(k) +
                                          "; use a smaller delta_p");
                }
            }
        }
    }
    st.iterations = cfg.training_iterations();
    return st;
}

const cplx& SlicedSymbols::at(long long t) const {
    const long long k = t - first_time;
    if (k < 0 || k >= static_cast<long long>(symbols.size())) {
        throw StructuralError("sliced symbol requested outside the estimated range");
    }
    return symbols[static_cast<std::size_t>(k)];
}

SlicedSymbols equalize_and_slice(const CVec& received, const EqualizerState& state,
                                 const EqualizerConfig& cfg, const Constellation& constellation) {
    check_length(received, cfg);
    if (static_cast<int>(state.taps.size()) != cfg.P_h) throw StructuralError("equalizer state has wrong phase count");
    const long long n = cfg.L_EQ;
    SlicedSymbols out;
    out.first_time = static_cast<long long>(cfg.P_h) * cfg.L_ch + 1;
    out.symbols.resize(cfg.L_est);
    for (int i = 0; i < cfg.P_h; ++i) {
        for (int k = 0; k <= cfg.J - (cfg.L_ch + 1); ++k) {
            const long long t = n - static_cast<long long>(k) * cfg.P_h - i;
            const cplx d = equalizer_output(received, state.taps[i], t, cfg.P_h);
            out.symbols[static_cast<std::size_t>(t - out.first_time)] = constellation[constellation.nearest(d)];
        }
    }
    return out;
}

std::vector<CVec> lsse_cir(const CVec& received, const SlicedSymbols& s_hat, const EqualizerConfig& cfg) {
    check_length(received, cfg);
    const long long n = cfg.L_EQ;
    const int rows = cfg.omega + 1;
    const int cols = cfg.L_ch + 1;
    std::vector<CVec> h(cfg.P_h);
    for (int i = 0; i < cfg.P_h; ++i) {
        CMatrix G(rows, cols);
        CVector y(rows);
        for (int a1 = 0; a1 < rows; ++a1) {
            const long long t = n - static_cast<long long>(a1) * cfg.P_h - i;
            y(a1) = sample(received, t);
            for (int a2 = 0; a2 < cols; ++a2) G(a1, a2) = s_hat.at(t - a2);
        }
        CVector sol;
        Eigen::ColPivHouseholderQR<CMatrix> qr(G);
        if (qr.rank() == cols) {
            sol = qr.solve(y);
        } else {
            Eigen::JacobiSVD<CMatrix> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const auto& sv = svd.singularValues();
            const double cutoff = 1e-10 * (sv.size() ? sv(0) : 0.0);
            if (sv.size() == 0 || !(sv(0) > 0.0)) {
                throw EstimationError("symbol regressor matrix is numerically zero at phase " + std::to_string(i));
            }
            Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
            for (Eigen::Index s = 0; s < sv.size(); ++s) {
                if (sv(s) > cutoff) inv(s) = 1.0 / sv(s);
            }
            sol = svd.matrixV() * (inv.cast<cplx>().asDiagonal() * (svd.matrixU().adjoint() * y));
        }
        h[i].assign(sol.data(), sol.data() + sol.size());
    }
    return h;
}

CMatrix assemble_B_hat(const std::vector<CVec>& h_hat, const FrameGeometry& geom) {
    if (static_cast<int>(h_hat.size()) != geom.P_h) throw StructuralError("need one CIR estimate per channel phase");
    CMatrix b = CMatrix::Zero(geom.K, geom.N);
    for (int k = 0; k < geom.K; ++k) {
        const CVec& h = h_hat[k % geom.P_h];
        if (static_cast<int>(h.size()) != geom.L_ch + 1) throw StructuralError("CIR estimate must have L_ch + 1 taps");
        for (int l = 0; l <= geom.L_ch; ++l) b(k, k + l) = h[l];
    }
    return b;
}

CMatrix estimate_B(const CVec& received, const EqualizerConfig& cfg,
                   const Constellation& constellation, const FrameGeometry& geom) {
    const EqualizerState st = cma_train(received, cfg);
    const SlicedSymbols s = equalize_and_slice(received, st, cfg, constellation);
    return assemble_B_hat(lsse_cir(received, s, cfg), geom);
}

}  // namespace lptvsync
