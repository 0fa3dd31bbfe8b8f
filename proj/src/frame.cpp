// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/frame.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace lptvsync {

Constellation::Constellation(CVec symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) throw ModelError("constellation needs at least two symbols");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        for (std::size_t j = i + 1; j < symbols_.size(); ++j) {
            if (std::abs(symbols_[i] - symbols_[j]) < 1e-12) {
                throw ModelError("constellation symbols must be distinct");
            }
        }
    }
    cplx mean{};
    double p2 = 0.0;
    double p4 = 0.0;
    for (const auto& s : symbols_) {
        mean += s;
        pseudo_ += s * s;
        p2 += std::norm(s);
        p4 += std::norm(s) * std::norm(s);
    }
    const double n = static_cast<double>(symbols_.size());
    if (std::abs(mean / n) > 1e-9) throw ModelError("constellation must be zero-mean");
    sigma2_ = p2 / n;
    pseudo_ /= n;
    gamma2_ = p4 / p2;
}

Constellation Constellation::bpsk() { return Constellation({cplx{-1.0, 0.0}, cplx{1.0, 0.0}}); }

Constellation Constellation::qpsk() {
    const double a = std::numbers::sqrt2 / 2.0;
    return Constellation({cplx{a, a}, cplx{-a, a}, cplx{-a, -a}, cplx{a, -a}});
}

std::size_t Constellation::nearest(const cplx& x) const noexcept {
    std::size_t best = 0;
    double best_d = std::norm(x - symbols_[0]);
    for (std::size_t i = 1; i < symbols_.size(); ++i) {
        const double d = std::norm(x - symbols_[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

int Constellation::index_of(const cplx& x, double tol) const noexcept {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (std::abs(x - symbols_[i]) <= tol) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Constellation::draw(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, symbols_.size() - 1);
    return pick(rng);
}

const char* to_string(Hypothesis h) noexcept { return h == Hypothesis::H0 ? "H0" : "H1"; }

SyncWord::SyncWord(CVec f_sw, const Constellation& constellation, const FrameGeometry& geom)
    : f_sw_(std::move(f_sw)), K_(geom.K), M_(geom.M) {
    if (static_cast<int>(f_sw_.size()) != geom.L_sw) {
        throw StructuralError("synchronization word length must equal L_sw = " +
                              std::to_string(geom.L_sw));
    }
    indices_.reserve(f_sw_.size());
    for (const auto& s : f_sw_) {
        const int idx = constellation.index_of(s);
        if (idx < 0) throw ModelError("synchronization word symbol is not in the constellation");
        indices_.push_back(static_cast<std::size_t>(idx));
    }
}

SyncWord SyncWord::from_bpsk_string(const std::string& text, const Constellation& constellation,
                                    const FrameGeometry& geom) {
    CVec f;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ',' || c == ' ') {
            ++i;
            continue;
        }
        double sign = 1.0;
        if (c == '+' || c == '-') {
            sign = c == '-' ? -1.0 : 1.0;
            ++i;
        }
        if (i >= text.size() || text[i] != '1') {
            throw ConfigError("sw", "BPSK word must be a sequence of +1 / -1 entries");
        }
        ++i;
        f.emplace_back(sign, 0.0);
    }
    return SyncWord(std::move(f), constellation, geom);
}

SyncWord SyncWord::from_index(std::uint64_t index, const Constellation& constellation,
                              const FrameGeometry& geom) {
    CVec f(geom.L_sw);
    const std::uint64_t ns = constellation.size();
    for (int d = 0; d < geom.L_sw; ++d) {
        f[d] = constellation[index % ns];
        index /= ns;
    }
    return SyncWord(std::move(f), constellation, geom);
}

CVec SyncWord::block(int i) const {
    if (i < 0 || i >= M_) throw StructuralError("sync block index out of range");
    const auto first = f_sw_.begin() + static_cast<std::ptrdiff_t>(M_ - 1 - i) * K_;
    return CVec(first, first + K_);
}

std::string SyncWord::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < f_sw_.size(); ++i) {
        const cplx& s = f_sw_[i];
        if (s.imag() == 0.0 && std::abs(std::abs(s.real()) - 1.0) < 1e-12) {
            os << (s.real() > 0 ? "+1" : "-1");
        } else {
            if (i) os << ',';
            os << '(' << s.real() << ',' << s.imag() << ')';
        }
    }
    return os.str();
}

CVec zadoff_chu(int root, int length) {
    if (length <= 0) throw StructuralError("Zadoff-Chu length must be positive");
    if (root <= 0 || std::gcd(root, length) != 1) {
        throw StructuralError("Zadoff-Chu root must be positive and coprime with the length");
    }
    CVec z(length);
    const double pi = std::numbers::pi;
    for (int n = 0; n < length; ++n) {
        const double nn = length % 2 == 0 ? static_cast<double>(n) * n
                                          : static_cast<double>(n) * (n + 1);
        z[n] = std::polar(1.0, pi * root * nn / length);
    }
    return z;
}

CVec assemble_sync_sequence(const SyncWord& sw, const FrameGeometry& geom,
                            const Constellation& constellation, std::mt19937_64& data_rng) {
    CVec v;
    v.reserve(geom.L_tot + geom.L_ch);
    for (int m = 0; m < geom.M; ++m) {
        const CVec t = sw.block(geom.M - 1 - m);
        v.insert(v.end(), t.begin(), t.end());
        for (int i = 0; i < geom.L_ch; ++i) v.push_back(constellation[constellation.draw(data_rng)]);
    }
    for (int i = 0; i < geom.L_ch; ++i) v.push_back(constellation[constellation.draw(data_rng)]);
    return v;
}

ObservationWindow draw_window(Hypothesis hyp, const SyncWord& sw, const FrameGeometry& geom,
                              const LptvChannel& ch, const NoiseModel& noise,
                              const Constellation& constellation, WindowRng& rng,
                              std::size_t extra_len) {
    const std::size_t span = static_cast<std::size_t>(geom.L_tot + geom.L_ch);
    ObservationWindow w;
    w.truth = hyp;
    if (hyp == Hypothesis::H1) {
        w.symbols = assemble_sync_sequence(sw, geom, constellation, rng.data);
    } else {
        w.symbols.resize(span);
        for (auto& s : w.symbols) s = constellation[constellation.draw(rng.data)];
    }
    w.trailing_symbols.resize(extra_len);
    for (auto& s : w.trailing_symbols) s = constellation[constellation.draw(rng.data)];

    // time-ordered symbols from -(span-1) to extra_len
    CVec s_time(span + extra_len);
    for (std::size_t i = 0; i < span; ++i) s_time[i] = w.symbols[span - 1 - i];
    for (std::size_t j = 0; j < extra_len; ++j) s_time[span + j] = w.trailing_symbols[j];

    const std::size_t out_len = static_cast<std::size_t>(geom.L_tot) + extra_len;
    const long long start = -(static_cast<long long>(geom.L_tot) - 1);
    const CVec z = generate_acgn(noise, out_len, rng.noise, start);
    const CVec r = apply_channel(ch, s_time, z, start);

    w.samples.resize(geom.L_tot);
    for (int k = 0; k < geom.L_tot; ++k) w.samples[k] = r[geom.L_tot - 1 - k];
    w.trailing.assign(r.begin() + geom.L_tot, r.end());
    return w;
}

CVector post_process(const CVec& window_samples, const FrameGeometry& geom) {
    if (static_cast<int>(window_samples.size()) < geom.L_tot) {
        throw StructuralError("window must hold at least L_tot = " + std::to_string(geom.L_tot) + " samples");
    }
    CVector out(geom.L_sw);
    for (int m = 0; m < geom.M; ++m) {
        for (int k = 0; k < geom.K; ++k) out(m * geom.K + k) = window_samples[m * geom.N + k];
    }
    return out;
}

}  // namespace lptvsync
