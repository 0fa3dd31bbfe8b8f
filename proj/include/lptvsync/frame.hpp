// SPDX-License-Identifier: Apache-2.0
//
// Symbol alphabet, synchronization word layout, observation-window synthesis
// under either hypothesis, and the receiver post-processing that drops the
// trailing L_ch samples of every N-block.

#pragma once

#include <random>
#include <string>

#include "lptvsync/channel.hpp"
#include "lptvsync/cyclostat.hpp"
#include "lptvsync/types.hpp"

namespace lptvsync {

class Constellation {
public:
    explicit Constellation(CVec symbols);

    static Constellation bpsk();
    static Constellation qpsk();

    std::size_t size() const noexcept { return symbols_.size(); }
    const CVec& symbols() const noexcept { return symbols_; }
    const cplx& operator[](std::size_t i) const { return symbols_[i]; }

    double sigma2() const noexcept { return sigma2_; }          // E|S|^2
    cplx pseudo_sigma2() const noexcept { return pseudo_; }      // E S^2
    double gamma2() const noexcept { return gamma2_; }           // E|S|^4 / E|S|^2

    /// Nearest symbol index; ties go to the lowest index.
    std::size_t nearest(const cplx& x) const noexcept;
    /// Index of a member symbol, or -1.
    int index_of(const cplx& x, double tol = 1e-9) const noexcept;

    std::size_t draw(std::mt19937_64& rng) const;

    bool operator==(const Constellation& o) const { return symbols_ == o.symbols_; }

private:
    CVec symbols_;
    double sigma2_ = 0.0;
    cplx pseudo_{};
    double gamma2_ = 0.0;
};

enum class Hypothesis { H0, H1 };

const char* to_string(Hypothesis h) noexcept;

/// Synchronization word stored as [f_{L_sw-1}, ..., f_0]; block t_i holds
/// [f_{iK+K-1}, ..., f_{iK}].
class SyncWord {
public:
    SyncWord(CVec f_sw, const Constellation& constellation, const FrameGeometry& geom);

    /// BPSK shorthand: "+1-1+1..." or "1,-1,1" style strings.
    static SyncWord from_bpsk_string(const std::string& text, const Constellation& constellation,
                                     const FrameGeometry& geom);
    /// Enumeration helper: digit d of `index` (base N_s) selects f_sw[d].
    static SyncWord from_index(std::uint64_t index, const Constellation& constellation,
                               const FrameGeometry& geom);

    const CVec& f_sw() const noexcept { return f_sw_; }
    const std::vector<std::size_t>& symbol_indices() const noexcept { return indices_; }
    int K() const noexcept { return K_; }
    int M() const noexcept { return M_; }

    /// t_i, i in [0, M).
    CVec block(int i) const;

    std::string to_string() const;

private:
    CVec f_sw_;
    std::vector<std::size_t> indices_;
    int K_ = 0;
    int M_ = 0;
};

/// Zadoff-Chu sequence of the given root and length (unit modulus).
CVec zadoff_chu(int root, int length);

/// Paper-order transmitted vector [t_{M-1}; d^0; t_{M-2}; d^1; ...; t_0; d^{M-1}; l]
/// of length L_tot + L_ch; entry k is the symbol at time -k.
CVec assemble_sync_sequence(const SyncWord& sw, const FrameGeometry& geom,
                            const Constellation& constellation, std::mt19937_64& data_rng);

struct WindowRng {
    std::mt19937_64 data;
    std::mt19937_64 noise;
};

struct ObservationWindow {
    CVec samples;            // L_tot entries, entry k = r[-k]
    CVec trailing;           // r[1], ..., r[extra_len] in time order
    Hypothesis truth = Hypothesis::H0;
    // ground truth kept for validation; detectors never read these
    CVec symbols;            // L_tot + L_ch entries, entry k = s[-k]
    CVec trailing_symbols;   // s[1], ..., s[extra_len]
};

ObservationWindow draw_window(Hypothesis hyp, const SyncWord& sw, const FrameGeometry& geom,
                              const LptvChannel& ch, const NoiseModel& noise,
                              const Constellation& constellation, WindowRng& rng,
                              std::size_t extra_len = 0);

/// Receiver post-processing: M blocks of N, keep the first K of each.
/// Result has L_sw entries; block m occupies [m*K, (m+1)*K).
CVector post_process(const CVec& window_samples, const FrameGeometry& geom);

}  // namespace lptvsync
