// SPDX-License-Identifier: Apache-2.0
//
// Linear periodically time-varying channel and the frame geometry that ties
// channel/noise periods to the synchronization block layout.
//
// Vector convention: every "window vector" indexes time backwards from the
// window reference, entry k holding the sample at time -k. The A and B
// matrices act on symbol vectors in that same order.

#pragma once

#include "lptvsync/cyclostat.hpp"
#include "lptvsync/types.hpp"

namespace lptvsync {

class LptvChannel {
public:
    /// coeffs[i][l]: tap l at phase i, i < period, l <= memory. All phases must
    /// have the same length.
    explicit LptvChannel(std::vector<CVec> coeffs);

    static LptvChannel identity();

    int period() const noexcept { return static_cast<int>(coeffs_.size()); }
    int memory() const noexcept { return static_cast<int>(coeffs_.front().size()) - 1; }
    const std::vector<CVec>& coeffs() const noexcept { return coeffs_; }

    /// h[m,l]; zero for l outside [0, memory].
    cplx tap(long long m, long long l) const noexcept {
        if (l < 0 || l > memory()) return {};
        return coeffs_[pmod(m, period())][l];
    }

    bool operator==(const LptvChannel&) const = default;

private:
    std::vector<CVec> coeffs_;
};

/// L_sw > L_ch + 1 holds for every usable frame. Relaxed only admits the
/// degenerate single-block layouts used for brute-force checks.
enum class SwMargin { Enforce, Relaxed };

struct FrameGeometry {
    int P_h = 1;
    int P_z = 1;
    int L_h = 0;
    int L_z = 0;
    int N = 0;
    int M = 0;
    // derived
    int L_ch = 0;
    int K = 0;
    int L_sw = 0;
    int L_tot = 0;

    /// Validates the couplings and fills the derived fields.
    static FrameGeometry make(int P_h, int P_z, int L_h, int L_z, int N, int M,
                              SwMargin margin = SwMargin::Enforce);
    static FrameGeometry from(const LptvChannel& ch, const NoiseModel& noise, int N, int M,
                              SwMargin margin = SwMargin::Enforce);

    bool operator==(const FrameGeometry&) const = default;
};

/// r[i] = sum_l h[start_time+i, l] s[i + H - l] + z[i], where H = s.size() - z.size()
/// is the symbol history preceding the first output (time order, oldest first).
CVec apply_channel(const LptvChannel& ch, const CVec& s, const CVec& z, long long start_time);

/// K x N per-block channel matrix; row k carries h[block_start_time - k, 0..L_ch]
/// starting at column k.
CMatrix build_B_matrix(const LptvChannel& ch, const FrameGeometry& geom,
                       long long block_start_time = 0);

/// L_tot x (L_tot + L_ch) pre-processing matrix of the full window.
CMatrix build_A_matrix(const LptvChannel& ch, const FrameGeometry& geom);

/// Linear SNR: symbol_var * Tr{A^H A} / sum of c_z[m,0] over the window.
double compute_snr(const LptvChannel& ch, const FrameGeometry& geom, const NoiseModel& noise,
                   double symbol_var);

/// Variance scale to apply to `noise_shape` so that compute_snr hits target_snr_db.
double calibrate_noise_power(const LptvChannel& ch, const FrameGeometry& geom,
                             const NoiseModel& noise_shape, double symbol_var,
                             double target_snr_db);

}  // namespace lptvsync
