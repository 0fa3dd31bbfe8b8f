// SPDX-License-Identifier: Apache-2.0
//
// Blind channel acquisition on the samples that follow a candidate window:
// per-phase constant-modulus equalizer, symbol slicing, least-squares CIR
// estimation and assembly of the estimated per-block channel matrix.
//
// Time reference: the collected samples are r[1..L_EQ] and the estimator
// reference time is n = L_EQ, so every regressor reaches backwards from n.

#pragma once

#include <optional>

#include "lptvsync/channel.hpp"
#include "lptvsync/frame.hpp"
#include "lptvsync/types.hpp"

namespace lptvsync {

struct EqualizerConfig {
    double delta_p = 1e-3;
    int L_EQ = 0;
    double gamma2 = 1.0;
    int P_h = 1;
    int L_ch = 0;
    std::optional<int> omega_override;
    double divergence_limit = 1e6;

    // derived
    int J = 0;
    int xi = 0;
    int psi = 0;
    int omega = 0;
    int L_est = 0;

    /// Validates and fills the derived fields.
    static EqualizerConfig make(double delta_p, int L_EQ, double gamma2, int P_h, int L_ch,
                                std::optional<int> omega_override = std::nullopt);

    int training_iterations() const noexcept { return J - (L_ch + 1); }
};

struct EqualizerState {
    std::vector<CVec> taps;  // [phase][0..L_ch]
    int iterations = 0;
};

/// Runs the CMA recursion for every phase over r[1..L_EQ] (time order).
EqualizerState cma_train(const CVec& received, const EqualizerConfig& cfg);

/// Estimated symbols ŝ[t] for t = P_h L_ch + 1 .. L_EQ, stored in time order
/// (entry 0 is time P_h L_ch + 1).
struct SlicedSymbols {
    long long first_time = 0;
    CVec symbols;

    const cplx& at(long long t) const;
};

SlicedSymbols equalize_and_slice(const CVec& received, const EqualizerState& state,
                                 const EqualizerConfig& cfg, const Constellation& constellation);

/// Per-phase CIR estimates; entry i estimates h[-i, 0..L_ch].
std::vector<CVec> lsse_cir(const CVec& received, const SlicedSymbols& s_hat,
                           const EqualizerConfig& cfg);

/// K x N matrix whose row k uses estimate (k mod P_h).
CMatrix assemble_B_hat(const std::vector<CVec>& h_hat, const FrameGeometry& geom);

/// Convenience: train, slice, estimate, assemble.
CMatrix estimate_B(const CVec& received, const EqualizerConfig& cfg,
                   const Constellation& constellation, const FrameGeometry& geom);

}  // namespace lptvsync
