// SPDX-License-Identifier: Apache-2.0
//
// Frame-synchronization test statistics: exact log-likelihood ratio, its
// max-log approximation over the full and the reduced candidate grids, the
// blind variant driven by an estimated channel matrix, and the correlator.
//
// All likelihood-family statistics are separable over the M post-processed
// blocks: a joint candidate is the concatenation of one N-symbol block per m,
// the quadratic form splits into per-block terms, and both the log-sum-exp
// and the minimum of a sum over a product set split into per-block parts.
// The evaluation below works per block; the joint enumeration is only used
// by the D-matrix builder and by brute-force checks.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lptvsync/channel.hpp"
#include "lptvsync/frame.hpp"
#include "lptvsync/types.hpp"

namespace lptvsync {

enum class DetectorId { LRT, ALRT, RALRT, SALRT, Correlator };

const char* to_string(DetectorId id) noexcept;
/// Case-insensitive name lookup; throws ConfigError on unknown names.
DetectorId parse_detector(const std::string& name);
std::vector<DetectorId> all_detectors();

/// Which hypothesis large statistic values favor.
enum class Orientation { LargeFavorsH0, LargeFavorsH1 };

Orientation orientation_of(DetectorId id) noexcept;

struct DetectorStatistic {
    DetectorId detector = DetectorId::LRT;
    double value = 0.0;
    Orientation orientation = Orientation::LargeFavorsH0;

    /// Value mapped so that larger always favors H1.
    double h1_score() const noexcept {
        return orientation == Orientation::LargeFavorsH1 ? value : -value;
    }
};

/// LRT family: value > threshold gives H0. Correlator: value >= threshold
/// gives H1. Equality always resolves to H1.
Hypothesis decide(const DetectorStatistic& stat, double threshold) noexcept;

/// Candidate index maps. A block index j in [0, N_s^N) expands to the
/// N-vector whose entry d is symbol floor(j / N_s^d) mod N_s; a fill index u
/// expands the same way over L_ch entries. Joint indices concatenate block
/// digits with block m in the m-th group of N (resp. L_ch) digits.
class CandidateIndexing {
public:
    CandidateIndexing(const FrameGeometry& geom, const Constellation& constellation);

    int N_s() const noexcept { return ns_; }
    const FrameGeometry& geometry() const noexcept { return geom_; }
    const Constellation& constellation() const noexcept { return constellation_; }

    std::uint64_t block_count() const noexcept { return block_count_; }  // N_s^N
    std::uint64_t fill_count() const noexcept { return fill_count_; }    // N_s^L_ch
    /// N_s^L_tot; throws ResourceError if it does not fit in 64 bits.
    std::uint64_t data_count() const;
    /// N_s^(M L_ch)
    std::uint64_t sw_count() const;

    /// q(l, m): block index of joint data candidate l at block m.
    std::uint64_t data_block(std::uint64_t l, int m) const noexcept;
    /// q~(u, m): fill index of joint SW candidate u at block m.
    std::uint64_t sw_fill(std::uint64_t u, int m) const noexcept;

    std::uint64_t join_data(const std::vector<std::uint64_t>& blocks) const noexcept;
    std::uint64_t join_sw(const std::vector<std::uint64_t>& fills) const noexcept;

    /// Symbol index of digit d of a block/fill index.
    std::size_t digit(std::uint64_t index, int d) const noexcept;

    CVector data_vector(std::uint64_t j) const;
    /// [t_{M-1-m}; fill(u)].
    CVector sw_vector(std::uint64_t u, int m, const SyncWord& sw) const;

    /// N x N_s^N matrix whose column j is data_vector(j).
    CMatrix data_table() const;
    /// N x N_s^L_ch matrix whose column u is sw_vector(u, m, sw).
    CMatrix sw_table(int m, const SyncWord& sw) const;

private:
    FrameGeometry geom_;
    Constellation constellation_;
    int ns_;
    std::uint64_t block_count_;
    std::uint64_t fill_count_;
};

/// Per-window hard decisions on the raw window vector.
struct HardDecisions {
    /// Per block m: block index of the nearest-symbol decision over positions mN..mN+N-1.
    std::vector<std::uint64_t> data_blocks;
    /// Per block m: fill index decided on the L_ch non-SW positions.
    std::vector<std::uint64_t> sw_fills;
};

HardDecisions hard_decision(const CVec& r_raw, const CandidateIndexing& idx);

/// Reduced candidate sets: per block the indices within e_r coordinates of
/// the hard decision. The joint sets are the products over blocks.
struct GridSets {
    int e_r0 = 0;
    int e_r1 = 0;
    std::vector<std::vector<std::uint64_t>> data;  // [m] -> block indices
    std::vector<std::vector<std::uint64_t>> sw;    // [m] -> fill indices

    std::uint64_t data_size() const noexcept;
    std::uint64_t sw_size() const noexcept;
};

/// Closed-form per-block count sum_{l<=e} C(n, l) (N_s - 1)^l.
std::uint64_t grid_block_size(int n, int e, int N_s);

GridSets build_grid_sets(const HardDecisions& hd, const CandidateIndexing& idx, int e_r0, int e_r1);

/// Everything about (B, C_z) that does not depend on the received window.
class BlockModel {
public:
    BlockModel(const CMatrix& B, const CMatrix& C_inv, const CandidateIndexing& idx,
               const SyncWord& sw);

    const CMatrix& B() const noexcept { return B_; }
    const CMatrix& C_inv() const noexcept { return C_inv_; }
    /// B^H C^-1 B
    const CMatrix& gram() const noexcept { return G_; }
    const CandidateIndexing& indexing() const noexcept { return idx_; }
    const SyncWord& sync_word() const noexcept { return sw_; }

    /// Re(a_j^H G a_j) for every data block candidate.
    const Eigen::VectorXd& data_quad() const noexcept { return data_quad_; }
    /// Re(a~^H G a~) per block m for every fill index.
    const Eigen::VectorXd& sw_quad(int m) const { return sw_quad_.at(m); }

    /// y_m = B^H C^-1 r~_m for every block.
    std::vector<CVector> project(const CVector& r_post) const;

    /// Per-block objectives quad - 2 Re(y_m^H a): one vector over all data
    /// block candidates, one over all fill candidates.
    Eigen::VectorXd data_objective(const CVector& y_m) const;
    Eigen::VectorXd sw_objective(const CVector& y_m, int m) const;

private:
    CMatrix B_;
    CMatrix C_inv_;
    CMatrix G_;
    CMatrix W_;  // B^H C^-1
    CandidateIndexing idx_;
    SyncWord sw_;
    CMatrix data_table_;
    std::vector<CMatrix> sw_table_;
    Eigen::VectorXd data_quad_;
    std::vector<Eigen::VectorXd> sw_quad_;
};

/// Inverse of the K x K noise covariance; throws LinearAlgebraError if singular.
CMatrix invert_covariance(const CMatrix& C);

/// log of the H0-over-H1 density ratio (priors excluded), computed per block
/// with max-subtracted log-sum-exp.
double lrt_log_statistic(const CVector& r_post, const BlockModel& model);

/// Joint D matrices. D^data_l = sum_m a_q(l,m) a_q(l,m)^H and
/// D^sw_u = sum_m a~ a~^H. Throws ResourceError above `cap` candidates.
struct DMatrices {
    std::vector<CMatrix> data;
    std::vector<CMatrix> sw;
};
DMatrices build_D_matrices(const CandidateIndexing& idx, const SyncWord& sw,
                           std::uint64_t cap = std::uint64_t{1} << 20);

/// (min over SW candidates - min over data candidates) / N_s^L_tot.
double alrt_statistic(const CVector& r_post, const BlockModel& model);

/// ALRT with the minimizations restricted to the grid sets.
double ralrt_statistic(const CVector& r_post, const BlockModel& model, const GridSets& grids);

/// RALRT evaluated with an estimated channel matrix.
double salrt_statistic(const CVector& r_post, const CMatrix& B_hat, const CMatrix& C_inv,
                       const GridSets& grids, const CandidateIndexing& idx, const SyncWord& sw);

/// |r^H f_sw|^2 over the first L_sw raw window entries.
double correlator_statistic(const CVec& r_raw, const SyncWord& sw);

}  // namespace lptvsync
