// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace lptvsync {

namespace {

double log_sum_exp_neg(const Eigen::VectorXd& f) {
    // log sum exp(-f)
    const double lo = f.minCoeff();
    return -lo + std::log((-(f.array() - lo)).exp().sum());
}

// Every index whose digits differ from `base` in at most `e` of `n` positions.
void expand_neighbours(const std::vector<std::size_t>& base, int e, int ns,
                       std::vector<std::uint64_t>& out) {
    const int n = static_cast<int>(base.size());
    std::vector<std::uint64_t> place(n);
    std::uint64_t p = 1;
    for (int d = 0; d < n; ++d) {
        place[d] = p;
        p *= static_cast<std::uint64_t>(ns);
    }
    std::uint64_t base_index = 0;
    for (int d = 0; d < n; ++d) base_index += base[d] * place[d];

    std::vector<int> chosen;
    // recursive walk over position subsets in increasing order, then symbol substitutions
    auto substitute = [&](auto&& self, std::size_t k, std::uint64_t index) -> void {
        if (k == chosen.size()) {
            out.push_back(index);
            return;
        }
        const int pos = chosen[k];
        const std::uint64_t without = index - base[pos] * place[pos];
        for (int s = 0; s < ns; ++s) {
            if (static_cast<std::size_t>(s) == base[pos]) continue;
            self(self, k + 1, without + static_cast<std::uint64_t>(s) * place[pos]);
        }
    };
    auto choose = [&](auto&& self, int start, int remaining) -> void {
        if (remaining == 0) {
            substitute(substitute, 0, base_index);
            return;
        }
        for (int pos = start; pos <= n - remaining; ++pos) {
            chosen.push_back(pos);
            self(self, pos + 1, remaining - 1);
            chosen.pop_back();
        }
    };
    for (int size = 0; size <= std::min(e, n); ++size) choose(choose, 0, size);
}

}  // namespace

const char* to_string(DetectorId id) noexcept {
    switch (id) {
        case DetectorId::LRT: return "lrt";
        case DetectorId::ALRT: return "alrt";
        case DetectorId::RALRT: return "ralrt";
        case DetectorId::SALRT: return "salrt";
        case DetectorId::Correlator: return "correlator";
    }
    return "unknown";
}

DetectorId parse_detector(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (DetectorId id : all_detectors()) {
        if (lower == to_string(id)) return id;
    }
    if (lower == "corr") return DetectorId::Correlator;
    throw ConfigError("detectors", "unknown detector '" + name + "'");
}

std::vector<DetectorId> all_detectors() {
    return {DetectorId::LRT, DetectorId::ALRT, DetectorId::RALRT, DetectorId::SALRT,
            DetectorId::Correlator};
}

Orientation orientation_of(DetectorId id) noexcept {
    return id == DetectorId::Correlator ? Orientation::LargeFavorsH1 : Orientation::LargeFavorsH0;
}

Hypothesis decide(const DetectorStatistic& stat, double threshold) noexcept {
    if (stat.orientation == Orientation::LargeFavorsH1) {
        return stat.value >= threshold ? Hypothesis::H1 : Hypothesis::H0;
    }
    return stat.value > threshold ? Hypothesis::H0 : Hypothesis::H1;
}

// ---------------------------------------------------------------------------

CandidateIndexing::CandidateIndexing(const FrameGeometry& geom, const Constellation& constellation)
    : geom_(geom),
      constellation_(constellation),
      ns_(static_cast<int>(constellation.size())),
      block_count_(ipow(constellation.size(), static_cast<unsigned>(geom.N))),
      fill_count_(ipow(constellation.size(), static_cast<unsigned>(geom.L_ch))) {}

std::uint64_t CandidateIndexing::data_count() const {
    return ipow(static_cast<std::uint64_t>(ns_), static_cast<unsigned>(geom_.L_tot));
}

std::uint64_t CandidateIndexing::sw_count() const {
    return ipow(static_cast<std::uint64_t>(ns_), static_cast<unsigned>(geom_.M * geom_.L_ch));
}

std::uint64_t CandidateIndexing::data_block(std::uint64_t l, int m) const noexcept {
    for (int i = 0; i < m; ++i) l /= block_count_;
    return l % block_count_;
}

std::uint64_t CandidateIndexing::sw_fill(std::uint64_t u, int m) const noexcept {
    for (int i = 0; i < m; ++i) u /= fill_count_;
    return u % fill_count_;
}

std::uint64_t CandidateIndexing::join_data(const std::vector<std::uint64_t>& blocks) const noexcept {
    std::uint64_t l = 0;
    for (std::size_t m = blocks.size(); m-- > 0;) l = l * block_count_ + blocks[m];
    return l;
}

std::uint64_t CandidateIndexing::join_sw(const std::vector<std::uint64_t>& fills) const noexcept {
    std::uint64_t u = 0;
    for (std::size_t m = fills.size(); m-- > 0;) u = u * fill_count_ + fills[m];
    return u;
}

std::size_t CandidateIndexing::digit(std::uint64_t index, int d) const noexcept {
    for (int i = 0; i < d; ++i) index /= static_cast<std::uint64_t>(ns_);
    return static_cast<std::size_t>(index % static_cast<std::uint64_t>(ns_));
}

CVector CandidateIndexing::data_vector(std::uint64_t j) const {
    CVector a(geom_.N);
    for (int d = 0; d < geom_.N; ++d) {
        a(d) = constellation_[static_cast<std::size_t>(j % ns_)];
        j /= static_cast<std::uint64_t>(ns_);
    }
    return a;
}

CVector CandidateIndexing::sw_vector(std::uint64_t u, int m, const SyncWord& sw) const {
    CVector a(geom_.N);
    const CVec t = sw.block(geom_.M - 1 - m);
    for (int k = 0; k < geom_.K; ++k) a(k) = t[k];
    for (int d = 0; d < geom_.L_ch; ++d) {
        a(geom_.K + d) = constellation_[static_cast<std::size_t>(u % ns_)];
        u /= static_cast<std::uint64_t>(ns_);
    }
    return a;
}

CMatrix CandidateIndexing::data_table() const {
    CMatrix t(geom_.N, static_cast<Eigen::Index>(block_count_));
    for (std::uint64_t j = 0; j < block_count_; ++j) t.col(static_cast<Eigen::Index>(j)) = data_vector(j);
    return t;
}

CMatrix CandidateIndexing::sw_table(int m, const SyncWord& sw) const {
    CMatrix t(geom_.N, static_cast<Eigen::Index>(fill_count_));
    for (std::uint64_t u = 0; u < fill_count_; ++u) t.col(static_cast<Eigen::Index>(u)) = sw_vector(u, m, sw);
    return t;
}

// ---------------------------------------------------------------------------

HardDecisions hard_decision(const CVec& r_raw, const CandidateIndexing& idx) {
    const FrameGeometry& g = idx.geometry();
    if (static_cast<int>(r_raw.size()) < g.L_tot) {
        throw StructuralError("hard decision needs L_tot raw samples");
    }
    const Constellation& c = idx.constellation();
    const auto ns = static_cast<std::uint64_t>(idx.N_s());
    HardDecisions hd;
    hd.data_blocks.resize(g.M);
    hd.sw_fills.resize(g.M);
    for (int m = 0; m < g.M; ++m) {
        std::uint64_t j = 0;
        for (int d = g.N - 1; d >= 0; --d) j = j * ns + c.nearest(r_raw[m * g.N + d]);
        hd.data_blocks[m] = j;
        std::uint64_t u = 0;
        for (int d = g.L_ch - 1; d >= 0; --d) u = u * ns + c.nearest(r_raw[m * g.N + g.K + d]);
        hd.sw_fills[m] = u;
    }
    return hd;
}

std::uint64_t GridSets::data_size() const noexcept {
    std::uint64_t n = 1;
    for (const auto& d : data) n *= d.size();
    return n;
}

std::uint64_t GridSets::sw_size() const noexcept {
    std::uint64_t n = 1;
    for (const auto& s : sw) n *= s.size();
    return n;
}

std::uint64_t grid_block_size(int n, int e, int N_s) {
    std::uint64_t total = 0;
    std::uint64_t binom = 1;
    for (int l = 0; l <= std::min(e, n); ++l) {
        if (l > 0) binom = binom * static_cast<std::uint64_t>(n - l + 1) / static_cast<std::uint64_t>(l);
        total += binom * ipow(static_cast<std::uint64_t>(N_s - 1), static_cast<unsigned>(l));
    }
    return total;
}

GridSets build_grid_sets(const HardDecisions& hd, const CandidateIndexing& idx, int e_r0, int e_r1) {
    const FrameGeometry& g = idx.geometry();
    if (e_r0 < 0 || e_r0 > g.N) throw StructuralError("e_r0 must lie in [0, N]");
    if (e_r1 < 0 || e_r1 > g.L_ch) throw StructuralError("e_r1 must lie in [0, L_ch]");
    if (static_cast<int>(hd.data_blocks.size()) != g.M || static_cast<int>(hd.sw_fills.size()) != g.M) {
        throw StructuralError("hard decisions do not match the frame geometry");
    }
    GridSets gs;
    gs.e_r0 = e_r0;
    gs.e_r1 = e_r1;
    gs.data.resize(g.M);
    gs.sw.resize(g.M);
    for (int m = 0; m < g.M; ++m) {
        std::vector<std::size_t> digits(g.N);
        for (int d = 0; d < g.N; ++d) digits[d] = idx.digit(hd.data_blocks[m], d);
        expand_neighbours(digits, e_r0, idx.N_s(), gs.data[m]);
        std::vector<std::size_t> fill(g.L_ch);
        for (int d = 0; d < g.L_ch; ++d) fill[d] = idx.digit(hd.sw_fills[m], d);
        expand_neighbours(fill, e_r1, idx.N_s(), gs.sw[m]);
    }
    return gs;
}

// ---------------------------------------------------------------------------

CMatrix invert_covariance(const CMatrix& C) {
    if (C.rows() != C.cols()) throw StructuralError("covariance must be square");
    Eigen::LLT<CMatrix> llt(C);
    if (llt.info() != Eigen::Success) {
        throw LinearAlgebraError("noise covariance is singular or not positive definite");
    }
    CMatrix inv = llt.solve(CMatrix::Identity(C.rows(), C.cols()));
    if (!inv.allFinite()) throw LinearAlgebraError("noise covariance inverse is not finite");
    return inv;
}

BlockModel::BlockModel(const CMatrix& B, const CMatrix& C_inv, const CandidateIndexing& idx,
                       const SyncWord& sw)
    : B_(B), C_inv_(C_inv), idx_(idx), sw_(sw) {
    const FrameGeometry& g = idx.geometry();
    if (B.rows() != g.K || B.cols() != g.N) throw StructuralError("B must be K x N");
    if (C_inv.rows() != g.K || C_inv.cols() != g.K) throw StructuralError("C_z inverse must be K x K");
    W_ = B.adjoint() * C_inv;
    G_ = W_ * B;
    data_table_ = idx.data_table();
    data_quad_ = (data_table_.adjoint() * G_ * data_table_).diagonal().real();
    for (int m = 0; m < g.M; ++m) {
        sw_table_.push_back(idx.sw_table(m, sw));
        const CMatrix& t = sw_table_.back();
        sw_quad_.push_back((t.adjoint() * G_ * t).diagonal().real());
    }
}

std::vector<CVector> BlockModel::project(const CVector& r_post) const {
    const FrameGeometry& g = idx_.geometry();
    if (r_post.size() != g.L_sw) throw StructuralError("post-processed vector must have L_sw entries");
    std::vector<CVector> y;
    y.reserve(g.M);
    for (int m = 0; m < g.M; ++m) y.push_back(W_ * r_post.segment(m * g.K, g.K));
    return y;
}

Eigen::VectorXd BlockModel::data_objective(const CVector& y_m) const {
    return data_quad_ - 2.0 * (data_table_.adjoint() * y_m).real();
}

Eigen::VectorXd BlockModel::sw_objective(const CVector& y_m, int m) const {
    return sw_quad_.at(m) - 2.0 * (sw_table_.at(m).adjoint() * y_m).real();
}

double lrt_log_statistic(const CVector& r_post, const BlockModel& model) {
    const auto y = model.project(r_post);
    double h0 = 0.0;
    double h1 = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) {
        h0 += log_sum_exp_neg(model.data_objective(y[m]));
        h1 += log_sum_exp_neg(model.sw_objective(y[m], static_cast<int>(m)));
    }
    return h0 - h1;
}

DMatrices build_D_matrices(const CandidateIndexing& idx, const SyncWord& sw, std::uint64_t cap) {
    const FrameGeometry& g = idx.geometry();
    const std::uint64_t n_data = idx.data_count();
    const std::uint64_t n_sw = idx.sw_count();
    if (n_data > cap || n_sw > cap) {
        throw ResourceError("D-matrix enumeration exceeds the materialization cap (" +
                            std::to_string(cap) + "); evaluate per block instead");
    }
    DMatrices d;
    d.data.reserve(n_data);
    for (std::uint64_t l = 0; l < n_data; ++l) {
        CMatrix acc = CMatrix::Zero(g.N, g.N);
        for (int m = 0; m < g.M; ++m) {
            const CVector a = idx.data_vector(idx.data_block(l, m));
            acc += a * a.adjoint();
        }
        d.data.push_back(std::move(acc));
    }
    d.sw.reserve(n_sw);
    for (std::uint64_t u = 0; u < n_sw; ++u) {
        CMatrix acc = CMatrix::Zero(g.N, g.N);
        for (int m = 0; m < g.M; ++m) {
            const CVector a = idx.sw_vector(idx.sw_fill(u, m), m, sw);
            acc += a * a.adjoint();
        }
        d.sw.push_back(std::move(acc));
    }
    return d;
}

double alrt_statistic(const CVector& r_post, const BlockModel& model) {
    const auto y = model.project(r_post);
    double h0 = 0.0;
    double h1 = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) {
        h0 += model.data_objective(y[m]).minCoeff();
        h1 += model.sw_objective(y[m], static_cast<int>(m)).minCoeff();
    }
    return (h1 - h0) / static_cast<double>(model.indexing().data_count());
}

double ralrt_statistic(const CVector& r_post, const BlockModel& model, const GridSets& grids) {
    const auto y = model.project(r_post);
    if (grids.data.size() != y.size() || grids.sw.size() != y.size()) {
        throw StructuralError("grid sets do not match the number of blocks");
    }
    double h0 = 0.0;
    double h1 = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) {
        if (grids.data[m].empty() || grids.sw[m].empty()) throw StructuralError("empty grid set");
        const Eigen::VectorXd f0 = model.data_objective(y[m]);
        const Eigen::VectorXd f1 = model.sw_objective(y[m], static_cast<int>(m));
        double best0 = std::numeric_limits<double>::infinity();
        for (std::uint64_t j : grids.data[m]) best0 = std::min(best0, f0(static_cast<Eigen::Index>(j)));
        double best1 = std::numeric_limits<double>::infinity();
        for (std::uint64_t u : grids.sw[m]) best1 = std::min(best1, f1(static_cast<Eigen::Index>(u)));
        h0 += best0;
        h1 += best1;
    }
    return (h1 - h0) / static_cast<double>(model.indexing().data_count());
}

double salrt_statistic(const CVector& r_post, const CMatrix& B_hat, const CMatrix& C_inv,
                       const GridSets& grids, const CandidateIndexing& idx, const SyncWord& sw) {
    const FrameGeometry& g = idx.geometry();
    if (B_hat.rows() != g.K || B_hat.cols() != g.N) throw StructuralError("B_hat must be K x N");
    if (r_post.size() != g.L_sw) throw StructuralError("post-processed vector must have L_sw entries");
    if (static_cast<int>(grids.data.size()) != g.M || static_cast<int>(grids.sw.size()) != g.M) {
        throw StructuralError("grid sets do not match the number of blocks");
    }
    // only the grid candidates are touched, since B_hat changes every window
    const CMatrix W = B_hat.adjoint() * C_inv;
    const CMatrix G = W * B_hat;
    auto objective = [&](const CVector& a, const CVector& y) {
        return (a.adjoint() * G * a)(0).real() - 2.0 * y.dot(a).real();
    };
    double h0 = 0.0;
    double h1 = 0.0;
    for (int m = 0; m < g.M; ++m) {
        if (grids.data[m].empty() || grids.sw[m].empty()) throw StructuralError("empty grid set");
        const CVector y = W * r_post.segment(m * g.K, g.K);
        double best0 = std::numeric_limits<double>::infinity();
        for (std::uint64_t j : grids.data[m]) best0 = std::min(best0, objective(idx.data_vector(j), y));
        double best1 = std::numeric_limits<double>::infinity();
        for (std::uint64_t u : grids.sw[m]) best1 = std::min(best1, objective(idx.sw_vector(u, m, sw), y));
        h0 += best0;
        h1 += best1;
    }
    return (h1 - h0) / static_cast<double>(idx.data_count());
}

double correlator_statistic(const CVec& r_raw, const SyncWord& sw) {
    const CVec& f = sw.f_sw();
    if (r_raw.size() < f.size()) throw StructuralError("correlator needs L_sw raw samples");
    cplx acc{};
    for (std::size_t k = 0; k < f.size(); ++k) acc += std::conj(r_raw[k]) * f[k];
    return std::norm(acc);
}

}  // namespace lptvsync
