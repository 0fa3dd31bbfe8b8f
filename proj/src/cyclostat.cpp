// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/cyclostat.hpp"

#include <cmath>

namespace lptvsync {

NoiseModel::NoiseModel(std::vector<double> variance_profile, std::vector<double> shaping_fir)
    : variance_(std::move(variance_profile)), fir_(std::move(shaping_fir)) {
    if (variance_.empty()) throw ModelError("noise variance profile is empty");
    for (double v : variance_) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ModelError("noise variance profile entries must be strictly positive");
        }
    }
    if (fir_.empty()) throw ModelError("noise shaping filter is empty");
    if (fir_.front() == 0.0) throw ModelError("noise shaping filter must have a nonzero first tap");
}

NoiseModel NoiseModel::white(double variance) { return NoiseModel({variance}, {1.0}); }

NoiseModel NoiseModel::scaled(double factor) const {
    std::vector<double> v = variance_;
    for (double& x : v) x *= factor;
    return NoiseModel(std::move(v), fir_);
}

DcdFrame dcd_decompose(const CVec& x, int base_period) {
    if (base_period <= 0) throw StructuralError("DCD base period must be positive");
    if (x.size() % static_cast<std::size_t>(base_period) != 0) {
        throw StructuralError("DCD input length is not a multiple of the base period");
    }
    const std::size_t n_per = x.size() / base_period;
    DcdFrame f;
    f.base_period = base_period;
    f.components.assign(base_period, CVec(n_per));
    for (std::size_t n = 0; n < n_per; ++n) {
        for (int q = 0; q < base_period; ++q) {
            f.components[q][n] = x[n * base_period + q];
        }
    }
    return f;
}

CVec dcd_reconstruct(const DcdFrame& frame) {
    if (frame.base_period <= 0 ||
        frame.components.size() != static_cast<std::size_t>(frame.base_period)) {
        throw StructuralError("DCD frame must hold exactly base_period components");
    }
    const std::size_t n_per = frame.components.front().size();
    for (const auto& c : frame.components) {
        if (c.size() != n_per) throw StructuralError("DCD components are ragged");
    }
    CVec x(n_per * frame.base_period);
    for (std::size_t n = 0; n < n_per; ++n) {
        for (int q = 0; q < frame.base_period; ++q) {
            x[n * frame.base_period + q] = frame.components[q][n];
        }
    }
    return x;
}

CVec generate_acgn(const NoiseModel& model, std::size_t length, std::mt19937_64& rng,
                   long long start_time) {
    if (length == 0) throw StructuralError("noise length must be positive");
    const int mem = model.memory();
    const auto& h = model.shaping_fir();
    std::normal_distribution<double> gauss(0.0, 1.0);

    // innovation w[i] sits at absolute time start_time - mem + i
    CVec w(length + mem);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double sd = std::sqrt(model.variance(start_time - mem + static_cast<long long>(i)) / 2.0);
        const double re = gauss(rng);
        const double im = gauss(rng);
        w[i] = cplx(sd * re, sd * im);
    }
    CVec z(length);
    for (std::size_t t = 0; t < length; ++t) {
        cplx acc{};
        for (int k = 0; k <= mem; ++k) acc += h[k] * w[t + mem - k];
        z[t] = acc;
    }
    return z;
}

cplx analytic_autocorrelation(const NoiseModel& model, long long m, long long l) {
    const auto& h = model.shaping_fir();
    const long long mem = model.memory();
    if (l > mem || l < -mem) return {};
    double acc = 0.0;
    for (long long k = 0; k <= mem; ++k) {
        const long long kl = k + l;
        if (kl < 0 || kl > mem) continue;
        acc += h[k] * model.variance(m - k) * h[kl];
    }
    return {acc, 0.0};
}

CMatrix noise_cov_matrix(const NoiseModel& model, int K, int N) {
    if (K <= 0 || N <= 0) throw StructuralError("covariance dimensions must be positive");
    if (N % model.period() != 0) throw StructuralError("N must be a multiple of the noise period");
    if (K > N) throw StructuralError("K must not exceed N");
    CMatrix c(K, K);
    for (int a1 = 0; a1 < K; ++a1) {
        for (int a2 = 0; a2 < K; ++a2) {
            c(a1, a2) = analytic_autocorrelation(model, -a2, a2 - a1);
        }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-10) {
        throw ModelError("noise covariance matrix is not positive semidefinite");
    }
    return c;
}

}  // namespace lptvsync
