// SPDX-License-Identifier: Apache-2.0
//
// Wide-sense cyclostationary primitives: decimated components decomposition,
// filtered-innovation noise generation and the analytic periodic
// autocorrelation used to build the receiver's noise covariance.

#pragma once

#include <random>

#include "lptvsync/types.hpp"

namespace lptvsync {

/// Generative description of additive cyclostationary Gaussian noise:
/// Z[m] = sum_k shaping_fir[k] * W[m-k], where W is proper complex, white,
/// with E|W[m]|^2 = variance_profile[m mod period].
class NoiseModel {
public:
    NoiseModel(std::vector<double> variance_profile, std::vector<double> shaping_fir);

    static NoiseModel white(double variance = 1.0);

    int period() const noexcept { return static_cast<int>(variance_.size()); }
    int memory() const noexcept { return static_cast<int>(fir_.size()) - 1; }
    const std::vector<double>& variance_profile() const noexcept { return variance_; }
    const std::vector<double>& shaping_fir() const noexcept { return fir_; }

    double variance(long long m) const noexcept { return variance_[pmod(m, period())]; }

    /// Same shape with every innovation variance multiplied by `factor`.
    NoiseModel scaled(double factor) const;

    bool operator==(const NoiseModel&) const = default;

private:
    std::vector<double> variance_;
    std::vector<double> fir_;
};

/// N0 decimated components of a sequence. Component q holds x[n*N0 + q].
struct DcdFrame {
    int base_period = 1;
    std::vector<CVec> components;
};

DcdFrame dcd_decompose(const CVec& x, int base_period);
CVec dcd_reconstruct(const DcdFrame& frame);

/// Draws `length` noise samples for absolute times start_time .. start_time+length-1.
/// The innovation phase follows the absolute time so windows at different
/// offsets see the correct point of the variance cycle.
CVec generate_acgn(const NoiseModel& model, std::size_t length, std::mt19937_64& rng,
                   long long start_time = 0);

/// c_z[m,l] = E{Z[m+l] Z*[m]} for the filtered model.
cplx analytic_autocorrelation(const NoiseModel& model, long long m, long long l);

/// K x K matrix with [C]_{a1,a2} = c_z[-a2, a2-a1], i.e. the covariance of
/// the vector (z[0], z[-1], ..., z[-(K-1)]). Throws ModelError if not PSD.
CMatrix noise_cov_matrix(const NoiseModel& model, int K, int N);

}  // namespace lptvsync
