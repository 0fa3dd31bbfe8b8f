// SPDX-License-Identifier: Apache-2.0
//
// Common scalar/matrix aliases and the error hierarchy shared by every module.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lptvsync {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lengths, shapes or index ranges that do not fit together.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A noise or channel model whose derived quantities are inconsistent (e.g. a
/// covariance that is not positive semidefinite).
class ModelError : public Error {
public:
    using Error::Error;
};

class LinearAlgebraError : public Error {
public:
    using Error::Error;
};

/// An enumeration would exceed the configured materialization budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration; `field` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Integer power for enumeration sizes; throws ResourceError on overflow.
std::uint64_t ipow(std::uint64_t base, unsigned exp);

/// Non-negative modulo for periodic lookups.
constexpr long long pmod(long long a, long long n) noexcept {
    const long long r = a % n;
    return r < 0 ? r + n : r;
}

}  // namespace lptvsync
