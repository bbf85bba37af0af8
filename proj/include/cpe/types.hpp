#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cpe {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Translation-invariant waveform families supported by the library.
enum class ModelKind { tde, fe };

inline const char* to_string(ModelKind kind) { return kind == ModelKind::tde ? "tde" : "fe"; }

/// A parameter fell outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or unsupported user configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The three arc anchors are numerically collinear (theta ~ 0).
class DegenerateArcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The polar least-squares fit has a vanishing cosine coefficient.
class UnstableFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A multi-stage estimator pipeline cannot proceed (e.g. spectral division by ~0).
class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cpe
