#pragma once

#include <cstdint>
#include <vector>

#include "cpe/signal.hpp"
#include "cpe/types.hpp"

namespace cpe {

/// Random demodulator Psi = H diag(eps) with entries in {-1, 0, +1}.
///
/// eps is a Rademacher chipping sequence and H integrates consecutive blocks of
/// chipped samples; row m covers samples [floor(mN/M), floor((m+1)N/M)).
struct MeasurementOperator {
    Eigen::MatrixXi matrix;          ///< M x N
    std::vector<Index> row_of;       ///< row holding the single nonzero of column i
    std::vector<signed char> sign;   ///< that nonzero, +1 or -1
    double kappa = 1.0;
    std::uint64_t seed = 0;

    Index rows() const { return matrix.rows(); }
    Index cols() const { return matrix.cols(); }

    CVector apply(const CVector& f) const;
    CMatrix apply(const CMatrix& f) const;
    /// Psi^T y
    CVector adjoint(const CVector& y) const;
};

/// Throws ConfigError unless kappa * n is an integer M with 1 <= M <= n.
MeasurementOperator build_operator(Index n, double kappa, std::uint64_t seed);

/// y = Psi (f + n) + w. Signal noise is referenced to ||f||^2, measurement noise to ||Psi f||^2.
CVector measure(const MeasurementOperator& op, const CVector& f, const NoiseSpec& noise);

/// Expected ||y - Psi f||^2 for the given noise spec (0 when noiseless).
double expected_noise_energy(const MeasurementOperator& op, const CVector& f, const NoiseSpec& noise);

}  // namespace cpe
