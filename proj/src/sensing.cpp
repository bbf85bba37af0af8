#include "cpe/sensing.hpp"

#include <cmath>
#include <random>

namespace cpe {

CVector MeasurementOperator::apply(const CVector& f) const {
    if (f.size() != cols()) throw DomainError("signal length does not match the operator");
    CVector y = CVector::Zero(rows());
    for (Index i = 0; i < cols(); ++i) {
        y(row_of[static_cast<std::size_t>(i)]) += static_cast<double>(sign[static_cast<std::size_t>(i)]) * f(i);
    }
    return y;
}

CMatrix MeasurementOperator::apply(const CMatrix& f) const {
    if (f.rows() != cols()) throw DomainError("signal length does not match the operator");
    CMatrix y = CMatrix::Zero(rows(), f.cols());
    for (Index i = 0; i < cols(); ++i) {
        y.row(row_of[static_cast<std::size_t>(i)]) += static_cast<double>(sign[static_cast<std::size_t>(i)]) * f.row(i);
    }
    return y;
}

CVector MeasurementOperator::adjoint(const CVector& y) const {
    if (y.size() != rows()) throw DomainError("measurement length does not match the operator");
    CVector f(cols());
    for (Index i = 0; i < cols(); ++i) {
        f(i) = static_cast<double>(sign[static_cast<std::size_t>(i)]) * y(row_of[static_cast<std::size_t>(i)]);
    }
    return f;
}

MeasurementOperator build_operator(Index n, double kappa, std::uint64_t seed) {
    if (n < 1) throw ConfigError("operator needs N >= 1");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in (0, 1]");
    const double exact = kappa * static_cast<double>(n);
    const Index m = static_cast<Index>(std::llround(exact));
    if (std::abs(exact - static_cast<double>(m)) > 1e-9 * static_cast<double>(n) || m < 1) {
        throw ConfigError("kappa * N must be an integer; pick kappa as a multiple of 1/N");
    }

    MeasurementOperator op;
    op.kappa = kappa;
    op.seed = seed;
    op.matrix = Eigen::MatrixXi::Zero(m, n);
    op.row_of.resize(static_cast<std::size_t>(n));
    op.sign.resize(static_cast<std::size_t>(n));

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (Index row = 0; row < m; ++row) {
        const Index begin = row * n / m;
        const Index end = (row + 1) * n / m;
        for (Index i = begin; i < end; ++i) {
            const int s = coin(rng) ? 1 : -1;
            op.matrix(row, i) = s;
            op.row_of[static_cast<std::size_t>(i)] = row;
            op.sign[static_cast<std::size_t>(i)] = static_cast<signed char>(s);
        }
    }
    return op;
}

CVector measure(const MeasurementOperator& op, const CVector& f, const NoiseSpec& noise) {
    switch (noise.kind) {
    case NoiseKind::none:
        return op.apply(f);
    case NoiseKind::signal:
        return op.apply(add_noise(f, noise, f.squaredNorm()));
    case NoiseKind::measurement: {
        const CVector clean = op.apply(f);
        return add_noise(clean, noise, clean.squaredNorm());
    }
    }
    return op.apply(f);
}

double expected_noise_energy(const MeasurementOperator& op, const CVector& f, const NoiseSpec& noise) {
    if (noise.kind == NoiseKind::none || std::isinf(noise.snr)) return 0.0;
    // Each row integrates N/M i.i.d. samples of variance sigma^2/N, so the folded
    // noise energy at y equals the injected energy ||f||^2 / snr.
    if (noise.kind == NoiseKind::signal) return f.squaredNorm() / noise.snr;
    return op.apply(f).squaredNorm() / noise.snr;
}

}  // namespace cpe
