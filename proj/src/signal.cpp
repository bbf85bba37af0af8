#include "cpe/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cpe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Folds x into [-period/2, period/2).
double fold(double x, double period) {
    double r = std::fmod(x + 0.5 * period, period);
    if (r < 0.0) r += period;
    return r - 0.5 * period;
}

CVector chirp_samples(const PulseSpec& spec, const SamplingGrid& grid, double delay) {
    const double shift = delay / grid.ts;
    const double half_width = 0.5 * spec.duration / grid.ts;
    const double n = static_cast<double>(grid.n);
    const double sweep = spec.delta_f / (2.0 * spec.duration);

    CVector g = CVector::Zero(grid.n);
    for (Index i = 0; i < grid.n; ++i) {
        const double offset = fold(static_cast<double>(i) - shift, n);
        if (std::abs(offset) >= half_width) continue;
        const double tau = offset * grid.ts;
        const double window = 0.5 * spec.duration * (1.0 + std::cos(kTwoPi * tau / spec.duration));
        const double phase = kTwoPi * (spec.f0 + sweep * tau) * tau;
        g(i) = std::polar(window, phase);
    }
    if (spec.energy_normalized) {
        const double norm = g.norm();
        if (norm > 0.0) g /= norm;
    }
    return g;
}

}  // namespace

void PulseSpec::validate() const {
    if (!(f0 > 0.0) || !(delta_f > 0.0) || !(duration > 0.0)) {
        throw DomainError("pulse f0, delta_f and duration must be positive");
    }
}

void SamplingGrid::validate() const {
    if (n < 2) throw DomainError("sampling grid needs at least two samples");
    if (!(ts > 0.0)) throw DomainError("sampling period must be positive");
}

CVector sample_pulse(const PulseSpec& spec, const SamplingGrid& grid, double delay) {
    spec.validate();
    grid.validate();
    if (!(delay >= 0.0 && delay < grid.span())) {
        throw DomainError("delay must lie in [0, N*Ts)");
    }
    if (spec.duration >= grid.span()) {
        throw DomainError("pulse duration must be shorter than the observation window");
    }
    return chirp_samples(spec, grid, delay);
}

CVector sample_exponential(double freq_param, const SamplingGrid& grid) {
    const double n = static_cast<double>(grid.n);
    const double scale = 1.0 / std::sqrt(n);
    CVector g(grid.n);
    for (Index i = 0; i < grid.n; ++i) {
        // Reduce the phase argument before scaling to keep precision for large indices.
        const double cycles = std::fmod(freq_param * static_cast<double>(i), n);
        g(i) = std::polar(scale, kTwoPi * cycles / n);
    }
    return g;
}

CVector synthesize(const SparseSignalParams& params, const PulseSpec& spec, const SamplingGrid& grid) {
    if (params.size() < 1 || params.delays.size() != params.size()) {
        throw DomainError("signal needs matching, non-empty amplitude and delay vectors");
    }
    CVector f = CVector::Zero(grid.n);
    for (Index k = 0; k < params.size(); ++k) {
        f += params.amplitudes(k) * sample_pulse(spec, grid, params.delays(k));
    }
    return f;
}

CVector add_noise(const CVector& clean, const NoiseSpec& spec, double energy_ref) {
    if (spec.kind == NoiseKind::none || clean.size() == 0) return clean;
    if (!(spec.snr > 0.0)) throw DomainError("snr must be positive");
    if (std::isinf(spec.snr)) return clean;

    const double per_entry_var = energy_ref / spec.snr / static_cast<double>(clean.size());
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * per_entry_var));
    CVector noisy = clean;
    for (Index i = 0; i < noisy.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        noisy(i) += Complex(re, im);
    }
    return noisy;
}

SignalModel SignalModel::tde(const PulseSpec& pulse, const SamplingGrid& grid) {
    pulse.validate();
    grid.validate();
    if (pulse.duration >= grid.span()) {
        throw DomainError("pulse duration must be shorter than the observation window");
    }
    return SignalModel{ModelKind::tde, pulse, grid};
}

SignalModel SignalModel::fe(Index n) {
    SignalModel m;
    m.kind = ModelKind::fe;
    m.grid = SamplingGrid{n, 1.0};
    m.grid.validate();
    return m;
}

CVector SignalModel::atom(double param) const {
    if (kind == ModelKind::fe) return sample_exponential(param, grid);
    return chirp_samples(pulse, grid, wrap(param));
}

double SignalModel::period() const {
    return kind == ModelKind::tde ? grid.span() : static_cast<double>(grid.n);
}

double SignalModel::spacing(int redundancy) const {
    if (redundancy < 1) throw DomainError("redundancy must be >= 1");
    return (kind == ModelKind::tde ? grid.ts : 1.0) / static_cast<double>(redundancy);
}

double SignalModel::wrap(double param) const {
    const double p = period();
    double r = std::fmod(param, p);
    if (r < 0.0) r += p;
    if (r >= p) r -= p;
    return r;
}

double SignalModel::circular_difference(double a, double b) const {
    return fold(a - b, period());
}

CVector SignalModel::synthesize(const SparseSignalParams& params) const {
    if (params.delays.size() != params.amplitudes.size()) {
        throw DomainError("amplitude and parameter vectors differ in length");
    }
    CVector f = CVector::Zero(grid.n);
    for (Index k = 0; k < params.size(); ++k) f += params.amplitudes(k) * atom(params.delays(k));
    return f;
}

}  // namespace cpe
