#pragma once

#include <cstdint>
#include <limits>

#include "cpe/types.hpp"

namespace cpe {

/// Linear chirp limited by a raised-cosine window.
///
/// The pulse is centred on its delay: for tau = t - b in (-T/2, T/2)
///   g(t, b) = exp(j 2 pi (f0 + delta_f/(2T) tau) tau) * (T/2)(1 + cos(2 pi tau / T))
/// and zero elsewhere. Sampling wraps tau onto the circular interval [0, N Ts),
/// so every shift of the pulse has the same sampled energy.
struct PulseSpec {
    double f0 = 1e6;          ///< centre frequency (Hz)
    double delta_f = 40e6;    ///< swept bandwidth (Hz)
    double duration = 1e-6;   ///< T (s)
    bool energy_normalized = true;

    void validate() const;
};

struct SamplingGrid {
    Index n = 500;
    double ts = 1.0 / 50e6;

    double span() const { return static_cast<double>(n) * ts; }
    void validate() const;
};

struct SparseSignalParams {
    CVector amplitudes;
    RVector delays;  ///< seconds for TDE, cycles-per-record for FE

    Index size() const { return amplitudes.size(); }
};

enum class NoiseKind { none, measurement, signal };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double snr = std::numeric_limits<double>::infinity();  ///< linear
    std::uint64_t seed = 0;
};

/// Samples the chirp delayed by `delay` seconds; `delay` must lie in [0, N Ts).
CVector sample_pulse(const PulseSpec& spec, const SamplingGrid& grid, double delay);

/// Unit-norm complex exponential (1/sqrt(N)) exp(j 2 pi b i / N), i = 0..N-1.
CVector sample_exponential(double freq_param, const SamplingGrid& grid);

/// f = sum_k a_k g(b_k) for the chirp model.
CVector synthesize(const SparseSignalParams& params, const PulseSpec& spec, const SamplingGrid& grid);

/// Adds circular complex Gaussian noise with expected energy energy_ref / snr.
CVector add_noise(const CVector& clean, const NoiseSpec& spec, double energy_ref);

/// One of the two parametric waveform families, evaluated at arbitrary parameters.
///
/// TDE parameters are delays in seconds on the circle [0, N Ts); FE parameters are
/// frequencies in cycles per record on the circle [0, N). Out-of-range values wrap.
struct SignalModel {
    ModelKind kind = ModelKind::tde;
    PulseSpec pulse;
    SamplingGrid grid;

    static SignalModel tde(const PulseSpec& pulse, const SamplingGrid& grid);
    static SignalModel fe(Index n);

    CVector atom(double param) const;
    double period() const;
    /// Atom spacing of a redundancy-c dictionary (Ts/c for TDE, 1/c for FE).
    double spacing(int redundancy) const;
    double wrap(double param) const;
    /// Signed circular difference a - b folded into [-period/2, period/2).
    double circular_difference(double a, double b) const;
    CVector synthesize(const SparseSignalParams& params) const;
};

}  // namespace cpe
