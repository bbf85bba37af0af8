#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "cpe/conic_program.hpp"
#include "cpe/estimators.hpp"

namespace cpe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CVector fft(const CVector& x, Index length) {
    Eigen::FFT<double> engine;
    std::vector<Complex> in(static_cast<std::size_t>(length), Complex(0.0, 0.0));
    for (Index i = 0; i < x.size(); ++i) in[static_cast<std::size_t>(i)] = x(i);
    std::vector<Complex> out;
    engine.fwd(out, in);
    return Eigen::Map<CVector>(out.data(), length);
}

CVector fftshift(const CVector& x) {
    const Index n = x.size();
    const Index half = n / 2;
    CVector out(n);
    for (Index i = 0; i < n; ++i) out(i) = x((i + n - half) % n);
    return out;
}

// Forward-backward smoothed covariance of length-l snapshots of z.
CMatrix smoothed_covariance(const CVector& z, Index l) {
    CMatrix r = CMatrix::Zero(l, l);
    const Index count = z.size() - l + 1;
    for (Index s = 0; s < count; ++s) {
        const CVector snap = z.segment(s, l);
        const CVector back = snap.reverse().conjugate();
        r.noalias() += snap * snap.adjoint();
        r.noalias() += back * back.adjoint();
    }
    return r / static_cast<double>(2 * count);
}

// ||a(w) - Es Es^H a(w)||^2 for the steering vector a(w)_k = exp(j w k).
double noise_projection(const CMatrix& es, double w) {
    const Index l = es.rows();
    CVector a(l);
    for (Index k = 0; k < l; ++k) a(k) = std::polar(1.0, w * static_cast<double>(k));
    const CVector proj = es.adjoint() * a;
    return (a - es * proj).squaredNorm();
}

}  // namespace

EstimationResult run_tde_music(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg) {
    cfg.validate();
    const ParametricDictionary& dict = ctx.dict;
    if (dict.kind != ModelKind::tde) throw ConfigError("TDE-MUSIC needs the chirp (tde) model");
    const Index n = dict.rows();
    const Index l = cfg.music.subarray > 0 ? cfg.music.subarray : n / 3;
    if (cfg.K >= l || l >= n) throw ConfigError("MUSIC needs K < L < N");

    const CVector spectrum = fft(dict.model.atom(0.0), n);
    if (spectrum.cwiseAbs().minCoeff() <= 1e-8) {
        throw PipelineError("pulse spectrum has a near-zero bin; spectral division is undefined");
    }

    EstimationResult res;
    CVector f_rec;
    if (ctx.op.matrix.rows() == n) {
        // No compression: invert the square operator directly.
        const Eigen::MatrixXd psi = ctx.op.matrix.cast<double>();
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(psi);
        if (qr.rank() < n) throw PipelineError("square measurement operator is singular");
        f_rec = CVector(n);
        f_rec.real() = qr.solve(y.real());
        f_rec.imag() = qr.solve(y.imag());
        res.diag.solver_status = "direct";
    } else {
        const L1Result l1 = l1_synthesis(ctx.proj.ad, y, std::sqrt(cfg.sigma_sq), cfg.solver);
        res.diag.solver_status = to_string(l1.status);
        if (l1.status == SolveStatus::infeasible) {
            throw PipelineError("l1 synthesis infeasible for the given noise level");
        }
        f_rec = dict.atoms * l1.x;
    }

    // Delay b becomes the exponential exp(-j 2 pi k b / (N Ts)) over signed frequency bins k.
    const CVector z = fftshift(fft(f_rec, n).cwiseQuotient(spectrum));
    const CMatrix cov = smoothed_covariance(z, l);
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov);
    const CMatrix es = eig.eigenvectors().rightCols(cfg.K);

    const Index refine = cfg.music.refinement * dict.redundancy;
    const Index grid = n * refine;
    RVector denom = RVector::Constant(grid, static_cast<double>(l));
    for (Index k = 0; k < cfg.K; ++k) {
        const CVector e_fft = fft(es.col(k), grid);
        denom -= e_fft.cwiseAbs2();
    }
    auto omega = [&](Index q) { return kTwoPi * static_cast<double>(q) / static_cast<double>(grid); };
    auto wrap_index = [&](Index q) { return ((q % grid) + grid) % grid; };

    std::vector<Index> peaks;
    for (Index q = 0; q < grid; ++q) {
        const double v = denom(q);
        if (v <= denom(wrap_index(q - 1)) && v < denom(wrap_index(q + 1))) peaks.push_back(q);
    }
    // Re-evaluate near candidate minima without the L - ||.||^2 cancellation.
    for (Index& q : peaks) {
        Index best = q;
        double best_val = noise_projection(es, omega(q));
        for (Index off = -2; off <= 2; ++off) {
            if (off == 0) continue;
            const Index cand = wrap_index(q + off);
            const double val = noise_projection(es, omega(cand));
            if (val < best_val) {
                best_val = val;
                best = cand;
            }
        }
        q = best;
        denom(q) = best_val;
    }
    std::sort(peaks.begin(), peaks.end(), [&](Index a, Index b) { return denom(a) < denom(b); });

    std::vector<Index> chosen;
    for (Index q : peaks) {
        if (static_cast<Index>(chosen.size()) >= cfg.K) break;
        bool separated = true;
        for (Index c : chosen) {
            const Index d = std::min(wrap_index(q - c), wrap_index(c - q));
            if (d < refine) separated = false;
        }
        if (separated) chosen.push_back(q);
    }
    if (static_cast<Index>(chosen.size()) < cfg.K) res.status = "music_few_peaks";

    const double period = dict.model.period();
    res.b_hat.resize(static_cast<Index>(chosen.size()));
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        const double w = omega(chosen[k]);
        res.b_hat(static_cast<Index>(k)) = dict.model.wrap(-w / kTwoPi * period);
    }
    CMatrix ab(y.size(), res.b_hat.size());
    for (Index k = 0; k < res.b_hat.size(); ++k) ab.col(k) = ctx.op.apply(dict.model.atom(res.b_hat(k)));
    res.a_hat = res.b_hat.size() > 0 ? CVector(ab.completeOrthogonalDecomposition().solve(y)) : CVector();
    res.f_hat = CVector::Zero(n);
    for (Index k = 0; k < res.b_hat.size(); ++k) res.f_hat += res.a_hat(k) * dict.model.atom(res.b_hat(k));
    return res;
}

}  // namespace cpe
