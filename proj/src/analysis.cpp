#include "cpe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <omp.h>

#include "cpe/dictionary.hpp"
#include "cpe/estimators.hpp"
#include "cpe/interpolators.hpp"
#include "cpe/scoring.hpp"
#include "cpe/sensing.hpp"

namespace cpe {

ZetaReport compute_zeta(const SignalModel& model, int c, Index samples) {
    if (c < 1) throw ConfigError("redundancy c must be >= 1");
    if (samples < 2) throw ConfigError("zeta needs at least two samples");
    const double spacing = model.spacing(c);
    const double half = 0.5 * spacing;
    const Index count = model.grid.n * c;
    const double b_p = static_cast<double>(count / 2) * spacing;

    const ArcFrame frame = arc_frame(model, b_p, spacing);
    const CVector g_p = model.atom(b_p);
    const auto angle_to = [&](const CVector& g) {
        return std::acos(std::clamp(g_p.dot(g).real() / (g_p.norm() * g.norm()), -1.0, 1.0));
    };
    const CVector g_edge = model.atom(b_p + half);
    const double edge_angle = angle_to(g_edge);

    double worst = -1.0;
    double worst_dn = 0.0;
    const RVector offsets = RVector::LinSpaced(samples, -half, half);
    for (Index s = 0; s < samples; ++s) {
        const double dn = offsets(s);
        const double dev = std::abs(angle_to(model.atom(b_p + dn)) / edge_angle - std::abs(dn) / half);
        if (dev > worst) {
            worst = dev;
            worst_dn = dn;
        }
    }

    const double a = 2.0 * worst_dn * frame.theta / spacing;
    const CVector approx = frame.c + frame.r * std::cos(a) * frame.u + frame.r * std::sin(a) * frame.v;

    ZetaReport rep;
    rep.c = c;
    rep.samples = samples;
    rep.b_worst = b_p + worst_dn;
    rep.zeta = (model.atom(rep.b_worst) - approx).norm();
    rep.bomp_max_error = (g_edge - g_p).norm();
    return rep;
}

namespace {

std::string lambda_label(double lambda) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "ccbp[lambda=%g]", lambda);
    return buf;
}

// Paired CCBP and BOMP runs disagree by more than a grid spacing: counted as a failure.
bool failed(const MatchScore& score, double spacing_us) {
    return score.missing > 0 || score.b_mse > spacing_us * spacing_us;
}

}  // namespace

LambdaSweepResult lambda_sweep(const LambdaSweepConfig& cfg) {
    if (cfg.trials < 0) throw ConfigError("trials must be >= 0");
    for (double l : cfg.lambdas) {
        if (!(l > 0.0)) throw ConfigError("lambda values must be positive");
    }
    for (double s : cfg.snrs) {
        if (!(s > 0.0)) throw ConfigError("snr values must be positive");
    }
    const SignalModel model =
        cfg.problem == ModelKind::tde ? SignalModel::tde(cfg.pulse, cfg.grid) : SignalModel::fe(cfg.grid.n);
    for (double k : cfg.kappas) {
        const double m = k * static_cast<double>(model.grid.n);
        if (!(k > 0.0 && k <= 1.0) || std::abs(m - std::round(m)) > 1e-9 * static_cast<double>(model.grid.n)) {
            throw ConfigError("each kappa must lie in (0, 1] with kappa * N integral");
        }
    }

    const auto nl = static_cast<Index>(cfg.lambdas.size());
    const auto nk = static_cast<Index>(cfg.kappas.size());
    const auto ns = static_cast<Index>(cfg.snrs.size());
    LambdaSweepResult out;
    for (Index ki = 0; ki < nk; ++ki) {
        for (Index si = 0; si < ns; ++si) {
            LambdaCell ref;
            ref.lambda = std::numeric_limits<double>::quiet_NaN();
            ref.kappa = cfg.kappas[static_cast<std::size_t>(ki)];
            ref.snr = cfg.snrs[static_cast<std::size_t>(si)];
            out.bomp_cells.push_back(ref);
            for (Index li = 0; li < nl; ++li) {
                LambdaCell cell = ref;
                cell.lambda = cfg.lambdas[static_cast<std::size_t>(li)];
                out.cells.push_back(cell);
            }
        }
    }
    if (cfg.trials == 0) return out;

    const ParametricDictionary dict = build_dictionary(model, cfg.redundancy);
    const ArcBasisSet arcs = build_arc_bases(dict);
    const double zeta = compute_zeta(model, cfg.redundancy).zeta;
    const double unit = model.kind == ModelKind::tde ? 1e6 : 1.0;
    const double spacing_units = dict.spacing * unit;

    // Per task: one BOMP record followed by one CCBP record per lambda.
    const Index per_task = nl + 1;
    const Index n_tasks = cfg.trials * nk * ns;
    std::vector<MetricRecord> flat(static_cast<std::size_t>(n_tasks * per_task));
    std::vector<char> fail(flat.size(), 0);

    const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (Index task = 0; task < n_tasks; ++task) {
        const Index trial = task / (nk * ns);
        const Index ki = (task / ns) % nk;
        const Index si = task % ns;
        const auto t64 = static_cast<std::uint64_t>(trial);
        const auto k64 = static_cast<std::uint64_t>(ki);
        const auto s64 = static_cast<std::uint64_t>(si);

        std::mt19937_64 signal_rng = stream_rng(cfg.seed, {0, t64});
        const SparseSignalParams truth = draw_signal(model, 1, 0.0, cfg.amp_min, cfg.amp_max, signal_rng);
        const CVector f = model.synthesize(truth);
        const double kappa = cfg.kappas[static_cast<std::size_t>(ki)];
        const MeasurementOperator op = build_operator(model.grid.n, kappa, stream_rng(cfg.seed, {1, t64, k64})());
        const ProjectedDictionary proj = project(op, dict, &arcs);
        NoiseSpec noise;
        noise.snr = cfg.snrs[static_cast<std::size_t>(si)];
        noise.kind = std::isinf(noise.snr) ? NoiseKind::none : NoiseKind::measurement;
        noise.seed = stream_rng(cfg.seed, {2, t64, k64, s64})();
        const CVector y = measure(op, f, noise);
        const EstimationContext ctx{dict, &arcs, op, proj};

        for (Index j = 0; j < per_task; ++j) {
            EstimatorConfig ecfg;
            ecfg.algorithm = j == 0 ? Algorithm::bomp : Algorithm::ccbp;
            ecfg.K = 1;
            ecfg.lambda = j == 0 ? 1.0 : cfg.lambdas[static_cast<std::size_t>(j - 1)];
            ecfg.sigma_sq = expected_noise_energy(op, f, noise);
            ecfg.zeta = zeta;
            ecfg.solver = cfg.solver;

            MetricRecord rec;
            rec.case_name = "lambda";
            rec.algorithm = j == 0 ? std::string("bomp") : lambda_label(ecfg.lambda);
            rec.kappa = kappa;
            rec.snr = noise.snr;
            rec.trial = trial;
            EstimationResult res;
            try {
                res = estimate(y, ctx, ecfg);
                rec.status = res.status;
            } catch (const std::exception& e) {
                res = EstimationResult{};
                rec.status = std::string("error: ") + e.what();
            }
            const MatchScore score = match_and_score(model, dict.spacing, truth, f, res);
            rec.b_mse_us2 = score.b_mse;
            rec.f_rel_err = score.f_rel_err;
            rec.elapsed_s = cfg.timing ? res.elapsed : 0.0;
            const auto slot = static_cast<std::size_t>(task * per_task + j);
            fail[slot] = failed(score, spacing_units) || rec.status.rfind("error", 0) == 0;
            flat[slot] = std::move(rec);
        }
    }

    for (Index task = 0; task < n_tasks; ++task) {
        const Index ki = (task / ns) % nk;
        const Index si = task % ns;
        const Index cell = ki * ns + si;
        for (Index j = 0; j < per_task; ++j) {
            const auto slot = static_cast<std::size_t>(task * per_task + j);
            LambdaCell& c = j == 0 ? out.bomp_cells[static_cast<std::size_t>(cell)]
                                   : out.cells[static_cast<std::size_t>(cell * nl + j - 1)];
            c.mean_b_mse += flat[slot].b_mse_us2;
            c.failures += fail[slot];
            c.trials += 1;
        }
    }
    for (auto* cells : {&out.cells, &out.bomp_cells}) {
        for (auto& c : *cells) c.mean_b_mse /= static_cast<double>(std::max<Index>(c.trials, 1));
    }

    // Records ordered by algorithm (bomp first), kappa, snr, trial.
    out.records.reserve(flat.size());
    for (Index j = 0; j < per_task; ++j) {
        for (Index ki = 0; ki < nk; ++ki) {
            for (Index si = 0; si < ns; ++si) {
                for (Index t = 0; t < cfg.trials; ++t) {
                    const Index task = (t * nk + ki) * ns + si;
                    out.records.push_back(flat[static_cast<std::size_t>(task * per_task + j)]);
                }
            }
        }
    }
    return out;
}

}  // namespace cpe
