#include "cpe/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "cpe/conic_program.hpp"
#include "cpe/kernels.hpp"

namespace cpe {

namespace {

struct AlgorithmName {
    Algorithm algorithm;
    const char* name;
};

constexpr AlgorithmName kNames[] = {
    {Algorithm::bomp, "bomp"},         {Algorithm::paibomp, "paibomp"},
    {Algorithm::poibomp, "poibomp"},   {Algorithm::ccbp, "ccbp"},
    {Algorithm::paibomp_ccbp, "paibomp_ccbp"}, {Algorithm::tde_music, "tde_music"},
};

CVector synthesize_estimates(const SignalModel& model, const RVector& b, const CVector& a) {
    CVector f = CVector::Zero(model.grid.n);
    for (Index k = 0; k < b.size(); ++k) f += a(k) * model.atom(b(k));
    return f;
}

}  // namespace

const char* to_string(Algorithm algorithm) {
    for (const auto& entry : kNames) {
        if (entry.algorithm == algorithm) return entry.name;
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    for (const auto& entry : kNames) {
        if (name == entry.name) return entry.algorithm;
    }
    throw ConfigError("unknown algorithm: " + name);
}

void EstimatorConfig::validate() const {
    if (K < 1) throw ConfigError("K must be >= 1");
    if (xi < 0) throw ConfigError("xi must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(sigma_sq >= 0.0) || !(zeta >= 0.0)) throw ConfigError("sigma_sq and zeta must be >= 0");
    if (music.refinement < 1) throw ConfigError("music refinement must be >= 1");
    solver.validate();
}

EstimationResult run_bomp(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg) {
    return run_ibomp(y, ctx, grid_interpolator(), cfg, false);
}

EstimationResult run_ibomp(const CVector& y, const EstimationContext& ctx, const Interpolator& interp,
                           const EstimatorConfig& cfg, bool refine) {
    cfg.validate();
    const ParametricDictionary& dict = ctx.dict;
    const InterpolationContext ictx{dict, ctx.proj, ctx.arcs};
    const BandExclusionConfig band{cfg.eta, cfg.mu_floor};

    EstimationResult res;
    std::vector<Index> support;
    std::vector<double> b_list;
    CMatrix ab(y.size(), 0);
    CVector a;
    CVector y_res = y;

    for (Index n = 0; n < cfg.K; ++n) {
        const ProxyVector proxy = compute_proxy(y_res, ctx.proj);
        std::vector<Index> excluded = band_exclusion(dict, support, band);
        std::vector<char> banned(static_cast<std::size_t>(dict.size()), 0);
        for (Index i : excluded) banned[static_cast<std::size_t>(i)] = 1;
        Index best = -1;
        double best_val = -1.0;
        for (Index i = 0; i < dict.size(); ++i) {
            if (banned[static_cast<std::size_t>(i)]) continue;
            const double v = std::abs(proxy.values(i));
            if (v > best_val) {
                best_val = v;
                best = i;
            }
        }
        if (best < 0) {
            res.diag.early_stop = true;
            res.status = "early_stop";
            break;
        }
        const InterpolationEstimate est = interp(ictx, y_res, proxy, best);
        if (est.fallback) ++res.diag.interpolation_fallbacks;

        b_list.push_back(est.b_hat);
        ab.conservativeResize(Eigen::NoChange, ab.cols() + 1);
        ab.col(ab.cols() - 1) = ctx.op.apply(dict.model.atom(est.b_hat));
        a = ab.completeOrthogonalDecomposition().solve(y);
        y_res = y - ab * a;
        support.push_back(best);

        res.diag.selected.push_back(best);
        res.diag.excluded.push_back(std::move(excluded));
        res.diag.residual_norms.push_back(y_res.norm());
    }

    res.b_hat = Eigen::Map<const RVector>(b_list.data(), static_cast<Index>(b_list.size()));
    res.a_hat = a.size() == res.b_hat.size() ? a : CVector::Zero(res.b_hat.size());

    if (refine && !support.empty()) {
        if (ctx.arcs == nullptr) throw DomainError("CCBP refinement needs arc bases");
        std::set<Index> omega;
        for (Index s : support) {
            for (Index step = -cfg.xi; step <= cfg.xi; ++step) omega.insert(dict.neighbor(s, step));
        }
        const std::vector<Index> omega_list(omega.begin(), omega.end());
        const CcbpProblem prob = assemble_ccbp(*ctx.arcs, omega_list, ctx.op, y, cfg.lambda, cfg.sigma_sq, cfg.zeta);
        const CcbpSolution sol = solve_ccbp(prob, cfg.solver);
        res.diag.solver_status = to_string(sol.status);
        res.diag.newton_steps = sol.newton_steps;
        const ExtractedEstimates ex = sol.status == SolveStatus::optimal ? extract_estimates(sol, prob, cfg.K)
                                                                          : ExtractedEstimates{{}, {}, {}, true};
        if (!ex.incomplete && static_cast<Index>(ex.b_hat.size()) == res.b_hat.size()) {
            res.diag.refinement_used = true;
            res.b_hat = Eigen::Map<const RVector>(ex.b_hat.data(), static_cast<Index>(ex.b_hat.size()));
            res.a_hat = Eigen::Map<const CVector>(ex.a_hat.data(), static_cast<Index>(ex.a_hat.size()));
        } else {
            res.diag.fell_back = true;
            res.status = "ccbp_fallback";
        }
    }
    res.f_hat = synthesize_estimates(dict.model, res.b_hat, res.a_hat);
    return res;
}

EstimationResult run_ccbp(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg) {
    cfg.validate();
    if (ctx.arcs == nullptr) throw DomainError("CCBP needs arc bases");
    const CcbpRun run =
        solve_ccbp_screened(*ctx.arcs, ctx.proj, ctx.op, y, cfg.lambda, cfg.sigma_sq, cfg.zeta, cfg.K, cfg.solver);
    const ExtractedEstimates ex = extract_estimates(run.solution, run.problem, cfg.K);

    EstimationResult res;
    if (ex.b_hat.empty()) {
        // Nothing survived the sparsity penalty: report the grid-level greedy estimates.
        res = run_bomp(y, ctx, cfg);
        res.diag.fell_back = true;
        res.status = "ccbp_zero_fallback";
    } else {
        res.b_hat = Eigen::Map<const RVector>(ex.b_hat.data(), static_cast<Index>(ex.b_hat.size()));
        res.a_hat = Eigen::Map<const CVector>(ex.a_hat.data(), static_cast<Index>(ex.a_hat.size()));
        res.diag.selected = ex.atoms;
        if (ex.incomplete) res.status = "ccbp_incomplete";
        res.f_hat = synthesize_estimates(ctx.dict.model, res.b_hat, res.a_hat);
    }
    res.diag.solver_status = to_string(run.solution.status);
    res.diag.newton_steps = run.solution.newton_steps;
    if (run.solution.status != SolveStatus::optimal) res.status = std::string("solver_") + to_string(run.solution.status);
    return res;
}

EstimationResult estimate(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    EstimationResult res;
    switch (cfg.algorithm) {
    case Algorithm::bomp:
        res = run_bomp(y, ctx, cfg);
        break;
    case Algorithm::paibomp:
        res = run_ibomp(y, ctx, parabolic_interpolator(), cfg, false);
        break;
    case Algorithm::poibomp:
        res = run_ibomp(y, ctx, polar_interpolator(), cfg, false);
        break;
    case Algorithm::ccbp:
        res = run_ccbp(y, ctx, cfg);
        break;
    case Algorithm::paibomp_ccbp:
        res = run_ibomp(y, ctx, parabolic_interpolator(), cfg, true);
        break;
    case Algorithm::tde_music:
        res = run_tde_music(y, ctx, cfg);
        break;
    }
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace cpe
