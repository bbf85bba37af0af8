// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cpe/analysis.hpp"
#include "cpe/conic_program.hpp"
#include "cpe/dictionary.hpp"
#include "cpe/estimators.hpp"
#include "cpe/experiment.hpp"
#include "cpe/interpolators.hpp"
#include "cpe/sensing.hpp"

using namespace cpe;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, a, b, c, d);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

// metric values grouped by (algorithm, kappa)
using Table = std::map<std::pair<std::string, double>, std::vector<double>>;

Table collect(const std::vector<MetricRecord>& records, bool f_err) {
    Table t;
    for (const auto& r : records) t[{r.algorithm, r.kappa}].push_back(f_err ? r.f_rel_err : r.b_mse_us2);
    return t;
}

const SignalModel& tde() {
    static const SignalModel m = SignalModel::tde(PulseSpec{}, SamplingGrid{});
    return m;
}

ExperimentConfig base(CaseKind kind, std::vector<Algorithm> algs, std::vector<double> kappas, double snr, Index k,
                      Index trials) {
    ExperimentConfig cfg;
    cfg.case_kind = kind;
    cfg.algorithms = std::move(algs);
    cfg.kappa_grid = std::move(kappas);
    cfg.snr_grid = {snr};
    cfg.K = k;
    cfg.trials = trials;
    cfg.seed = 2024;
    return cfg;
}

const double kInf = std::numeric_limits<double>::infinity();

// 1 and 2 share one run so both algorithms see identical data.
const std::vector<MetricRecord>& grid_floor_run() {
    static const std::vector<MetricRecord> recs =
        run_case(base(CaseKind::A, {Algorithm::bomp, Algorithm::poibomp}, {1.0}, kInf, 1, 500));
    return recs;
}

Verdict criterion1() {
    const double b = mean(collect(grid_floor_run(), false)[{"bomp", 1.0}]);
    return {b >= 2.2e-5 && b <= 5e-5, fmt("BOMP b-MSE %.4g us^2 (Ts^2/12 = %.4g)", b, std::pow(0.02, 2) / 12)};
}

Verdict criterion2() {
    auto t = collect(grid_floor_run(), false);
    const double b = mean(t[{"bomp", 1.0}]);
    const double p = mean(t[{"poibomp", 1.0}]);
    return {p <= 1e-3 * b, fmt("PoIBOMP %.4g vs BOMP %.4g us^2, ratio %.3g", p, b, p / b)};
}

Verdict criterion3() {
    const auto dict = build_dictionary(tde(), 1);
    const auto arcs = build_arc_bases(dict);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<Index> pick(0, dict.size() - 1);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Index p = pick(rng);
        const double half = 0.5 * dict.spacing;
        for (double dn : {-half, 0.0, half}) {
            const CVector truth = tde().atom(dict.params(p) + dn);
            worst = std::max(worst, (interpolate_on_arc(arcs, p, dn) - truth).norm() / truth.norm());
        }
    }
    return {worst <= 1e-9, fmt("worst relative anchor error %.3g", worst)};
}

Verdict criterion4() {
    const auto fe = SignalModel::fe(100);
    const auto t1 = compute_zeta(tde(), 1);
    const auto f1 = compute_zeta(fe, 1);
    bool mono = true;
    for (const auto* m : {&tde(), &fe}) {
        double last = compute_zeta(*m, 1).zeta;
        for (int c = 2; c <= 10; ++c) {
            const double z = compute_zeta(*m, c).zeta;
            mono = mono && z <= 1.05 * last;
            last = z;
        }
    }
    return {t1.zeta < t1.bomp_max_error && f1.zeta > t1.zeta && mono,
            fmt("zeta TDE %.4g < BOMP %.4g, zeta FE %.4g, monotone %g", t1.zeta, t1.bomp_max_error, f1.zeta, mono)};
}

std::vector<Index> probes(Index count, Index size, std::uint64_t seed) {
    std::vector<Index> all(static_cast<std::size_t>(size));
    std::iota(all.begin(), all.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(count));
    return all;
}

Verdict criterion5() {
    SolverConfig cfg;
    cfg.tolerance = 1e-9;
    const auto tdict = build_dictionary(tde(), 1);
    const auto t = spark_bound(tdict, SparkMode::complex, probes(10, tdict.size(), 1), cfg);
    const auto fdict = build_dictionary(SignalModel::fe(100), 5);
    const auto fc = spark_bound(fdict, SparkMode::complex, probes(10, fdict.size(), 1), cfg);
    const auto fn = spark_bound(fdict, SparkMode::nonneg, probes(10, fdict.size(), 1), cfg);
    const bool ok = t.all_infeasible && t.bound == tdict.rows() && fc.bound <= 110 &&
                    (fn.all_infeasible || fn.bound >= 90);
    return {ok, fmt("TDE c=1 bound %g, FE c=5 complex %g, FE c=5 nonneg %g (all infeasible %g)",
                    static_cast<double>(t.bound), static_cast<double>(fc.bound), static_cast<double>(fn.bound),
                    fn.all_infeasible)};
}

Verdict criterion6() {
    const auto dict = build_dictionary(tde(), 1);
    const auto arcs = build_arc_bases(dict);
    const double zeta = compute_zeta(tde(), 1).zeta;
    const double ts = tde().grid.ts;
    double worst_violation = 0.0;
    bool all_optimal = true;
    std::vector<double> errors;
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        auto rng = stream_rng(6, {0, trial});
        const auto truth = draw_signal(tde(), 1, 0.0, 1.0, 10.0, rng);
        const auto op = build_operator(500, 0.4, stream_rng(6, {1, trial})());
        const auto proj = project(op, dict, &arcs);
        const CVector y = op.apply(tde().synthesize(truth));
        const auto run = solve_ccbp_screened(arcs, proj, op, y, 1.0, 0.0, zeta, 1, SolverConfig{});
        all_optimal = all_optimal && run.solution.status == SolveStatus::optimal;
        worst_violation = std::max(worst_violation, ccbp_constraint_violation(run.solution, run.problem));
        const auto est = extract_estimates(run.solution, run.problem, 1);
        errors.push_back(est.b_hat.empty() ? ts : std::abs(tde().circular_difference(est.b_hat[0], truth.delays(0))));
    }
    const double med = median(errors) / ts;
    return {all_optimal && worst_violation <= 1e-6 && med <= 1e-2,
            fmt("max violation %.3g, median |error| %.4g Ts, all optimal %g", worst_violation, med, all_optimal)};
}

Verdict criterion7() {
    auto t = collect(run_case(base(CaseKind::B,
                                   {Algorithm::paibomp, Algorithm::poibomp, Algorithm::ccbp, Algorithm::paibomp_ccbp},
                                   {0.4}, kInf, 3, 25)),
                     false);
    const double ccbp = median(t[{"ccbp", 0.4}]);
    const double hybrid = median(t[{"paibomp_ccbp", 0.4}]);
    const double pa = median(t[{"paibomp", 0.4}]);
    const double po = median(t[{"poibomp", 0.4}]);
    std::string detail = fmt("medians CCBP %.4g, PaIBOMP+CCBP %.4g, PaIBOMP %.4g, PoIBOMP %.4g", ccbp, hybrid, pa, po);
    if (ccbp > hybrid) detail += "; CCBP > PaIBOMP+CCBP";
    if (hybrid > pa) detail += "; PaIBOMP+CCBP > PaIBOMP";
    if (ccbp > po) detail += "; CCBP > PoIBOMP";
    return {ccbp <= hybrid && hybrid <= pa && ccbp <= po, detail};
}

Verdict criterion8() {
    const std::vector<Algorithm> all = {Algorithm::bomp, Algorithm::paibomp, Algorithm::poibomp,
                                        Algorithm::ccbp, Algorithm::paibomp_ccbp, Algorithm::tde_music};
    const auto recs = run_case(base(CaseKind::C, all, {0.4, 1.0}, 1e3, 3, 25));
    auto f = collect(recs, true);
    auto b = collect(recs, false);
    bool folding = true;
    std::string detail = "f_rel_err 0.4/1:";
    for (Algorithm a : all) {
        const std::string name = to_string(a);
        const double lo = mean(f[{name, 0.4}]);
        const double hi = mean(f[{name, 1.0}]);
        folding = folding && lo > hi;
        detail += fmt(" %.3g", lo / hi);
        detail += std::string("(") + name + ")";
    }
    auto ratio = [&](const char* name) { return mean(b[{name, 0.4}]) / mean(b[{name, 1.0}]); };
    const double rb = ratio("bomp");
    const double rc = ratio("ccbp");
    const double rm = ratio("tde_music");
    detail += fmt("; b-MSE ratio BOMP %.3g, CCBP %.3g, MUSIC %.3g", rb, rc, rm);
    return {folding && rc < rb && rm < rb, detail};
}

Verdict criterion9() {
    LambdaSweepConfig cfg;
    cfg.lambdas = {1.0, 1e3, 1e6};
    cfg.kappas = {1.0};
    cfg.snrs = {1e3};
    cfg.trials = 25;
    cfg.seed = 9;
    const auto res = lambda_sweep(cfg);
    const double l1 = res.cells[0].mean_b_mse;
    const double l3 = res.cells[1].mean_b_mse;
    const double l6 = res.cells[2].mean_b_mse;
    const double bomp = res.bomp_cells[0].mean_b_mse;
    const bool ok = 10 * l1 <= l3 && 10 * l1 <= l6 && l6 <= 3 * bomp && 3 * l6 >= bomp;
    return {ok, fmt("lambda 1: %.4g, 1e3: %.4g, 1e6: %.4g, BOMP %.4g us^2", l1, l3, l6, bomp)};
}

Verdict criterion10() {
    const auto dict = build_dictionary(tde(), 1);
    const auto arcs = build_arc_bases(dict);
    const double ts = tde().grid.ts;
    int failures = 0;
    int checks = 0;
    std::map<std::string, int> failed_by_name;
    auto check = [&](bool ok, const char* name) {
        ++checks;
        if (!ok) {
            ++failures;
            ++failed_by_name[name];
        }
    };

    std::mt19937_64 rng(10);
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto op = build_operator(500, 0.4, 1000 + t);
        const auto proj = project(op, dict, &arcs);
        const EstimationContext ctx{dict, &arcs, op, proj};
        const auto truth = draw_signal(tde(), 3, 5 * ts, 1.0, 10.0, rng);
        const CVector y = op.apply(tde().synthesize(truth));
        const Complex scale(1.7, -2.3);
        for (Algorithm a : {Algorithm::bomp, Algorithm::paibomp, Algorithm::poibomp}) {
            EstimatorConfig cfg;
            cfg.algorithm = a;
            cfg.K = 3;
            const auto r1 = estimate(y, ctx, cfg);
            const auto r2 = estimate(scale * y, ctx, cfg);
            // amplitude equivariance
            check((r1.b_hat - r2.b_hat).cwiseAbs().maxCoeff() <= 1e-9 * ts, "scale: b_hat");
            check((scale * r1.a_hat - r2.a_hat).cwiseAbs().maxCoeff() <= 1e-9 * r2.a_hat.cwiseAbs().maxCoeff(),
                  "scale: a_hat");
            // residual monotonicity and band exclusion contract
            double last = y.norm();
            for (std::size_t n = 0; n < r1.diag.selected.size(); ++n) {
                check(r1.diag.residual_norms[n] <= last * (1 + 1e-12), "residual monotone");
                last = r1.diag.residual_norms[n];
                const auto& banned = r1.diag.excluded[n];
                check(!std::binary_search(banned.begin(), banned.end(), r1.diag.selected[n]), "band exclusion");
            }
        }
        EstimatorConfig ccfg;
        ccfg.algorithm = Algorithm::ccbp;
        ccfg.K = 3;
        ccfg.zeta = 0.00768;
        auto atoms = [&](const CVector& data) {
            auto sel = estimate(data, ctx, ccfg).diag.selected;
            std::sort(sel.begin(), sel.end());
            return sel;
        };
        check(atoms(y) == atoms(scale * y), "scale: ccbp atoms");
    }

    // determinism
    auto cfg = base(CaseKind::B, {Algorithm::bomp, Algorithm::poibomp, Algorithm::ccbp}, {0.4}, 100.0, 3, 1);
    cfg.timing = false;
    check(format_csv(run_case(cfg)) == format_csv(run_case(cfg)), "determinism: run");
    check(compute_zeta(tde(), 2).zeta == compute_zeta(tde(), 2).zeta, "determinism: zeta");
    std::string detail = fmt("%g of %g property checks passed", checks - failures, static_cast<double>(checks));
    for (const auto& [name, count] : failed_by_name) detail += "; " + name + " failed x" + std::to_string(count);
    return {failures == 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
    // optional arguments select criteria by number
    std::vector<bool> selected(10, argc == 1);
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k >= 1 && k <= 10) selected[static_cast<std::size_t>(k - 1)] = true;
    }
    const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                             criterion5, criterion6, criterion7, criterion8,
                                                             criterion9, criterion10};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %zu: %s  %s  [%.1f s]\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
