#include "cpe/conic_program.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cpe/kernels.hpp"

namespace cpe {

namespace {

const std::array<Complex, 4> kSlotSign = {Complex(1.0, 0.0), Complex(-1.0, 0.0), Complex(0.0, 1.0),
                                          Complex(0.0, -1.0)};

RVector stack_real(const CVector& v) {
    RVector out(2 * v.size());
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
}

// Real form of phi acting on interleaved (re, im, t) triplets per coefficient.
RMatrix triplet_real_form(const CMatrix& phi) {
    const Index m = phi.rows();
    RMatrix g = RMatrix::Zero(2 * m, 3 * phi.cols());
    for (Index j = 0; j < phi.cols(); ++j) {
        g.block(0, 3 * j, m, 1) = phi.col(j).real();
        g.block(m, 3 * j, m, 1) = phi.col(j).imag();
        g.block(0, 3 * j + 1, m, 1) = -phi.col(j).imag();
        g.block(m, 3 * j + 1, m, 1) = phi.col(j).real();
    }
    return g;
}

// Min-norm least-squares solution of a x = b.
RVector min_norm_solve(const RMatrix& a, const RVector& b) {
    const Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(a);
    return cod.solve(b);
}

// Cones t_j >= |(re_j, im_j)| over interleaved triplets, one group per coefficient.
void add_triplet_cones(BarrierProblem& bp, Index count) {
    bp.groups.resize(static_cast<std::size_t>(count));
    for (Index j = 0; j < count; ++j) {
        bp.socs.push_back(SocConstraint{3 * j + 2, 1.0, {3 * j, 3 * j + 1}});
        bp.groups[static_cast<std::size_t>(j)] = {3 * j, 3 * j + 1, 3 * j + 2};
    }
}

RVector triplet_start(const RVector& xy_interleaved_pairs, Index count) {
    RVector z(3 * count);
    for (Index j = 0; j < count; ++j) {
        const double re = xy_interleaved_pairs(2 * j);
        const double im = xy_interleaved_pairs(2 * j + 1);
        z(3 * j) = re;
        z(3 * j + 1) = im;
        z(3 * j + 2) = std::hypot(re, im) + 1.0;
    }
    return z;
}

// min over the arc sector {(b, g): b^2 + g^2 <= r^2, b >= r cos(theta)} of gb * b + gg * g.
double sector_min(double gb, double gg, double r, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double best = std::min({gb * r * c + gg * r * s, gb * r * c - gg * r * s, gb * r});
    const double phi = std::atan2(-gg, -gb);
    if (std::abs(phi) <= theta) best = std::min(best, r * (gb * std::cos(phi) + gg * std::sin(phi)));
    return best;
}

}  // namespace

CcbpProblem assemble_ccbp(const ArcBasisSet& arcs, std::span<const Index> omega, const MeasurementOperator& op,
                          const CVector& y, double lambda, double sigma_sq, double zeta) {
    if (omega.empty()) throw DomainError("CCBP needs a non-empty parameter set");
    if (!(lambda > 0.0)) throw DomainError("CCBP lambda must be positive");
    if (!(sigma_sq >= 0.0) || !(zeta >= 0.0)) throw DomainError("CCBP sigma^2 and zeta must be >= 0");
    if (y.size() != op.rows()) throw DomainError("measurement length does not match the operator");

    CcbpProblem prob;
    prob.omega.assign(omega.begin(), omega.end());
    const Index j_count = prob.J();
    const Index n = arcs.c.rows();
    prob.E.resize(n, 12 * j_count);
    const CMatrix* family[3] = {&arcs.c, &arcs.u, &arcs.v};
    for (int f = 0; f < 3; ++f) {
        for (int s = 0; s < 4; ++s) {
            for (Index j = 0; j < j_count; ++j) {
                prob.E.col(prob.index(f, static_cast<Slot>(s), j)) =
                    kSlotSign[static_cast<std::size_t>(s)] * family[f]->col(prob.omega[static_cast<std::size_t>(j)]);
            }
        }
    }
    prob.AE = op.apply(prob.E);
    prob.y = y;
    prob.lambda = lambda;
    prob.sigma_sq = sigma_sq;
    prob.zeta = zeta;
    prob.r = arcs.r;
    prob.theta.resize(j_count);
    prob.params.resize(j_count);
    for (Index j = 0; j < j_count; ++j) {
        prob.theta(j) = arcs.theta(prob.omega[static_cast<std::size_t>(j)]);
        prob.params(j) = arcs.params(prob.omega[static_cast<std::size_t>(j)]);
    }
    prob.spacing = arcs.spacing;
    prob.period = arcs.spacing * static_cast<double>(arcs.size());
    return prob;
}

CcbpSolution solve_ccbp(const CcbpProblem& problem, const SolverConfig& cfg) {
    const Index j_count = problem.J();
    CcbpSolution sol;
    sol.x = RVector::Zero(12 * j_count);
    sol.t = RVector::Zero(j_count);
    if (problem.y.norm() == 0.0) {
        sol.status = SolveStatus::optimal;
        return sol;
    }
    const double w = problem.sparsity_weight();
    if (!(w > 0.0)) throw DomainError("CCBP needs lambda * (sigma^2 + zeta) > 0");

    const int slots = problem.real_nonneg ? 1 : 4;
    const Index block = 3 * slots * j_count;
    const Index n = block + j_count;
    auto var = [&](int f, int s, Index j) { return (static_cast<Index>(f) * slots + s) * j_count + j; };
    auto tvar = [&](Index j) { return block + j; };

    const Index m = problem.AE.rows();
    BarrierProblem bp;
    bp.n = n;
    bp.c = RVector::Zero(n);
    bp.c.tail(j_count).setConstant(w);
    bp.G = RMatrix::Zero(2 * m, n);
    for (int f = 0; f < 3; ++f) {
        for (int s = 0; s < slots; ++s) {
            for (Index j = 0; j < j_count; ++j) {
                const auto col = problem.AE.col(problem.index(f, static_cast<Slot>(s), j));
                bp.G.block(0, var(f, s, j), m, 1) = col.real();
                bp.G.block(m, var(f, s, j), m, 1) = col.imag();
            }
        }
    }
    bp.h = stack_real(problem.y);
    bp.quad_weight = 1.0;

    const double r = problem.r;
    const double s0 = 1e-3 * problem.y.norm() / std::sqrt(static_cast<double>(j_count));
    RVector z0 = RVector::Zero(n);
    bp.groups.resize(static_cast<std::size_t>(j_count));
    for (Index j = 0; j < j_count; ++j) {
        const double ct = std::cos(problem.theta(j));
        const double st = std::sin(problem.theta(j));
        auto& group = bp.groups[static_cast<std::size_t>(j)];
        SocConstraint tcone{tvar(j), 1.0, {}};
        for (int s = 0; s < slots; ++s) {
            const Index a = var(0, s, j);
            const Index b = var(1, s, j);
            const Index g = var(2, s, j);
            group.insert(group.end(), {a, b, g});
            bp.socs.push_back(SocConstraint{a, r, {b, g}});
            bp.linears.push_back(LinearConstraint{{{b, 1.0}, {a, -r * ct}}, 0.0});
            bp.linears.push_back(LinearConstraint{{{a, r}, {b, -1.0}}, 0.0});
            if (problem.gamma_nonneg) bp.linears.push_back(LinearConstraint{{{g, 1.0}}, 0.0});
            tcone.tail.push_back(a);
            z0(a) = s0;
            z0(b) = r * s0 * 0.5 * (1.0 + ct);
            z0(g) = problem.gamma_nonneg ? 0.25 * r * s0 * st : 0.0;
        }
        group.push_back(tvar(j));
        bp.socs.push_back(tcone);
        z0(tvar(j)) = 2.0 * s0 * std::sqrt(static_cast<double>(slots));
    }

    const BarrierResult res = solve_barrier(bp, z0, cfg);
    sol.status = res.status;
    sol.newton_steps = res.newton_steps;
    for (int f = 0; f < 3; ++f) {
        for (int s = 0; s < slots; ++s) {
            for (Index j = 0; j < j_count; ++j) sol.x(problem.index(f, static_cast<Slot>(s), j)) = res.z(var(f, s, j));
        }
    }
    sol.t = res.z.tail(j_count);
    sol.objective = (problem.y - problem.AE * sol.x.cast<Complex>()).squaredNorm() + w * sol.t.sum();
    return sol;
}

CcbpRun solve_ccbp_screened(const ArcBasisSet& arcs, const ProjectedDictionary& proj, const MeasurementOperator& op,
                            const CVector& y, double lambda, double sigma_sq, double zeta, Index k_hint,
                            const SolverConfig& cfg) {
    const Index p_count = arcs.size();
    constexpr Index kDirectLimit = 40;
    if (p_count <= kDirectLimit) {
        std::vector<Index> all(static_cast<std::size_t>(p_count));
        std::iota(all.begin(), all.end(), Index{0});
        CcbpRun run{assemble_ccbp(arcs, all, op, y, lambda, sigma_sq, zeta), {}};
        run.solution = solve_ccbp(run.problem, cfg);
        return run;
    }
    if (!proj.has_arcs()) throw DomainError("screened CCBP needs projected arc bases");

    const RVector proxy = kernels::correlate(proj.ad, y).cwiseAbs();
    std::vector<Index> order(static_cast<std::size_t>(p_count));
    std::iota(order.begin(), order.end(), Index{0});
    const auto initial = static_cast<std::size_t>(std::min<Index>(p_count, std::max<Index>(8, 3 * k_hint)));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(initial), order.end(),
                      [&](Index a, Index b) { return proxy(a) > proxy(b); });
    std::set<Index> working(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(initial));

    constexpr int kMaxRounds = 30;
    constexpr std::size_t kMaxAdd = 10;
    CcbpRun run;
    int steps = 0;
    for (int round = 1; round <= kMaxRounds; ++round) {
        const std::vector<Index> omega(working.begin(), working.end());
        run.problem = assemble_ccbp(arcs, omega, op, y, lambda, sigma_sq, zeta);
        run.solution = solve_ccbp(run.problem, cfg);
        steps += run.solution.newton_steps;
        run.solution.newton_steps = steps;
        run.solution.screening_rounds = round;
        if (run.solution.status != SolveStatus::optimal) return run;

        const double w = run.problem.sparsity_weight();
        const CVector res = y - run.problem.AE * run.solution.x.cast<Complex>();
        const CVector rho_c = kernels::correlate(proj.ac, res);
        const CVector rho_u = kernels::correlate(proj.au, res);
        const CVector rho_v = kernels::correlate(proj.av, res);
        std::vector<std::pair<double, Index>> violators;
        for (Index p = 0; p < p_count; ++p) {
            if (working.count(p) != 0) continue;
            double neg = 0.0;
            for (std::size_t s = 0; s < 4; ++s) {
                const Complex conj_s = std::conj(kSlotSign[s]);
                const double ga = -2.0 * (conj_s * rho_c(p)).real();
                const double gb = -2.0 * (conj_s * rho_u(p)).real();
                const double gg = -2.0 * (conj_s * rho_v(p)).real();
                const double ck = ga + sector_min(gb, gg, arcs.r, arcs.theta(p));
                if (ck < 0.0) neg += ck * ck;
            }
            const double violation = std::sqrt(neg) - w;
            if (violation > 1e-3 * w) violators.emplace_back(violation, p);
        }
        if (violators.empty()) return run;
        std::sort(violators.begin(), violators.end(), std::greater<>());
        for (std::size_t i = 0; i < std::min(kMaxAdd, violators.size()); ++i) working.insert(violators[i].second);
    }
    run.solution.status = SolveStatus::max_iter;
    return run;
}

double ccbp_constraint_violation(const CcbpSolution& solution, const CcbpProblem& problem) {
    double worst = 0.0;
    const double r = problem.r;
    for (Index j = 0; j < problem.J(); ++j) {
        double alpha_sq = 0.0;
        for (int s = 0; s < 4; ++s) {
            const double a = solution.x(problem.index(0, static_cast<Slot>(s), j));
            const double b = solution.x(problem.index(1, static_cast<Slot>(s), j));
            const double g = solution.x(problem.index(2, static_cast<Slot>(s), j));
            alpha_sq += a * a;
            worst = std::max({worst, std::hypot(b, g) - r * a, r * a * std::cos(problem.theta(j)) - b, b - r * a,
                              -a, -b});
            if (problem.gamma_nonneg) worst = std::max(worst, -g);
        }
        worst = std::max(worst, std::sqrt(alpha_sq) - solution.t(j));
    }
    return worst;
}

CcbpAmplitudes recombine(const CcbpSolution& solution, const CcbpProblem& problem) {
    const Index j_count = problem.J();
    CcbpAmplitudes amp{CVector::Zero(j_count), CVector::Zero(j_count), CVector::Zero(j_count)};
    CVector* out[3] = {&amp.alpha, &amp.beta, &amp.gamma};
    for (int f = 0; f < 3; ++f) {
        for (int s = 0; s < 4; ++s) {
            for (Index j = 0; j < j_count; ++j) {
                (*out[f])(j) += kSlotSign[static_cast<std::size_t>(s)] * solution.x(problem.index(f, static_cast<Slot>(s), j));
            }
        }
    }
    return amp;
}

ExtractedEstimates extract_estimates(const CcbpSolution& solution, const CcbpProblem& problem, Index k) {
    const CcbpAmplitudes amp = recombine(solution, problem);
    std::vector<Index> order(static_cast<std::size_t>(problem.J()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(amp.alpha(a)) > std::abs(amp.alpha(b)); });

    ExtractedEstimates est;
    for (Index j : order) {
        if (static_cast<Index>(est.b_hat.size()) >= k) break;
        const Complex alpha = amp.alpha(j);
        if (!(std::abs(alpha) > 1e-8)) break;
        // Projections of beta, gamma on alpha's phase; the common scale cancels in the angle.
        const double bc = (amp.beta(j) * std::conj(alpha)).real();
        const double gc = (amp.gamma(j) * std::conj(alpha)).real();
        const double theta = problem.theta(j);
        const double phi = std::clamp(std::atan2(gc, bc), -theta, theta);
        double b = problem.params(j) + phi * problem.spacing / (2.0 * theta);
        if (problem.period > 0.0) {
            b = std::fmod(b, problem.period);
            if (b < 0.0) b += problem.period;
        }
        est.b_hat.push_back(b);
        est.a_hat.push_back(alpha);
        est.atoms.push_back(problem.omega[static_cast<std::size_t>(j)]);
    }
    est.incomplete = static_cast<Index>(est.b_hat.size()) < k;
    return est;
}

L1Result l1_synthesis(const CMatrix& phi, const CVector& y, double epsilon, const SolverConfig& cfg) {
    if (!(epsilon >= 0.0)) throw DomainError("l1 synthesis needs epsilon >= 0");
    if (y.size() != phi.rows()) throw DomainError("measurement length does not match the dictionary");
    const Index p = phi.cols();
    L1Result out;
    out.x = CVector::Zero(p);
    if (y.norm() <= epsilon) {
        out.status = SolveStatus::optimal;
        out.residual = y.norm();
        return out;
    }

    const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(phi);
    const CVector x_ls = cod.solve(y);
    const double ls_residual = (phi * x_ls - y).norm();
    const double feas_tol = 1e-8 * std::max(1.0, y.norm());
    if ((epsilon == 0.0 && ls_residual > feas_tol) || (epsilon > 0.0 && ls_residual >= epsilon)) {
        out.status = SolveStatus::infeasible;
        out.residual = ls_residual;
        return out;
    }
    if (epsilon == 0.0 && cod.rank() == p) {
        out.x = x_ls;
        out.status = SolveStatus::optimal;
        out.objective = x_ls.cwiseAbs().sum();
        out.residual = ls_residual;
        return out;
    }

    BarrierProblem bp;
    bp.n = 3 * p;
    bp.c = RVector::Zero(bp.n);
    for (Index j = 0; j < p; ++j) bp.c(3 * j + 2) = 1.0;
    add_triplet_cones(bp, p);
    const RMatrix g = triplet_real_form(phi);
    if (epsilon == 0.0) {
        bp.F = g;
        bp.g = stack_real(y);
    } else {
        bp.G = g;
        bp.h = stack_real(y);
        bp.ball_radius = epsilon;
    }
    RVector pairs(2 * p);
    for (Index j = 0; j < p; ++j) {
        pairs(2 * j) = x_ls(j).real();
        pairs(2 * j + 1) = x_ls(j).imag();
    }
    const BarrierResult res = solve_barrier(bp, triplet_start(pairs, p), cfg);
    for (Index j = 0; j < p; ++j) out.x(j) = Complex(res.z(3 * j), res.z(3 * j + 1));
    out.status = res.status;
    out.objective = out.x.cwiseAbs().sum();
    out.residual = (phi * out.x - y).norm();
    return out;
}

L1Result l1_synthesis(const MeasurementOperator& op, const ParametricDictionary& dict, const CVector& y,
                      double epsilon, const SolverConfig& cfg) {
    return l1_synthesis(op.apply(dict.atoms), y, epsilon, cfg);
}

namespace {

SparkProbe spark_probe_complex(const CMatrix& d, Index i, const SolverConfig& cfg) {
    const Index n = d.rows();
    const Index p = d.cols();
    SparkProbe probe;
    probe.index = i;
    // Equalities over (re_j, im_j) pairs: D x = 0, x_i = 1.
    RMatrix eq = RMatrix::Zero(2 * n + 2, 2 * p);
    for (Index j = 0; j < p; ++j) {
        eq.block(0, 2 * j, n, 1) = d.col(j).real();
        eq.block(n, 2 * j, n, 1) = d.col(j).imag();
        eq.block(0, 2 * j + 1, n, 1) = -d.col(j).imag();
        eq.block(n, 2 * j + 1, n, 1) = d.col(j).real();
    }
    eq(2 * n, 2 * i) = 1.0;
    eq(2 * n + 1, 2 * i + 1) = 1.0;
    RVector rhs = RVector::Zero(2 * n + 2);
    rhs(2 * n) = 1.0;
    const RVector x0 = min_norm_solve(eq, rhs);
    if ((eq * x0 - rhs).norm() > 1e-8) return probe;

    BarrierProblem bp;
    bp.n = 3 * p;
    bp.c = RVector::Zero(bp.n);
    for (Index j = 0; j < p; ++j) bp.c(3 * j + 2) = 1.0;
    add_triplet_cones(bp, p);
    bp.F = RMatrix::Zero(eq.rows(), bp.n);
    for (Index j = 0; j < p; ++j) {
        bp.F.col(3 * j) = eq.col(2 * j);
        bp.F.col(3 * j + 1) = eq.col(2 * j + 1);
    }
    bp.g = rhs;
    const BarrierResult res = solve_barrier(bp, triplet_start(x0, p), cfg);
    probe.status = res.status;
    if (res.status == SolveStatus::infeasible) return probe;
    probe.feasible = true;
    for (Index j = 0; j < p; ++j) {
        if (std::hypot(res.z(3 * j), res.z(3 * j + 1)) > 1e-6) ++probe.nonzeros;
    }
    return probe;
}

SparkProbe spark_probe_nonneg(const CMatrix& d, Index i, const SolverConfig& cfg) {
    const Index n = d.rows();
    const Index p = d.cols();
    SparkProbe probe;
    probe.index = i;
    RMatrix eq(2 * n + 1, p);
    eq.topRows(n) = d.real();
    eq.middleRows(n, n) = d.imag();
    eq.row(2 * n).setZero();
    eq(2 * n, i) = 1.0;
    RVector rhs = RVector::Zero(2 * n + 1);
    rhs(2 * n) = 1.0;
    const RVector x0 = min_norm_solve(eq, rhs);
    if ((eq * x0 - rhs).norm() > 1e-8) return probe;

    // Phase I over (u, s) with x = u - s: push s below zero to get a strictly positive x.
    BarrierProblem p1;
    p1.n = p + 1;
    p1.c = RVector::Zero(p + 1);
    p1.c(p) = 1.0;
    p1.F.resize(eq.rows(), p + 1);
    p1.F.leftCols(p) = eq;
    p1.F.col(p) = -eq.rowwise().sum();
    p1.g = rhs;
    for (Index j = 0; j <= p; ++j) {
        p1.groups.push_back({j});
        p1.linears.push_back(LinearConstraint{{{j, 1.0}}, j == p ? 2.0 : 0.0});
    }
    const double s0 = std::max(0.0, -x0.minCoeff()) + 1.0;
    RVector z1(p + 1);
    z1.head(p) = x0.array() + s0;
    z1(p) = s0;
    const BarrierResult phase1 = solve_barrier(p1, z1, cfg);
    if (phase1.status == SolveStatus::infeasible || !(phase1.z(p) < -1e-7)) return probe;

    BarrierProblem p2;
    p2.n = p;
    p2.c = RVector::Ones(p);
    p2.F = eq;
    p2.g = rhs;
    for (Index j = 0; j < p; ++j) {
        p2.groups.push_back({j});
        p2.linears.push_back(LinearConstraint{{{j, 1.0}}, 0.0});
    }
    const RVector start = phase1.z.head(p).array() - phase1.z(p);
    const BarrierResult res = solve_barrier(p2, start, cfg);
    probe.status = res.status;
    if (res.status == SolveStatus::infeasible) return probe;
    probe.feasible = true;
    for (Index j = 0; j < p; ++j) {
        if (res.z(j) > 1e-6) ++probe.nonzeros;
    }
    return probe;
}

}  // namespace

SparkReport spark_bound(const ParametricDictionary& dict, SparkMode mode, std::span<const Index> probes,
                        const SolverConfig& cfg) {
    if (probes.empty()) throw DomainError("spark bound needs at least one probe");
    SparkReport report;
    Index best = -1;
    for (Index i : probes) {
        if (i < 0 || i >= dict.size()) throw DomainError("spark probe index out of range");
        SparkProbe probe;
        try {
            probe = mode == SparkMode::complex ? spark_probe_complex(dict.atoms, i, cfg)
                                               : spark_probe_nonneg(dict.atoms, i, cfg);
        } catch (const std::exception&) {
            probe.index = i;
            probe.status = SolveStatus::max_iter;
        }
        if (probe.feasible) {
            report.all_infeasible = false;
            best = best < 0 ? probe.nonzeros : std::min(best, probe.nonzeros);
        }
        report.probes.push_back(probe);
    }
    // Every probe infeasible: no dependent set was found, report the full-rank convention N.
    report.bound = best < 0 ? dict.rows() : best;
    return report;
}

}  // namespace cpe
