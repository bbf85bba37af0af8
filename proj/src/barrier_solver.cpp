#include "cpe/barrier_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace cpe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First s > 0 where A s^2 + B s + C (C > 0) reaches zero, or +inf.
double first_root(double a, double b, double c) {
    if (a == 0.0) return b < 0.0 ? -c / b : kInf;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return kInf;  // only possible for a > 0: never crosses zero
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double best = kInf;
    if (q != 0.0) {
        const double r1 = q / a;
        const double r2 = c / q;
        if (r1 > 0.0) best = std::min(best, r1);
        if (r2 > 0.0) best = std::min(best, r2);
    }
    return best;
}

class Engine {
public:
    Engine(const BarrierProblem& p, const SolverConfig& cfg) : p_(p), cfg_(cfg) {
        n_ = p.n;
        has_g_ = p.G.size() > 0;
        has_ball_ = has_g_ && p.ball_radius >= 0.0;
        build_groups();
        degree_ = 2.0 * static_cast<double>(p.socs.size()) + static_cast<double>(p.linears.size()) +
                  (has_ball_ ? 1.0 : 0.0);
        if (has_g_ && (p.quad_weight > 0.0 || has_ball_)) {
            dense_ = n_ <= p.G.rows() + p.G.rows() / 4;
            if (dense_) gtg_ = p.G.transpose() * p.G;
        }
    }

    BarrierResult run(const RVector& z0) {
        BarrierResult res;
        res.z = z0;
        if (!reduce_equalities(z0, res)) return res;
        if (!strictly_feasible(p_, z0)) throw std::invalid_argument("barrier start is not strictly feasible");

        RVector z = z0;
        const double scale0 = std::max(1.0, std::abs(objective(z)));
        double t = std::max(degree_, 1.0) / scale0;
        constexpr double kMu = 20.0;
        int steps = 0;
        for (;;) {
            const bool centered = center(z, t, steps);
            const double f = objective(z);
            const double gap = degree_ / t;
            if (cfg_.verbose) {
                std::cerr << "barrier t=" << t << " f=" << f << " gap=" << gap << " newton=" << steps << '\n';
            }
            if (gap <= cfg_.tolerance * std::max(1.0, std::abs(f)) || degree_ == 0.0) {
                res.status = SolveStatus::optimal;
                res.gap_bound = gap;
                break;
            }
            if (steps >= cfg_.max_iterations || (!centered && steps >= cfg_.max_iterations)) {
                res.status = SolveStatus::max_iter;
                res.gap_bound = gap;
                break;
            }
            t *= kMu;
        }
        res.z = z;
        res.objective = objective(z);
        res.newton_steps = steps;
        return res;
    }

private:
    void build_groups() {
        group_of_.assign(static_cast<std::size_t>(n_), -1);
        local_.assign(static_cast<std::size_t>(n_), -1);
        if (p_.groups.empty()) {
            groups_.push_back({});
            for (Index i = 0; i < n_; ++i) groups_[0].push_back(i);
        } else {
            groups_ = p_.groups;
        }
        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            for (std::size_t k = 0; k < groups_[gi].size(); ++k) {
                const Index v = groups_[gi][k];
                if (v < 0 || v >= n_ || group_of_[static_cast<std::size_t>(v)] != -1) {
                    throw std::invalid_argument("barrier groups must partition the variables");
                }
                group_of_[static_cast<std::size_t>(v)] = static_cast<Index>(gi);
                local_[static_cast<std::size_t>(v)] = static_cast<Index>(k);
            }
        }
        for (Index v = 0; v < n_; ++v) {
            if (group_of_[static_cast<std::size_t>(v)] == -1) throw std::invalid_argument("variable missing from groups");
        }
        auto same_group = [&](Index first, Index other) {
            if (group_of_[static_cast<std::size_t>(first)] != group_of_[static_cast<std::size_t>(other)]) {
                throw std::invalid_argument("constraint spans several variable groups");
            }
        };
        for (const auto& s : p_.socs) {
            for (Index v : s.tail) same_group(s.head, v);
        }
        for (const auto& l : p_.linears) {
            for (const auto& [v, a] : l.terms) same_group(l.terms.front().first, v);
        }
    }

    bool reduce_equalities(const RVector& z0, BarrierResult& res) {
        if (p_.F.size() == 0) return true;
        const Eigen::ColPivHouseholderQR<RMatrix> qr(p_.F.transpose());
        const Index rank = qr.rank();
        f_.resize(rank, n_);
        g_.resize(rank);
        const auto& perm = qr.colsPermutation().indices();
        for (Index k = 0; k < rank; ++k) {
            f_.row(k) = p_.F.row(perm(k));
            g_(k) = p_.g(perm(k));
        }
        const double tol = 1e-8 * std::max(1.0, p_.g.norm());
        if ((p_.F * z0 - p_.g).norm() > tol) {
            res.status = SolveStatus::infeasible;
            res.message = "start violates the equality constraints";
            return false;
        }
        return true;
    }

    double objective(const RVector& z) const {
        double f = p_.c.size() > 0 ? p_.c.dot(z) : 0.0;
        if (has_g_ && p_.quad_weight > 0.0) f += p_.quad_weight * (p_.G * z - p_.h).squaredNorm();
        return f;
    }

    // Barrier value; +inf outside the strict interior.
    double barrier(const RVector& z, const RVector& r) const {
        double phi = 0.0;
        for (const auto& s : p_.socs) {
            const double head = s.head_scale * z(s.head);
            if (!(head > 0.0)) return kInf;
            double tail = 0.0;
            for (Index v : s.tail) tail += z(v) * z(v);
            const double f = head * head - tail;
            if (!(f > 0.0)) return kInf;
            phi -= std::log(f);
        }
        for (const auto& l : p_.linears) {
            double v = l.offset;
            for (const auto& [i, a] : l.terms) v += a * z(i);
            if (!(v > 0.0)) return kInf;
            phi -= std::log(v);
        }
        if (has_ball_) {
            const double s = p_.ball_radius * p_.ball_radius - r.squaredNorm();
            if (!(s > 0.0)) return kInf;
            phi -= std::log(s);
        }
        return phi;
    }

    double merit(const RVector& z, double t) const {
        const RVector r = has_g_ ? RVector(p_.G * z - p_.h) : RVector();
        const double phi = barrier(z, r);
        if (!std::isfinite(phi)) return kInf;
        double f = p_.c.size() > 0 ? p_.c.dot(z) : 0.0;
        if (has_g_ && p_.quad_weight > 0.0) f += p_.quad_weight * r.squaredNorm();
        return t * f + phi;
    }

    // Gradient and block Hessian of the barrier part at z.
    void barrier_derivatives(const RVector& z, RVector& grad, std::vector<RMatrix>& blocks) const {
        blocks.resize(groups_.size());
        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            const auto size = static_cast<Index>(groups_[gi].size());
            blocks[gi].setZero(size, size);
        }
        for (const auto& s : p_.socs) {
            const auto k = static_cast<Index>(s.tail.size()) + 1;
            std::vector<Index> idx;
            idx.reserve(static_cast<std::size_t>(k));
            idx.push_back(s.head);
            idx.insert(idx.end(), s.tail.begin(), s.tail.end());
            RVector df(k);
            const double s2 = s.head_scale * s.head_scale;
            df(0) = 2.0 * s2 * z(s.head);
            double f = s2 * z(s.head) * z(s.head);
            for (Index j = 1; j < k; ++j) {
                const double zv = z(idx[static_cast<std::size_t>(j)]);
                df(j) = -2.0 * zv;
                f -= zv * zv;
            }
            RMatrix hess = df * df.transpose() / (f * f);
            hess(0, 0) -= 2.0 * s2 / f;
            for (Index j = 1; j < k; ++j) hess(j, j) += 2.0 / f;
            RMatrix& block = blocks[static_cast<std::size_t>(group_of_[static_cast<std::size_t>(s.head)])];
            for (Index a = 0; a < k; ++a) {
                const Index va = idx[static_cast<std::size_t>(a)];
                grad(va) -= df(a) / f;
                for (Index b = 0; b < k; ++b) {
                    block(local_[static_cast<std::size_t>(va)], local_[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])]) += hess(a, b);
                }
            }
        }
        for (const auto& l : p_.linears) {
            double v = l.offset;
            for (const auto& [i, a] : l.terms) v += a * z(i);
            RMatrix& block = blocks[static_cast<std::size_t>(group_of_[static_cast<std::size_t>(l.terms.front().first)])];
            for (const auto& [i, a] : l.terms) {
                grad(i) -= a / v;
                for (const auto& [j, b] : l.terms) {
                    block(local_[static_cast<std::size_t>(i)], local_[static_cast<std::size_t>(j)]) += a * b / (v * v);
                }
            }
        }
    }

    // Solves H X = R for H = blockdiag(B) + G^T (wa I + wb r r^T) G.
    class Factor {
    public:
        Factor(const Engine& e, const std::vector<RMatrix>& blocks, double wa, double wb, const RVector& r)
            : e_(e), wa_(wa), wb_(wb) {
            const bool low_rank = e.has_g_ && wa > 0.0;
            if (!low_rank || !e.dense_) {
                chol_.resize(blocks.size());
                for (std::size_t gi = 0; gi < blocks.size(); ++gi) {
                    RMatrix b = blocks[gi];
                    const double jitter = 1e-14 * std::max(1.0, b.diagonal().cwiseAbs().maxCoeff());
                    chol_[gi].compute(b);
                    if (chol_[gi].info() != Eigen::Success) {
                        b.diagonal().array() += jitter;
                        chol_[gi].compute(b);
                    }
                }
            }
            if (!low_rank) {
                mode_ = Mode::block;
                return;
            }
            if (e.dense_) {
                mode_ = Mode::dense;
                RMatrix h = wa * e.gtg_;
                if (wb > 0.0) {
                    const RVector v = e.p_.G.transpose() * r;
                    h.noalias() += wb * v * v.transpose();
                }
                for (std::size_t gi = 0; gi < blocks.size(); ++gi) {
                    const auto& idx = e.groups_[gi];
                    for (std::size_t a = 0; a < idx.size(); ++a) {
                        for (std::size_t b = 0; b < idx.size(); ++b) h(idx[a], idx[b]) += blocks[gi](static_cast<Index>(a), static_cast<Index>(b));
                    }
                }
                dense_.compute(h);
                return;
            }
            mode_ = Mode::woodbury;
            const RMatrix& g = e.p_.G;
            gt_.resize(g.rows(), e.n_);
            for (std::size_t gi = 0; gi < blocks.size(); ++gi) {
                const auto& idx = e.groups_[gi];
                RMatrix cols(g.rows(), static_cast<Index>(idx.size()));
                for (std::size_t a = 0; a < idx.size(); ++a) cols.col(static_cast<Index>(a)) = g.col(idx[a]);
                // cols * L^-T = (L^-1 cols^T)^T
                const RMatrix solved = chol_[gi].matrixL().solve(cols.transpose());
                for (std::size_t a = 0; a < idx.size(); ++a) gt_.col(idx[a]) = solved.row(static_cast<Index>(a)).transpose();
            }
            const Index m = g.rows();
            RMatrix k = RMatrix::Identity(m, m) / wa;
            if (wb > 0.0) k.noalias() -= (wb / (wa * (wa + wb * r.squaredNorm()))) * r * r.transpose();
            k.selfadjointView<Eigen::Lower>().rankUpdate(gt_);
            k = k.selfadjointView<Eigen::Lower>();
            kfac_.compute(k);
        }

        RMatrix solve(const RMatrix& rhs) const {
            switch (mode_) {
            case Mode::dense:
                return dense_.solve(rhs);
            case Mode::block: {
                RMatrix out(rhs.rows(), rhs.cols());
                for (std::size_t gi = 0; gi < chol_.size(); ++gi) {
                    const auto& idx = e_.groups_[gi];
                    RMatrix part(static_cast<Index>(idx.size()), rhs.cols());
                    for (std::size_t a = 0; a < idx.size(); ++a) part.row(static_cast<Index>(a)) = rhs.row(idx[a]);
                    const RMatrix sol = chol_[gi].solve(part);
                    for (std::size_t a = 0; a < idx.size(); ++a) out.row(idx[a]) = sol.row(static_cast<Index>(a));
                }
                return out;
            }
            case Mode::woodbury: {
                RMatrix u = half_solve(rhs, false);
                const RMatrix w = gt_ * u;
                u.noalias() -= gt_.transpose() * kfac_.solve(w);
                return half_solve(u, true);
            }
            }
            return rhs;
        }

    private:
        enum class Mode { block, dense, woodbury };

        // L^-1 x (transpose=false) or L^-T x (transpose=true), blockwise.
        RMatrix half_solve(const RMatrix& rhs, bool transpose) const {
            RMatrix out(rhs.rows(), rhs.cols());
            for (std::size_t gi = 0; gi < chol_.size(); ++gi) {
                const auto& idx = e_.groups_[gi];
                RMatrix part(static_cast<Index>(idx.size()), rhs.cols());
                for (std::size_t a = 0; a < idx.size(); ++a) part.row(static_cast<Index>(a)) = rhs.row(idx[a]);
                const RMatrix sol = transpose ? RMatrix(chol_[gi].matrixU().solve(part))
                                              : RMatrix(chol_[gi].matrixL().solve(part));
                for (std::size_t a = 0; a < idx.size(); ++a) out.row(idx[a]) = sol.row(static_cast<Index>(a));
            }
            return out;
        }

        const Engine& e_;
        double wa_;
        double wb_;
        Mode mode_ = Mode::block;
        std::vector<Eigen::LLT<RMatrix>> chol_;
        Eigen::LDLT<RMatrix> dense_;
        RMatrix gt_;
        Eigen::LDLT<RMatrix> kfac_;
    };

    double max_step(const RVector& z, const RVector& d, const RVector& r, const RVector& gd) const {
        double smax = kInf;
        for (const auto& s : p_.socs) {
            const double zh = s.head_scale * z(s.head);
            const double dh = s.head_scale * d(s.head);
            if (dh < 0.0) smax = std::min(smax, -zh / dh);
            double a = dh * dh;
            double b = 2.0 * zh * dh;
            double c = zh * zh;
            for (Index v : s.tail) {
                a -= d(v) * d(v);
                b -= 2.0 * z(v) * d(v);
                c -= z(v) * z(v);
            }
            smax = std::min(smax, first_root(a, b, c));
        }
        for (const auto& l : p_.linears) {
            double v = l.offset;
            double dv = 0.0;
            for (const auto& [i, a] : l.terms) {
                v += a * z(i);
                dv += a * d(i);
            }
            if (dv < 0.0) smax = std::min(smax, -v / dv);
        }
        if (has_ball_) {
            const double rad2 = p_.ball_radius * p_.ball_radius;
            smax = std::min(smax, first_root(-gd.squaredNorm(), -2.0 * r.dot(gd), rad2 - r.squaredNorm()));
        }
        return smax;
    }

    // Newton centering at barrier parameter t; returns false if it stalled.
    bool center(RVector& z, double t, int& steps) {
        constexpr int kMaxInner = 100;
        for (int inner = 0; inner < kMaxInner; ++inner) {
            if (steps >= cfg_.max_iterations) return false;
            RVector grad = RVector::Zero(n_);
            if (p_.c.size() > 0) grad += t * p_.c;
            RVector r;
            double wa = 0.0;
            double wb = 0.0;
            if (has_g_) {
                r = p_.G * z - p_.h;
                RVector coeff = RVector::Zero(r.size());
                if (p_.quad_weight > 0.0) {
                    coeff += 2.0 * t * p_.quad_weight * r;
                    wa += 2.0 * t * p_.quad_weight;
                }
                if (has_ball_) {
                    const double s = p_.ball_radius * p_.ball_radius - r.squaredNorm();
                    coeff += (2.0 / s) * r;
                    wa += 2.0 / s;
                    wb = 4.0 / (s * s);
                }
                grad.noalias() += p_.G.transpose() * coeff;
            }
            std::vector<RMatrix> blocks;
            barrier_derivatives(z, grad, blocks);

            const Factor fac(*this, blocks, wa, wb, r);
            RVector d = -fac.solve(grad);
            if (f_.rows() > 0) {
                const RMatrix y = fac.solve(f_.transpose());
                const RMatrix schur = f_ * y;
                const RVector nu = schur.ldlt().solve(f_ * d);
                d.noalias() -= y * nu;
            }
            ++steps;
            const double decrement = -grad.dot(d);
            if (!std::isfinite(decrement)) return false;
            if (decrement < 0.0 || 0.5 * decrement <= 1e-10) return true;

            const RVector gd = has_g_ ? RVector(p_.G * d) : RVector();
            double step = std::min(1.0, 0.99 * max_step(z, d, r, gd));
            const double base = merit(z, t);
            const double slope = grad.dot(d);
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                const RVector trial = z + step * d;
                const double value = merit(trial, t);
                if (value <= base + 0.01 * step * slope ||
                    (std::isfinite(value) && value - base <= 1e-12 * std::abs(base))) {
                    z = trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) return false;
        }
        return false;
    }

    const BarrierProblem& p_;
    const SolverConfig& cfg_;
    Index n_ = 0;
    bool has_g_ = false;
    bool has_ball_ = false;
    bool dense_ = false;
    double degree_ = 0.0;
    RMatrix gtg_;
    RMatrix f_;
    RVector g_;
    std::vector<std::vector<Index>> groups_;
    std::vector<Index> group_of_;
    std::vector<Index> local_;
};

}  // namespace

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("solver max_iterations must be >= 1");
}

const char* to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::max_iter:
        return "max_iter";
    case SolveStatus::infeasible:
        return "infeasible";
    }
    return "unknown";
}

bool strictly_feasible(const BarrierProblem& problem, const RVector& z) {
    for (const auto& s : problem.socs) {
        const double head = s.head_scale * z(s.head);
        double tail = 0.0;
        for (Index v : s.tail) tail += z(v) * z(v);
        if (!(head > 0.0) || !(head * head > tail)) return false;
    }
    for (const auto& l : problem.linears) {
        double v = l.offset;
        for (const auto& [i, a] : l.terms) v += a * z(i);
        if (!(v > 0.0)) return false;
    }
    if (problem.G.size() > 0 && problem.ball_radius >= 0.0) {
        if (!((problem.G * z - problem.h).norm() < problem.ball_radius)) return false;
    }
    return true;
}

BarrierResult solve_barrier(const BarrierProblem& problem, const RVector& z0, const SolverConfig& cfg) {
    cfg.validate();
    if (z0.size() != problem.n) throw std::invalid_argument("barrier start has the wrong dimension");
    Engine engine(problem, cfg);
    return engine.run(z0);
}

}  // namespace cpe
