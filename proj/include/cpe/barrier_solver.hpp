#pragma once

// Primal log-barrier Newton method for small conic programs of the form
//
//   minimize    c^T z + qw ||G z - h||^2
//   subject to  head_scale * z[head] >= ||z[tail]||     (second-order cones)
//               a^T z + offset >= 0                       (linear inequalities)
//               ||G z - h|| <= radius                     (optional ball)
//               F z = g                                   (optional equalities)
//
// Every cone and inequality must touch variables of a single group; the barrier
// Hessian is then block diagonal and the G term enters as a low-rank update.

#include <string>
#include <utility>
#include <vector>

#include "cpe/types.hpp"

namespace cpe {

struct SolverConfig {
    double tolerance = 1e-6;   ///< relative duality-gap bound at exit
    int max_iterations = 2000; ///< total Newton steps
    bool verbose = false;

    void validate() const;
};

enum class SolveStatus { optimal, max_iter, infeasible };

const char* to_string(SolveStatus status);

struct SocConstraint {
    Index head = 0;
    double head_scale = 1.0;
    std::vector<Index> tail;
};

struct LinearConstraint {
    std::vector<std::pair<Index, double>> terms;
    double offset = 0.0;
};

struct BarrierProblem {
    Index n = 0;
    RVector c;
    RMatrix G;  ///< may be empty
    RVector h;
    double quad_weight = 0.0;
    double ball_radius = -1.0;  ///< < 0 disables the ball
    RMatrix F;  ///< may be empty
    RVector g;
    std::vector<SocConstraint> socs;
    std::vector<LinearConstraint> linears;
    std::vector<std::vector<Index>> groups;  ///< partition of 0..n-1; empty means one group
};

struct BarrierResult {
    RVector z;
    SolveStatus status = SolveStatus::max_iter;
    double objective = 0.0;
    double gap_bound = 0.0;
    int newton_steps = 0;
    std::string message;
};

/// z0 must be strictly feasible for every inequality and satisfy F z0 = g.
BarrierResult solve_barrier(const BarrierProblem& problem, const RVector& z0, const SolverConfig& cfg);

/// True when z is strictly inside every cone, inequality and the ball.
bool strictly_feasible(const BarrierProblem& problem, const RVector& z);

}  // namespace cpe
