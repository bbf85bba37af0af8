#pragma once

#include <span>
#include <string>
#include <vector>

#include "cpe/barrier_solver.hpp"
#include "cpe/dictionary.hpp"
#include "cpe/interpolators.hpp"
#include "cpe/sensing.hpp"
#include "cpe/types.hpp"

namespace cpe {

/// Amplitude slot of the split variables: real-positive, real-negative, imaginary-positive, imaginary-negative.
enum class Slot : int { rp = 0, rn = 1, ip = 2, in = 3 };

/// Complex continuous basis pursuit over the atoms in omega.
///
/// x stacks [x_alpha, x_beta, x_gamma], each split into the four slots of J entries,
/// so that E x = sum_j alpha_j c_j + beta_j u_j + gamma_j v_j with complex alpha, beta, gamma.
struct CcbpProblem {
    CMatrix E;   ///< N x 12J: [C -C jC -jC U -U jU -jU V -V jV -jV]
    CMatrix AE;  ///< M x 12J
    std::vector<Index> omega;
    CVector y;
    double lambda = 1.0;
    double sigma_sq = 0.0;
    double zeta = 0.0;
    double r = 1.0;
    RVector theta;   ///< per omega entry
    RVector params;  ///< b_j per omega entry
    double spacing = 0.0;
    double period = 0.0;
    /// Only the real-positive slot is used (nonnegative real amplitudes).
    bool real_nonneg = false;
    /// Keep x_gamma >= 0 slot-wise; with positional pairing this only reaches the upper half of each cell.
    bool gamma_nonneg = false;

    Index J() const { return static_cast<Index>(omega.size()); }
    /// Weight on ||t||_1 relative to ||y - A E x||^2.
    double sparsity_weight() const { return 2.0 * lambda * (sigma_sq + zeta); }
    /// Position in x of family (0 alpha, 1 beta, 2 gamma), slot and atom.
    Index index(int family, Slot slot, Index j) const {
        return static_cast<Index>(family) * 4 * J() + static_cast<Index>(slot) * J() + j;
    }
};

struct CcbpSolution {
    RVector x;  ///< 12J
    RVector t;  ///< J
    SolveStatus status = SolveStatus::max_iter;
    double objective = 0.0;
    int newton_steps = 0;
    int screening_rounds = 0;
};

CcbpProblem assemble_ccbp(const ArcBasisSet& arcs, std::span<const Index> omega, const MeasurementOperator& op,
                          const CVector& y, double lambda, double sigma_sq, double zeta);

/// Direct solve over every atom of the problem.
CcbpSolution solve_ccbp(const CcbpProblem& problem, const SolverConfig& cfg);

struct CcbpRun {
    CcbpProblem problem;  ///< restricted to the final working set
    CcbpSolution solution;
};

/// Full-grid CCBP by working-set screening: solves on a subset of atoms, then adds atoms
/// whose optimality (KKT) conditions fail against the current residual. Small grids
/// are solved directly.
CcbpRun solve_ccbp_screened(const ArcBasisSet& arcs, const ProjectedDictionary& proj, const MeasurementOperator& op,
                            const CVector& y, double lambda, double sigma_sq, double zeta, Index k_hint,
                            const SolverConfig& cfg);

/// Largest violation over the cone and linear families of the program (0 when feasible).
double ccbp_constraint_violation(const CcbpSolution& solution, const CcbpProblem& problem);

/// Recombined complex alpha, beta, gamma per omega entry.
struct CcbpAmplitudes {
    CVector alpha;
    CVector beta;
    CVector gamma;
};

CcbpAmplitudes recombine(const CcbpSolution& solution, const CcbpProblem& problem);

struct ExtractedEstimates {
    std::vector<double> b_hat;
    std::vector<Complex> a_hat;
    std::vector<Index> atoms;  ///< dictionary index of each estimate
    bool incomplete = false;   ///< fewer than K atoms with |alpha| > 1e-8
};

ExtractedEstimates extract_estimates(const CcbpSolution& solution, const CcbpProblem& problem, Index k);

struct L1Result {
    CVector x;
    SolveStatus status = SolveStatus::max_iter;
    double objective = 0.0;  ///< ||x||_1
    double residual = 0.0;   ///< ||phi x - y||
};

/// min ||x||_1 s.t. ||phi x - y|| <= epsilon (equality when epsilon == 0).
L1Result l1_synthesis(const CMatrix& phi, const CVector& y, double epsilon, const SolverConfig& cfg);
L1Result l1_synthesis(const MeasurementOperator& op, const ParametricDictionary& dict, const CVector& y,
                      double epsilon, const SolverConfig& cfg);

enum class SparkMode { complex, nonneg };

struct SparkProbe {
    Index index = 0;
    bool feasible = false;
    Index nonzeros = 0;
    SolveStatus status = SolveStatus::infeasible;
};

struct SparkReport {
    Index bound = 0;
    bool all_infeasible = true;
    std::vector<SparkProbe> probes;
};

/// Upper bound on spark(D) from min ||x||_1 s.t. D x = 0, x_i = 1 over the probes.
SparkReport spark_bound(const ParametricDictionary& dict, SparkMode mode, std::span<const Index> probes,
                        const SolverConfig& cfg);

}  // namespace cpe
