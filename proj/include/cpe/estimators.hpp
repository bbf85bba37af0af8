#pragma once

#include <string>
#include <vector>

#include "cpe/barrier_solver.hpp"
#include "cpe/dictionary.hpp"
#include "cpe/interpolators.hpp"
#include "cpe/sensing.hpp"
#include "cpe/signal.hpp"
#include "cpe/types.hpp"

namespace cpe {

enum class Algorithm { bomp, paibomp, poibomp, ccbp, paibomp_ccbp, tde_music };

const char* to_string(Algorithm algorithm);
/// Accepts the names printed by to_string; throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);

struct MusicConfig {
    Index subarray = 0;    ///< L; 0 selects floor(N/3)
    int refinement = 100;  ///< pseudospectrum grid points per dictionary cell
};

struct EstimatorConfig {
    Algorithm algorithm = Algorithm::bomp;
    Index K = 1;
    double eta = 0.0;
    double mu_floor = 1e-2;
    Index xi = 0;
    double lambda = 1.0;
    double sigma_sq = 0.0;  ///< expected noise energy at y
    double zeta = 0.0;
    MusicConfig music;
    SolverConfig solver;

    void validate() const;
};

/// Everything an estimator reads besides y: the dictionary, its arcs and their projections.
struct EstimationContext {
    const ParametricDictionary& dict;
    const ArcBasisSet* arcs;
    const MeasurementOperator& op;
    const ProjectedDictionary& proj;
};

struct EstimationDiagnostics {
    std::vector<Index> selected;                ///< grid index chosen per greedy iteration
    std::vector<std::vector<Index>> excluded;   ///< B_eta(S) in force at each iteration
    std::vector<double> residual_norms;         ///< ||y_res|| after each iteration
    int interpolation_fallbacks = 0;
    bool early_stop = false;
    bool refinement_used = false;
    bool fell_back = false;                     ///< CCBP stage replaced by greedy estimates
    std::string solver_status;
    int newton_steps = 0;
};

struct EstimationResult {
    RVector b_hat;
    CVector a_hat;
    CVector f_hat;
    double elapsed = 0.0;
    std::string status = "ok";
    EstimationDiagnostics diag;
};

EstimationResult run_bomp(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg);

/// Greedy loop with an interpolation step; with refine set, estimates come from CCBP over
/// the selected grid indices widened by xi neighbours.
EstimationResult run_ibomp(const CVector& y, const EstimationContext& ctx, const Interpolator& interp,
                           const EstimatorConfig& cfg, bool refine);

EstimationResult run_ccbp(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg);

/// l1 synthesis, spectral division by the pulse spectrum, then MUSIC on the exponentials.
/// Throws PipelineError when the pulse spectrum has a bin at or below 1e-8.
EstimationResult run_tde_music(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg);

/// Dispatches on cfg.algorithm and records wall time of the call.
EstimationResult estimate(const CVector& y, const EstimationContext& ctx, const EstimatorConfig& cfg);

}  // namespace cpe
