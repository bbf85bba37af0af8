#pragma once

#include <cstdint>
#include <vector>

#include "cpe/barrier_solver.hpp"
#include "cpe/experiment.hpp"
#include "cpe/signal.hpp"

namespace cpe {

struct ZetaReport {
    int c = 1;
    double zeta = 0.0;            ///< ||g(b_worst) - g~(b_worst)||
    double b_worst = 0.0;         ///< parameter attaining the worst angle-ratio deviation
    double bomp_max_error = 0.0;  ///< ||g(b_p + spacing/2) - g(b_p)||
    Index samples = 0;
};

/// Worst-case arc approximation error around the centre atom P/2 of a redundancy-c grid,
/// over `samples` offsets evenly spaced on [-spacing/2, spacing/2].
ZetaReport compute_zeta(const SignalModel& model, int c, Index samples = 100);

struct LambdaSweepConfig {
    std::vector<double> lambdas = {0.1, 1.0, 10.0, 1e3, 1e6};
    std::vector<double> kappas = {1.0};
    std::vector<double> snrs = {1000.0};
    Index trials = 25;
    std::uint64_t seed = 1;
    ModelKind problem = ModelKind::tde;
    PulseSpec pulse;
    SamplingGrid grid;
    int redundancy = 1;
    double amp_min = 1.0;
    double amp_max = 10.0;
    SolverConfig solver;
    bool timing = true;
    int jobs = 0;
};

struct LambdaCell {
    double lambda = 0.0;  ///< NaN for the BOMP reference cells
    double kappa = 1.0;
    double snr = 0.0;
    double mean_b_mse = 0.0;
    Index failures = 0;
    Index trials = 0;
};

struct LambdaSweepResult {
    std::vector<LambdaCell> cells;
    std::vector<LambdaCell> bomp_cells;
    std::vector<MetricRecord> records;  ///< case "lambda"; algorithm "ccbp[lambda=...]" or "bomp"
};

/// K = 1 CCBP over the lambda x kappa x snr grid with measurement noise, plus BOMP on identical data.
LambdaSweepResult lambda_sweep(const LambdaSweepConfig& cfg);

}  // namespace cpe
