#pragma once

#include <utility>
#include <vector>

#include "cpe/estimators.hpp"
#include "cpe/signal.hpp"

namespace cpe {

struct MatchScore {
    double b_mse = 0.0;  ///< us^2 for TDE, squared cycles for FE
    double f_rel_err = 0.0;
    Index missing = 0;
    std::vector<std::pair<Index, Index>> pairs;  ///< (truth, estimate)
};

/// Minimum total |circular error| one-to-one assignment between truth and estimates.
/// Unmatched truth components are charged (spacing/2)^2.
MatchScore match_and_score(const SignalModel& model, double spacing, const SparseSignalParams& truth,
                           const CVector& f_true, const EstimationResult& result);

}  // namespace cpe
