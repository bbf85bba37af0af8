#include "cpe/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpe {

namespace {

// Assigns every row of cost (rows <= cols) to a distinct column at minimum total cost.
std::vector<Index> assign_rows(const RMatrix& cost) {
    const Index rows = cost.rows();
    const Index cols = cost.cols();
    std::vector<Index> best_cols(static_cast<std::size_t>(rows), -1);
    if (rows == 0) return best_cols;
    if (cols > 20) {
        // Greedy fallback; never hit for the sparsity levels used here.
        std::vector<char> used(static_cast<std::size_t>(cols), 0);
        for (Index r = 0; r < rows; ++r) {
            Index arg = -1;
            for (Index c = 0; c < cols; ++c) {
                if (!used[static_cast<std::size_t>(c)] && (arg < 0 || cost(r, c) < cost(r, arg))) arg = c;
            }
            used[static_cast<std::size_t>(arg)] = 1;
            best_cols[static_cast<std::size_t>(r)] = arg;
        }
        return best_cols;
    }
    const std::size_t states = std::size_t{1} << cols;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // dp[mask] over the first popcount(mask) rows.
    std::vector<double> dp(states, kInf);
    std::vector<int> choice(states, -1);
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < states; ++mask) {
        if (!std::isfinite(dp[mask])) continue;
        const auto r = static_cast<Index>(__builtin_popcountll(mask));
        if (r >= rows) continue;
        for (Index c = 0; c < cols; ++c) {
            if (mask & (std::size_t{1} << c)) continue;
            const std::size_t next = mask | (std::size_t{1} << c);
            const double v = dp[mask] + cost(r, c);
            if (v < dp[next]) {
                dp[next] = v;
                choice[next] = static_cast<int>(c);
            }
        }
    }
    std::size_t best_mask = 0;
    double best = kInf;
    for (std::size_t mask = 0; mask < states; ++mask) {
        if (static_cast<Index>(__builtin_popcountll(mask)) == rows && dp[mask] < best) {
            best = dp[mask];
            best_mask = mask;
        }
    }
    // Walk back: the last assigned row is popcount - 1.
    std::size_t mask = best_mask;
    for (Index r = rows - 1; r >= 0; --r) {
        const int c = choice[mask];
        best_cols[static_cast<std::size_t>(r)] = c;
        mask &= ~(std::size_t{1} << c);
    }
    return best_cols;
}

}  // namespace

MatchScore match_and_score(const SignalModel& model, double spacing, const SparseSignalParams& truth,
                           const CVector& f_true, const EstimationResult& result) {
    if (truth.size() == 0) throw DomainError("scoring needs at least one true component");
    const double unit = model.kind == ModelKind::tde ? 1e6 : 1.0;  // seconds -> us
    const Index kt = truth.size();
    const Index ke = result.b_hat.size();

    RMatrix err(kt, ke);
    for (Index i = 0; i < kt; ++i) {
        for (Index j = 0; j < ke; ++j) err(i, j) = std::abs(model.circular_difference(result.b_hat(j), truth.delays(i)));
    }

    MatchScore score;
    std::vector<double> sq(static_cast<std::size_t>(kt), std::pow(0.5 * spacing * unit, 2));
    if (kt <= ke) {
        const std::vector<Index> cols = assign_rows(err);
        for (Index i = 0; i < kt; ++i) {
            const Index j = cols[static_cast<std::size_t>(i)];
            sq[static_cast<std::size_t>(i)] = std::pow(err(i, j) * unit, 2);
            score.pairs.emplace_back(i, j);
        }
    } else {
        const std::vector<Index> rows = assign_rows(err.transpose());
        for (Index j = 0; j < ke; ++j) {
            const Index i = rows[static_cast<std::size_t>(j)];
            sq[static_cast<std::size_t>(i)] = std::pow(err(i, j) * unit, 2);
            score.pairs.emplace_back(i, j);
        }
        score.missing = kt - ke;
        std::sort(score.pairs.begin(), score.pairs.end());
    }
    double total = 0.0;
    for (double v : sq) total += v;
    score.b_mse = total / static_cast<double>(kt);

    const double energy = f_true.squaredNorm();
    const CVector f_hat = result.f_hat.size() == f_true.size() ? result.f_hat : CVector::Zero(f_true.size());
    score.f_rel_err = energy > 0.0 ? (f_true - f_hat).squaredNorm() / energy : 0.0;
    return score;
}

}  // namespace cpe
