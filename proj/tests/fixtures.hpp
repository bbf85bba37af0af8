#pragma once

#include <random>

#include "cpe/dictionary.hpp"
#include "cpe/interpolators.hpp"
#include "cpe/sensing.hpp"
#include "cpe/signal.hpp"

namespace fx {

inline const cpe::SignalModel& tde() {
    static const cpe::SignalModel m = cpe::SignalModel::tde(cpe::PulseSpec{}, cpe::SamplingGrid{});
    return m;
}

inline const cpe::SignalModel& fe() {
    static const cpe::SignalModel m = cpe::SignalModel::fe(100);
    return m;
}

inline const cpe::ParametricDictionary& tde_dict() {
    static const cpe::ParametricDictionary d = cpe::build_dictionary(tde(), 1);
    return d;
}

inline const cpe::ArcBasisSet& tde_arcs() {
    static const cpe::ArcBasisSet a = cpe::build_arc_bases(tde_dict());
    return a;
}

inline const cpe::ParametricDictionary& fe_dict() {
    static const cpe::ParametricDictionary d = cpe::build_dictionary(fe(), 1);
    return d;
}

inline const cpe::ArcBasisSet& fe_arcs() {
    static const cpe::ArcBasisSet a = cpe::build_arc_bases(fe_dict());
    return a;
}

inline double ts() { return tde().grid.ts; }

/// Operator, its projections and the context estimators need, bundled so references stay valid.
struct Bench {
    const cpe::ParametricDictionary& dict;
    const cpe::ArcBasisSet* arcs;
    cpe::MeasurementOperator op;
    cpe::ProjectedDictionary proj;

    Bench(const cpe::ParametricDictionary& d, const cpe::ArcBasisSet* a, double kappa, std::uint64_t seed)
        : dict(d), arcs(a), op(cpe::build_operator(d.rows(), kappa, seed)), proj(cpe::project(op, d, a)) {}
};

/// Exhaustive matched filter over a fine parameter grid around `center`.
inline double matched_filter(const cpe::SignalModel& model, const cpe::MeasurementOperator& op, const cpe::CVector& y,
                             double center, double half_width, double step) {
    double best_b = center;
    double best = -1.0;
    for (double b = center - half_width; b <= center + half_width; b += step) {
        const cpe::CVector ag = op.apply(model.atom(b));
        const double score = std::abs(ag.dot(y)) / ag.norm();
        if (score > best) {
            best = score;
            best_b = b;
        }
    }
    return best_b;
}

}  // namespace fx
