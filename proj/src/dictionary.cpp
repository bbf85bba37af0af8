#include "cpe/dictionary.hpp"

#include <algorithm>
#include <cmath>

#include "cpe/kernels.hpp"

namespace cpe {

Index ParametricDictionary::neighbor(Index p, Index step) const {
    const Index n = size();
    if (circular()) return ((p + step) % n + n) % n;
    return std::clamp<Index>(p + step, 0, n - 1);
}

ParametricDictionary build_dictionary(const SignalModel& model, int redundancy) {
    if (redundancy < 1) throw DomainError("redundancy c must be an integer >= 1");
    ParametricDictionary dict;
    dict.kind = model.kind;
    dict.model = model;
    dict.redundancy = redundancy;
    dict.spacing = model.spacing(redundancy);
    const Index count = model.grid.n * redundancy;
    dict.params = RVector::LinSpaced(count, 0.0, static_cast<double>(count - 1)) * dict.spacing;
    dict.atoms = kernels::sample_atoms(model, dict.params);
    return dict;
}

double coherence(const ParametricDictionary& dict, Index i, Index k) {
    return std::abs(dict.atoms.col(i).dot(dict.atoms.col(k)));
}

void BandExclusionConfig::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("band exclusion eta must lie in [0, 1]");
}

std::vector<Index> band_exclusion(const ParametricDictionary& dict, std::span<const Index> support,
                                  const BandExclusionConfig& cfg) {
    cfg.validate();
    const double threshold = std::max(cfg.eta, cfg.mu_floor);
    // mu <= 1 for unit-norm atoms; rounding must not let mu(k, k) slip past eta = 1.
    if (threshold >= 1.0 || support.empty()) return {};

    std::vector<char> banned(static_cast<std::size_t>(dict.size()), 0);
    for (Index k : support) {
        const RVector mu = kernels::coherence_row(dict.atoms, k);
        for (Index i = 0; i < mu.size(); ++i) {
            if (mu(i) > threshold) banned[static_cast<std::size_t>(i)] = 1;
        }
    }
    std::vector<Index> out;
    for (Index i = 0; i < dict.size(); ++i) {
        if (banned[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
}

namespace {

// Closed-form rows of the 3x3 inverse applied to (g-, g0, g+); false when theta ~ 0.
bool fill_frame(const CVector& g_minus, const CVector& g0, const CVector& g_plus, double r, ArcFrame& out) {
    const double cos_arg = g0.dot(g_minus).real() / (g0.norm() * g_minus.norm());
    out.theta = std::acos(std::clamp(cos_arg, -1.0, 1.0));
    out.r = r;
    if (!(out.theta > 1e-8)) return false;
    out.v = (g_plus - g_minus) / (2.0 * r * std::sin(out.theta));
    out.u = (2.0 * g0 - g_plus - g_minus) / (2.0 * r * (1.0 - std::cos(out.theta)));
    out.c = g0 - r * out.u;
    return true;
}

}  // namespace

ArcFrame arc_frame(const SignalModel& model, double b_p, double spacing) {
    const CVector g0 = model.atom(b_p);
    ArcFrame frame;
    if (!fill_frame(model.atom(b_p - 0.5 * spacing), g0, model.atom(b_p + 0.5 * spacing), g0.norm(), frame)) {
        throw DegenerateArcError("arc anchors are collinear (theta ~ 0)");
    }
    return frame;
}

ArcBasisSet build_arc_bases(const ParametricDictionary& dict) {
    const Index count = dict.size();
    const double half = 0.5 * dict.spacing;

    ArcBasisSet arcs;
    arcs.c.resize(dict.rows(), count);
    arcs.u.resize(dict.rows(), count);
    arcs.v.resize(dict.rows(), count);
    arcs.theta.resize(count);
    arcs.params = dict.params;
    arcs.spacing = dict.spacing;
    arcs.r = dict.atoms.col(0).norm();

    bool degenerate = false;
#pragma omp parallel for schedule(dynamic, 16) reduction(|| : degenerate)
    for (Index p = 0; p < count; ++p) {
        ArcFrame frame;
        const CVector g0 = dict.atoms.col(p);
        if (!fill_frame(dict.model.atom(dict.params(p) - half), g0, dict.model.atom(dict.params(p) + half), arcs.r,
                        frame)) {
            degenerate = true;
            continue;
        }
        arcs.theta(p) = frame.theta;
        arcs.c.col(p) = frame.c;
        arcs.u.col(p) = frame.u;
        arcs.v.col(p) = frame.v;
    }
    if (degenerate) throw DegenerateArcError("arc anchors are collinear (theta ~ 0)");
    return arcs;
}

CVector interpolate_on_arc(const ArcBasisSet& arcs, Index p, double delta_n) {
    const double half = 0.5 * arcs.spacing;
    if (std::abs(delta_n) > half * (1.0 + 1e-12)) {
        throw DomainError("arc offset must satisfy |delta_n| <= spacing/2");
    }
    const double angle = 2.0 * delta_n * arcs.theta(p) / arcs.spacing;
    return arcs.c.col(p) + arcs.r * std::cos(angle) * arcs.u.col(p) + arcs.r * std::sin(angle) * arcs.v.col(p);
}

}  // namespace cpe
