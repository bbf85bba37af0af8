#pragma once

#include <span>
#include <vector>

#include "cpe/signal.hpp"
#include "cpe/types.hpp"

namespace cpe {

/// Atoms g(b_p) sampled on a uniform parameter grid b_p = p * spacing, p = 0..P-1.
struct ParametricDictionary {
    ModelKind kind = ModelKind::tde;
    SignalModel model;
    CMatrix atoms;    ///< N x P, unit-norm columns
    RVector params;   ///< b_p
    double spacing = 0.0;
    int redundancy = 1;

    Index rows() const { return atoms.rows(); }
    Index size() const { return atoms.cols(); }
    /// TDE dictionaries are circulant, so neighbour indices wrap around.
    bool circular() const { return kind == ModelKind::tde; }
    /// Neighbour index p + step, wrapped (TDE) or clamped to the grid (FE).
    Index neighbor(Index p, Index step) const;
};

/// P = c * N atoms with spacing Ts/c (TDE) or 1/c (FE).
ParametricDictionary build_dictionary(const SignalModel& model, int redundancy);

/// mu(i, k) = |<g(b_i), g(b_k)>|
double coherence(const ParametricDictionary& dict, Index i, Index k);

struct BandExclusionConfig {
    double eta = 0.0;
    /// Coherences at or below this count as zero, so eta = 0 only bans overlapping atoms.
    double mu_floor = 1e-2;

    void validate() const;
};

/// B_eta(S) = union over k in S of { i : mu(i, k) > max(eta, mu_floor) }, sorted.
std::vector<Index> band_exclusion(const ParametricDictionary& dict, std::span<const Index> support,
                                  const BandExclusionConfig& cfg);

/// Polar arc frames for every atom:
///   g~(b_p + dn) = c_p + r cos(2 dn theta_p / spacing) u_p + r sin(2 dn theta_p / spacing) v_p
/// passing exactly through g(b_p - spacing/2), g(b_p) and g(b_p + spacing/2).
struct ArcBasisSet {
    CMatrix c;
    CMatrix u;
    CMatrix v;
    double r = 1.0;
    RVector theta;  ///< arc half-angle per atom (rad)
    RVector params;
    double spacing = 0.0;

    Index size() const { return c.cols(); }
};

ArcBasisSet build_arc_bases(const ParametricDictionary& dict);

/// Arc frame of a single atom g0 = g(b_p), anchors taken from the continuous model.
struct ArcFrame {
    CVector c;
    CVector u;
    CVector v;
    double r = 1.0;
    double theta = 0.0;
};

/// Throws DegenerateArcError when theta is numerically zero.
ArcFrame arc_frame(const SignalModel& model, double b_p, double spacing);

/// Point on atom p's arc at offset delta_n, |delta_n| <= spacing/2.
CVector interpolate_on_arc(const ArcBasisSet& arcs, Index p, double delta_n);

}  // namespace cpe
