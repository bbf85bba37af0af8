#pragma once

#include <functional>
#include <string>

#include "cpe/dictionary.hpp"
#include "cpe/sensing.hpp"
#include "cpe/types.hpp"

namespace cpe {

/// Dictionary and arc frames pushed through the measurement operator once per (op, dict).
struct ProjectedDictionary {
    CMatrix ad;  ///< A D, M x P
    CMatrix ac;  ///< A C (empty without arcs)
    CMatrix au;
    CMatrix av;

    bool has_arcs() const { return ac.size() > 0; }
};

ProjectedDictionary project(const MeasurementOperator& op, const ParametricDictionary& dict,
                            const ArcBasisSet* arcs = nullptr);

struct ProxyVector {
    CVector values;  ///< <y_res, A D_m> per atom
};

ProxyVector compute_proxy(const CVector& y_res, const MeasurementOperator& op, const ParametricDictionary& dict);
ProxyVector compute_proxy(const CVector& y_res, const ProjectedDictionary& proj);

struct InterpolationEstimate {
    double b_hat = 0.0;
    Complex amplitude_hint{0.0, 0.0};
    double fit_residual = 0.0;  ///< ||y_res - A (local fit)||, polar only
    bool fallback = false;
    std::string note;
};

/// Parabola through |R| at (i-1, i, i+1); offset clamped to the atom cell.
InterpolationEstimate parabolic_interpolate(const ProxyVector& proxy, const ParametricDictionary& dict, Index i_n);

/// Least-squares fit of (a, a r cos, a r sin) on the arc frame of atom i_n.
/// Throws UnstableFitError when the cosine coefficient vanishes.
InterpolationEstimate polar_interpolate(const CVector& y_res, const ProjectedDictionary& proj,
                                        const ArcBasisSet& arcs, const ParametricDictionary& dict, Index i_n);

struct InterpolationContext {
    const ParametricDictionary& dict;
    const ProjectedDictionary& proj;
    const ArcBasisSet* arcs = nullptr;
};

using Interpolator = std::function<InterpolationEstimate(const InterpolationContext&, const CVector& y_res,
                                                         const ProxyVector& proxy, Index i_n)>;

Interpolator parabolic_interpolator();
/// Falls back to the grid parameter when the polar fit is unstable.
Interpolator polar_interpolator();
/// Always returns the grid parameter; IBOMP with it reduces to BOMP.
Interpolator grid_interpolator();

}  // namespace cpe
