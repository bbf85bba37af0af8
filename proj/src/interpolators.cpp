#include "cpe/interpolators.hpp"

#include <algorithm>
#include <cmath>

#include "cpe/kernels.hpp"

namespace cpe {

ProjectedDictionary project(const MeasurementOperator& op, const ParametricDictionary& dict, const ArcBasisSet* arcs) {
    ProjectedDictionary proj;
    proj.ad = op.apply(dict.atoms);
    if (arcs != nullptr) {
        proj.ac = op.apply(arcs->c);
        proj.au = op.apply(arcs->u);
        proj.av = op.apply(arcs->v);
    }
    return proj;
}

ProxyVector compute_proxy(const CVector& y_res, const MeasurementOperator& op, const ParametricDictionary& dict) {
    return compute_proxy(y_res, project(op, dict));
}

ProxyVector compute_proxy(const CVector& y_res, const ProjectedDictionary& proj) {
    if (y_res.size() != proj.ad.rows()) throw DomainError("residual length does not match the operator");
    return ProxyVector{kernels::correlate(proj.ad, y_res)};
}

InterpolationEstimate parabolic_interpolate(const ProxyVector& proxy, const ParametricDictionary& dict, Index i_n) {
    const double half = 0.5 * dict.spacing;
    const double r_minus = std::abs(proxy.values(dict.neighbor(i_n, -1)));
    const double r_mid = std::abs(proxy.values(i_n));
    const double r_plus = std::abs(proxy.values(dict.neighbor(i_n, +1)));

    InterpolationEstimate est;
    est.amplitude_hint = proxy.values(i_n);
    const double denom = r_plus - 2.0 * r_mid + r_minus;
    double offset = 0.0;
    if (std::abs(denom) <= 1e-14 * std::max(1.0, r_mid)) {
        est.fallback = true;
        est.note = "zero curvature";
    } else {
        offset = std::clamp(-half * (r_plus - r_minus) / denom, -half, half);
    }
    est.b_hat = dict.model.wrap(dict.params(i_n) + offset);
    return est;
}

InterpolationEstimate polar_interpolate(const CVector& y_res, const ProjectedDictionary& proj,
                                        const ArcBasisSet& arcs, const ParametricDictionary& dict, Index i_n) {
    if (!proj.has_arcs()) throw DomainError("polar interpolation needs projected arc bases");
    CMatrix frame(y_res.size(), 3);
    frame.col(0) = proj.ac.col(i_n);
    frame.col(1) = proj.au.col(i_n);
    frame.col(2) = proj.av.col(i_n);
    const CVector x = frame.colPivHouseholderQr().solve(y_res);
    if (std::abs(x(1)) < 1e-12) throw UnstableFitError("polar fit: cosine coefficient vanished");

    const double half = 0.5 * arcs.spacing;
    const double angle = std::atan((x(2) / x(1)).real());
    InterpolationEstimate est;
    const double offset = std::clamp(angle * arcs.spacing / (2.0 * arcs.theta(i_n)), -half, half);
    est.b_hat = dict.model.wrap(dict.params(i_n) + offset);
    est.amplitude_hint = x(0);
    est.fit_residual = (y_res - frame * x).norm();
    return est;
}

Interpolator parabolic_interpolator() {
    return [](const InterpolationContext& ctx, const CVector&, const ProxyVector& proxy, Index i_n) {
        return parabolic_interpolate(proxy, ctx.dict, i_n);
    };
}

Interpolator polar_interpolator() {
    return [](const InterpolationContext& ctx, const CVector& y_res, const ProxyVector& proxy, Index i_n) {
        if (ctx.arcs == nullptr) throw DomainError("polar interpolation needs arc bases");
        try {
            return polar_interpolate(y_res, ctx.proj, *ctx.arcs, ctx.dict, i_n);
        } catch (const UnstableFitError& e) {
            InterpolationEstimate est;
            est.b_hat = ctx.dict.params(i_n);
            est.amplitude_hint = proxy.values(i_n);
            est.fallback = true;
            est.note = e.what();
            return est;
        }
    };
}

Interpolator grid_interpolator() {
    return [](const InterpolationContext& ctx, const CVector&, const ProxyVector& proxy, Index i_n) {
        InterpolationEstimate est;
        est.b_hat = ctx.dict.params(i_n);
        est.amplitude_hint = proxy.values(i_n);
        return est;
    };
}

}  // namespace cpe
