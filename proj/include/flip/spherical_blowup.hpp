#pragma once

#include <cmath>

#include "flip/hermitian_core.hpp"

namespace flip {

/// Polar coordinates (r, w) on the spherical blowup of F at the zero section.
/// w is a unit vector for the metric at base.theta; r = 0 is the boundary S(F).
struct BlowupPoint {
    double r = 0.0;
    CVector w_prime;
    CVector w_second;
    BasePoint base;
};

/// Pivot-normalized representative of [w' : conj(w'')] in P(F' + conj F'').
struct BoundaryPoint {
    CVector homog;
    BasePoint base;
};

inline double unit_defect(const ModelConfig& cfg, const BlowupPoint& bp)
{
    const MetricPair g = metric_at(cfg, bp.base.theta);
    return std::abs(herm_norm2(g.prime, bp.w_prime) + herm_norm2(g.second, bp.w_second) - 1.0);
}

inline BlowupPoint to_blowup(const ModelConfig& cfg, const FiberPoint& p)
{
    check_fiber_dims(cfg, p.y_prime, p.y_second);
    if (is_exact_zero(p.y_prime) && is_exact_zero(p.y_second))
        throw Error(ErrorCode::OnCenter, "the zero section has no polar coordinates");
    const MetricPair g = metric_at(cfg, p.base.theta);
    const double r = std::sqrt(herm_norm2(g.prime, p.y_prime) + herm_norm2(g.second, p.y_second));
    return {r, p.y_prime / r, p.y_second / r, p.base};
}

/// Blow-down y = r w; boundary points land on the zero section.
inline FiberPoint from_blowup(const BlowupPoint& bp) { return {bp.base, bp.r * bp.w_prime, bp.r * bp.w_second}; }

/// Extension of zeta . (v', v'') = (zeta v', zeta^-1 v'') to (r, w):
///   zeta . (r, w) = (r N, (zeta w', zeta^-1 w'') / N),  N^2 = |zeta|^2 |w'|^2 + |zeta|^-2 |w''|^2.
inline BlowupPoint cstar_act_blowup(const ModelConfig& cfg, Complex zeta, const BlowupPoint& bp)
{
    if (zeta == Complex(0.0, 0.0)) throw Error(ErrorCode::ZeroScalar, "C* action by zero");
    check_fiber_dims(cfg, bp.w_prime, bp.w_second);
    const MetricPair g = metric_at(cfg, bp.base.theta);
    const double mod2 = std::norm(zeta);
    const double scale = std::sqrt(mod2 * herm_norm2(g.prime, bp.w_prime) + herm_norm2(g.second, bp.w_second) / mod2);
    return {bp.r * scale, (zeta / scale) * bp.w_prime, bp.w_second / (zeta * scale), bp.base};
}

inline BoundaryPoint boundary_coords(const ModelConfig& cfg, const BlowupPoint& bp)
{
    check_fiber_dims(cfg, bp.w_prime, bp.w_second);
    if (bp.r != 0.0 || bp.base.t != 0.0)
        throw Error(ErrorCode::NotOnBoundary, "boundary coordinates need r = 0 and t = 0");
    CVector h(bp.w_prime.size() + bp.w_second.size());
    h << bp.w_prime, bp.w_second.conjugate();
    const Complex pivot = h[pivot_index(h)];
    if (pivot == Complex(0.0, 0.0)) throw Error(ErrorCode::InvalidArgument, "boundary direction is zero");
    return {h / pivot, bp.base};
}

} // namespace flip
