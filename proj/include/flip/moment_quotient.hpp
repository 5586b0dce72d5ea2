#pragma once

#include <cmath>
#include <string_view>

#include "flip/hermitian_core.hpp"

namespace flip {

enum class StabilityClass { Stable, Unstable };
enum class FiberType { QPrime, QZero, QSecond };
enum class Block { Prime, Second };

constexpr std::string_view to_string(FiberType f) noexcept
{
    switch (f) {
    case FiberType::QPrime: return "QPrime";
    case FiberType::QZero: return "QZero";
    case FiberType::QSecond: return "QSecond";
    }
    return "Unknown";
}

constexpr std::string_view to_string(StabilityClass s) noexcept
{
    return s == StabilityClass::Stable ? "Stable" : "Unstable";
}

constexpr std::string_view to_string(Block b) noexcept { return b == Block::Prime ? "prime" : "second"; }

struct ChartPivot {
    Block block = Block::Prime;
    Eigen::Index index = 0;

    friend bool operator==(const ChartPivot&, const ChartPivot&) = default;
};

/// Trivialization of the tautological bundle over a standard affine chart of P(V') or P(V'').
struct ChartCoords {
    ChartPivot pivot;
    CVector affine;     ///< pivot block divided by its pivot coordinate, pivot entry dropped
    CVector line_fiber; ///< pivot coordinate times the other block
    BasePoint base;
};

/// Coordinates on the blowup quotient p'^*Theta' (x) p''^*Theta''.
struct TildeCoords {
    CVector class_prime;  ///< y' normalized so its pivot entry is 1
    CVector class_second; ///< y'' normalized likewise
    Complex lambda;       ///< product of the two pivot coordinates
    BasePoint base;
};

struct LevelNormalization {
    double rho;
    FiberPoint p0;
};

/// m^f(y', y'') = 1/2 (|y'|^2 - |y''|^2) + t with the metric at the base point.
inline double moment_value(const ModelConfig& cfg, const FiberPoint& p)
{
    check_fiber_dims(cfg, p.y_prime, p.y_second);
    const MetricPair g = metric_at(cfg, p.base.theta);
    return 0.5 * (herm_norm2(g.prime, p.y_prime) - herm_norm2(g.second, p.y_second)) + p.base.t;
}

inline StabilityClass classify(const ModelConfig& cfg, const FiberPoint& p)
{
    check_fiber_dims(cfg, p.y_prime, p.y_second);
    const bool has_prime = !is_exact_zero(p.y_prime);
    const bool has_second = !is_exact_zero(p.y_second);
    const double t = p.base.t;
    const bool stable = (t < 0.0 && has_prime) || (t > 0.0 && has_second) || (t == 0.0 && has_prime && has_second);
    return stable ? StabilityClass::Stable : StabilityClass::Unstable;
}

inline FiberType fiber_type(const BasePoint& base)
{
    if (base.t < 0.0) return FiberType::QPrime;
    if (base.t > 0.0) return FiberType::QSecond;
    return FiberType::QZero;
}

/// Positive root s of a' s^2 + 2 c s - a'' = 0, written to avoid cancellation.
/// Requires a' > 0, or a' = 0 with c > 0 and a'' > 0.
inline double positive_quadratic_root(double a_prime, double a_second, double c)
{
    const double disc = std::sqrt(c * c + a_prime * a_second);
    if (c <= 0.0) return (-c + disc) / a_prime;
    return a_second / (c + disc);
}

/// Rescales p along its C*-orbit onto the zero level of m^f.
inline LevelNormalization normalize_to_level(const ModelConfig& cfg, const FiberPoint& p)
{
    if (classify(cfg, p) != StabilityClass::Stable)
        throw Error(ErrorCode::NotStable, "point is outside the stable locus; its orbit misses Z(m^f)");
    const MetricPair g = metric_at(cfg, p.base.theta);
    const double a_prime = herm_norm2(g.prime, p.y_prime);
    const double a_second = herm_norm2(g.second, p.y_second);
    const double s = positive_quadratic_root(a_prime, a_second, p.base.t);
    const double rho = std::sqrt(s);
    return {rho, cstar_act(Complex(rho, 0.0), p)};
}

/// y' (x) y'' as an r' x r'' matrix.
inline CMatrix segre_point(const FiberPoint& p) { return p.y_prime * p.y_second.transpose(); }

inline CMatrix segre_point(const FiberVector& v) { return v.v_prime * v.v_second.transpose(); }

namespace detail {

inline CVector drop_entry(const CVector& v, Eigen::Index i)
{
    CVector out(v.size() - 1);
    for (Eigen::Index j = 0, k = 0; j < v.size(); ++j)
        if (j != i) out[k++] = v[j];
    return out;
}

} // namespace detail

/// Chart of Q*_f around the orbit of p. Pivots on y' for t <= 0 and on y'' for t > 0.
inline ChartCoords quotient_chart(const ModelConfig& cfg, const FiberPoint& p)
{
    if (classify(cfg, p) != StabilityClass::Stable)
        throw Error(ErrorCode::NotStable, "quotient chart requested outside the stable locus");
    const Block block = p.base.t > 0.0 ? Block::Second : Block::Prime;
    const CVector& pivot_block = block == Block::Prime ? p.y_prime : p.y_second;
    const CVector& other_block = block == Block::Prime ? p.y_second : p.y_prime;
    const Eigen::Index idx = pivot_index(pivot_block);
    const Complex pivot = pivot_block[idx];

    ChartCoords out;
    out.pivot = {block, idx};
    out.affine = detail::drop_entry(pivot_block, idx) / pivot;
    out.line_fiber = pivot * other_block;
    out.base = p.base;
    return out;
}

/// Coordinates on Q~ away from the exceptional loci {y' = 0} and {y'' = 0}.
inline TildeCoords tilde_coords(const ModelConfig& cfg, const FiberPoint& p)
{
    check_fiber_dims(cfg, p.y_prime, p.y_second);
    if (is_exact_zero(p.y_prime) || is_exact_zero(p.y_second))
        throw Error(ErrorCode::OnExceptionalLocus, "tilde coordinates need y' != 0 and y'' != 0");
    const Complex piv_prime = p.y_prime[pivot_index(p.y_prime)];
    const Complex piv_second = p.y_second[pivot_index(p.y_second)];
    return {p.y_prime / piv_prime, p.y_second / piv_second, piv_prime * piv_second, p.base};
}

/// lambda * class' (x) class''; equals segre_point of the source point.
inline CMatrix reconstruct_segre(const TildeCoords& tc)
{
    return tc.lambda * (tc.class_prime * tc.class_second.transpose());
}

/// Number of complex fiber coordinates in a quotient chart; r' + r'' - 1.
inline Eigen::Index chart_dimension(const ChartCoords& c) { return c.affine.size() + c.line_fiber.size(); }

} // namespace flip
