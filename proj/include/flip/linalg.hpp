#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "flip/error.hpp"

namespace flip {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// conj(u)^T G v
inline Complex herm_inner(const CMatrix& G, const CVector& u, const CVector& v)
{
    if (G.rows() != G.cols() || G.rows() != u.size() || u.size() != v.size())
        throw Error(ErrorCode::DimensionMismatch, "herm_inner: metric is " + std::to_string(G.rows()) + "x"
                                                      + std::to_string(G.cols()) + ", vectors have lengths "
                                                      + std::to_string(u.size()) + " and " + std::to_string(v.size()));
    return u.dot(G * v); // Eigen's dot conjugates the left operand
}

/// h(u,u), real by hermiticity.
inline double herm_norm2(const CMatrix& G, const CVector& u) { return herm_inner(G, u, u).real(); }

/// Real 2n x 2n matrix of the form u -> Re(u^H G u) in coordinates (Re u, Im u).
inline RMatrix realify(const CMatrix& G)
{
    const auto n = G.rows();
    RMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = G.real();
    out.topRightCorner(n, n) = -G.imag();
    out.bottomLeftCorner(n, n) = G.imag();
    out.bottomRightCorner(n, n) = G.real();
    return out;
}

inline RVector to_real(const CVector& v)
{
    RVector out(2 * v.size());
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
}

inline CVector from_real(const RVector& x)
{
    const auto n = x.size() / 2;
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = Complex(x[i], x[n + i]);
    return out;
}

/// Index of the largest-modulus entry; ties resolve to the lowest index.
inline Eigen::Index pivot_index(const CVector& v)
{
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    return best;
}

inline bool is_exact_zero(const CVector& v) { return (v.array() == Complex(0.0, 0.0)).all(); }

} // namespace flip
