#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>
#include <string>
#include <vector>

#include "flip/linalg.hpp"
#include "flip/perturbation_spec.hpp"

namespace flip {

/// Point (theta, t) of the base annulus T x (-epsilon, epsilon); f is the projection to t.
struct BasePoint {
    double theta = 0.0;
    double t = 0.0;
};

enum class MetricKind { Constant, FourierSeries };

/// Matrix-valued Fourier mode C*cos(k theta) + S*sin(k theta); C and S Hermitian.
struct MatrixFourierMode {
    int k = 0;
    CMatrix cos;
    CMatrix sin; ///< may be empty (treated as zero)
};

/// Hermitian metrics on F' and F'' as functions of theta (t-constant).
struct MetricFieldSpec {
    MetricKind kind = MetricKind::Constant;
    CMatrix constant_prime;
    CMatrix constant_second;
    std::vector<MatrixFourierMode> fourier_prime;
    std::vector<MatrixFourierMode> fourier_second;

    static MetricFieldSpec constant(CMatrix g_prime, CMatrix g_second)
    {
        MetricFieldSpec m;
        m.kind = MetricKind::Constant;
        m.constant_prime = std::move(g_prime);
        m.constant_second = std::move(g_second);
        return m;
    }

    static MetricFieldSpec identity(int r_prime, int r_second)
    {
        return constant(CMatrix::Identity(r_prime, r_prime), CMatrix::Identity(r_second, r_second));
    }

    static MetricFieldSpec fourier(std::vector<MatrixFourierMode> prime, std::vector<MatrixFourierMode> second)
    {
        MetricFieldSpec m;
        m.kind = MetricKind::FourierSeries;
        m.fourier_prime = std::move(prime);
        m.fourier_second = std::move(second);
        return m;
    }
};

struct ModelConfig {
    int r_prime = 1;
    int r_second = 1;
    double epsilon = 0.5;
    MetricFieldSpec metric_field = MetricFieldSpec::identity(1, 1);
    PerturbationSpec perturbation;
    double domain_radius = 1.0;
};

/// Point of E over the base: fiber coordinates (y', y'') at (theta, t).
struct FiberPoint {
    BasePoint base;
    CVector y_prime;
    CVector y_second;
};

/// Vector of F = F' x_T F'' over theta in T (no t coordinate).
struct FiberVector {
    double theta = 0.0;
    CVector v_prime;
    CVector v_second;
};

struct MetricPair {
    CMatrix prime;
    CMatrix second;
};

inline constexpr double kHermitianTol = 1e-14;
inline constexpr int kValidationGrid = 64;

namespace detail {

inline CMatrix eval_matrix_fourier(const std::vector<MatrixFourierMode>& modes, Eigen::Index n, double theta)
{
    CMatrix acc = CMatrix::Zero(n, n);
    for (const auto& m : modes) {
        const double c = m.k == 0 ? 1.0 : std::cos(m.k * theta);
        const double s = m.k == 0 ? 0.0 : std::sin(m.k * theta);
        if (m.cos.size() > 0) acc += c * m.cos;
        if (m.sin.size() > 0 && m.k != 0) acc += s * m.sin;
    }
    return acc;
}

inline bool modes_have_size(const std::vector<MatrixFourierMode>& modes, Eigen::Index n)
{
    for (const auto& m : modes) {
        if (m.cos.size() > 0 && (m.cos.rows() != n || m.cos.cols() != n)) return false;
        if (m.sin.size() > 0 && (m.sin.rows() != n || m.sin.cols() != n)) return false;
    }
    return true;
}

inline double hermitian_defect(const CMatrix& A) { return (A - A.adjoint()).cwiseAbs().maxCoeff(); }

} // namespace detail

/// Metric field evaluated without any checks.
inline MetricPair metric_raw(const ModelConfig& cfg, double theta)
{
    const auto& mf = cfg.metric_field;
    if (mf.kind == MetricKind::Constant) return {mf.constant_prime, mf.constant_second};
    return {detail::eval_matrix_fourier(mf.fourier_prime, cfg.r_prime, theta),
            detail::eval_matrix_fourier(mf.fourier_second, cfg.r_second, theta)};
}

/// (G'(theta), G''(theta)); throws ConfigInvalid unless both are Hermitian positive definite.
inline MetricPair metric_at(const ModelConfig& cfg, double theta)
{
    const auto& mf = cfg.metric_field;
    if (mf.kind == MetricKind::Constant) {
        if (mf.constant_prime.rows() != cfg.r_prime || mf.constant_prime.cols() != cfg.r_prime
            || mf.constant_second.rows() != cfg.r_second || mf.constant_second.cols() != cfg.r_second)
            throw Error(ErrorCode::ConfigInvalid, "metric matrices do not match the ranks");
    }
    else if (!detail::modes_have_size(mf.fourier_prime, cfg.r_prime)
             || !detail::modes_have_size(mf.fourier_second, cfg.r_second)) {
        throw Error(ErrorCode::ConfigInvalid, "Fourier metric coefficients do not match the ranks");
    }
    MetricPair g = metric_raw(cfg, theta);
    for (const CMatrix* m : {&g.prime, &g.second}) {
        if (detail::hermitian_defect(*m) > kHermitianTol)
            throw Error(ErrorCode::ConfigInvalid, "metric is not Hermitian at theta=" + std::to_string(theta));
        Eigen::LLT<CMatrix> llt(*m);
        if (llt.info() != Eigen::Success)
            throw Error(ErrorCode::ConfigInvalid, "metric is not positive definite at theta=" + std::to_string(theta));
    }
    return g;
}

/// Smallest eigenvalue of G' and G'' over a uniform theta grid.
inline double min_metric_eigenvalue(const ModelConfig& cfg, int n_theta = kValidationGrid)
{
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_theta; ++j) {
        const MetricPair g = metric_raw(cfg, 2.0 * kPi * j / n_theta);
        for (const CMatrix* m : {&g.prime, &g.second}) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(*m, Eigen::EigenvaluesOnly);
            lo = std::min(lo, es.eigenvalues().minCoeff());
        }
    }
    return lo;
}

inline void check_fiber_dims(const ModelConfig& cfg, const CVector& prime, const CVector& second)
{
    if (prime.size() != cfg.r_prime || second.size() != cfg.r_second)
        throw Error(ErrorCode::DimensionMismatch, "fiber vector has lengths (" + std::to_string(prime.size()) + ", "
                                                      + std::to_string(second.size()) + "), ranks are ("
                                                      + std::to_string(cfg.r_prime) + ", "
                                                      + std::to_string(cfg.r_second) + ")");
}

/// zeta . (y', y'') = (zeta y', zeta^-1 y'')
inline FiberPoint cstar_act(Complex zeta, const FiberPoint& p)
{
    if (zeta == Complex(0.0, 0.0)) throw Error(ErrorCode::ZeroScalar, "C* action by zero");
    return {p.base, zeta * p.y_prime, p.y_second / zeta};
}

inline FiberVector cstar_act(Complex zeta, const FiberVector& v)
{
    if (zeta == Complex(0.0, 0.0)) throw Error(ErrorCode::ZeroScalar, "C* action by zero");
    return {v.theta, zeta * v.v_prime, v.v_second / zeta};
}

inline FiberVector fiber_part(const FiberPoint& p) { return {p.base.theta, p.y_prime, p.y_second}; }

inline FiberPoint over(const FiberVector& v, double t) { return {{v.theta, t}, v.v_prime, v.v_second}; }

/// |v|^2 = h'(v',v') + h''(v'',v'') with the metric at v.theta.
inline double fiber_norm2(const ModelConfig& cfg, const FiberVector& v)
{
    check_fiber_dims(cfg, v.v_prime, v.v_second);
    const MetricPair g = metric_at(cfg, v.theta);
    return herm_norm2(g.prime, v.v_prime) + herm_norm2(g.second, v.v_second);
}

enum class ViolationKind {
    RankViolation,
    EpsilonViolation,
    DomainRadiusViolation,
    DimensionViolation,
    HermitianViolation,
    PositivityViolation,
    PerturbationOrderViolation,
    ReferenceSectionViolation,
};

constexpr std::string_view to_string(ViolationKind k) noexcept
{
    switch (k) {
    case ViolationKind::RankViolation: return "RankViolation";
    case ViolationKind::EpsilonViolation: return "EpsilonViolation";
    case ViolationKind::DomainRadiusViolation: return "DomainRadiusViolation";
    case ViolationKind::DimensionViolation: return "DimensionViolation";
    case ViolationKind::HermitianViolation: return "HermitianViolation";
    case ViolationKind::PositivityViolation: return "PositivityViolation";
    case ViolationKind::PerturbationOrderViolation: return "PerturbationOrderViolation";
    case ViolationKind::ReferenceSectionViolation: return "ReferenceSectionViolation";
    }
    return "Unknown";
}

struct Violation {
    ViolationKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }

    [[nodiscard]] bool has(ViolationKind k) const
    {
        for (const auto& v : violations)
            if (v.kind == k) return true;
        return false;
    }
};

/// Lists every violated invariant of cfg; an empty report means the config is usable.
inline ValidationReport validate_config(const ModelConfig& cfg)
{
    ValidationReport rep;
    auto fail = [&](ViolationKind k, std::string d) { rep.violations.push_back({k, std::move(d)}); };

    if (cfg.r_prime < 1 || cfg.r_second < 1) {
        fail(ViolationKind::RankViolation,
             "ranks must be >= 1, got (" + std::to_string(cfg.r_prime) + ", " + std::to_string(cfg.r_second) + ")");
        return rep; // nothing else can be checked meaningfully
    }
    if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) fail(ViolationKind::EpsilonViolation, "epsilon must be > 0");
    if (!(cfg.domain_radius > 0.0) || !std::isfinite(cfg.domain_radius))
        fail(ViolationKind::DomainRadiusViolation, "domain_radius must be > 0");

    const auto& mf = cfg.metric_field;
    bool dims_ok = true;
    if (mf.kind == MetricKind::Constant) {
        dims_ok = mf.constant_prime.rows() == cfg.r_prime && mf.constant_prime.cols() == cfg.r_prime
                  && mf.constant_second.rows() == cfg.r_second && mf.constant_second.cols() == cfg.r_second;
    }
    else {
        dims_ok = detail::modes_have_size(mf.fourier_prime, cfg.r_prime)
                  && detail::modes_have_size(mf.fourier_second, cfg.r_second);
    }
    if (!dims_ok) fail(ViolationKind::DimensionViolation, "metric matrices do not match the ranks");

    if (dims_ok) {
        double worst_herm = 0.0;
        double worst_eig = std::numeric_limits<double>::infinity();
        double worst_theta = 0.0;
        for (int j = 0; j < kValidationGrid; ++j) {
            const double theta = 2.0 * kPi * j / kValidationGrid;
            const MetricPair g = metric_raw(cfg, theta);
            for (const CMatrix* m : {&g.prime, &g.second}) {
                worst_herm = std::max(worst_herm, detail::hermitian_defect(*m));
                const CMatrix sym = 0.5 * (*m + m->adjoint());
                Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
                const double lo = es.eigenvalues().minCoeff();
                if (lo < worst_eig) {
                    worst_eig = lo;
                    worst_theta = theta;
                }
            }
        }
        if (worst_herm > kHermitianTol)
            fail(ViolationKind::HermitianViolation, "max |G - G^H| = " + std::to_string(worst_herm));
        if (!(worst_eig > 0.0))
            fail(ViolationKind::PositivityViolation, "smallest eigenvalue " + std::to_string(worst_eig)
                                                         + " at theta=" + std::to_string(worst_theta));
    }

    const auto& pert = cfg.perturbation;
    for (std::size_t i = 0; i < pert.reference_sections.size(); ++i)
        if (pert.reference_sections[i].size() != cfg.r_prime)
            fail(ViolationKind::ReferenceSectionViolation,
                 "reference section " + std::to_string(i) + " does not have length r'");
    for (std::size_t i = 0; i < pert.terms.size(); ++i) {
        const auto& term = pert.terms[i];
        if (term.has_negative_exponent())
            fail(ViolationKind::PerturbationOrderViolation, "term " + std::to_string(i) + " has a negative exponent");
        else if (term.degree() < 4)
            fail(ViolationKind::PerturbationOrderViolation,
                 "term " + std::to_string(i) + " has degree " + std::to_string(term.degree()) + " < 4");
        if (term.reference.size() > pert.reference_sections.size())
            fail(ViolationKind::ReferenceSectionViolation,
                 "term " + std::to_string(i) + " references a missing section");
    }
    return rep;
}

} // namespace flip
