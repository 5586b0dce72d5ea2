#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "flip/hermitian_core.hpp"
#include "flip/moment_quotient.hpp"
#include "flip/sampling.hpp"
#include "flip/spherical_blowup.hpp"

namespace flip {

inline constexpr double kNewtonTol = 1e-12;
inline constexpr int kNewtonMaxIter = 50;

// ---------------------------------------------------------------------------
// Invariant polynomials

/// Values of the S^1-invariant generators at a fiber vector.
struct InvariantValues {
    double norm_prime = 0.0;
    double norm_second = 0.0;
    std::vector<double> reference; ///< |h'(v', a_j)|^2
};

inline InvariantValues invariants(const MetricPair& g, const PerturbationSpec& spec, const FiberVector& v)
{
    InvariantValues out;
    out.norm_prime = herm_norm2(g.prime, v.v_prime);
    out.norm_second = herm_norm2(g.second, v.v_second);
    out.reference.reserve(spec.reference_sections.size());
    for (const auto& a : spec.reference_sections) out.reference.push_back(std::norm(herm_inner(g.prime, v.v_prime, a)));
    return out;
}

inline double term_value(const PerturbationTerm& term, const InvariantValues& inv, double theta)
{
    double value = eval_fourier(term.coeff, theta);
    if (value == 0.0) return 0.0;
    value *= std::pow(inv.norm_prime, term.norm_prime + term.mixed);
    value *= std::pow(inv.norm_second, term.norm_second + term.mixed);
    for (std::size_t j = 0; j < term.reference.size(); ++j)
        if (term.reference[j] != 0) value *= std::pow(inv.reference.at(j), term.reference[j]);
    return value;
}

/// sum of terms at v; no domain check.
inline double polynomial_value(const ModelConfig& cfg, const PerturbationSpec& spec, const FiberVector& v)
{
    const MetricPair g = metric_at(cfg, v.theta);
    const InvariantValues inv = invariants(g, spec, v);
    double acc = 0.0;
    for (const auto& term : spec.terms) acc += term_value(term, inv, v.theta);
    return acc;
}

/// sum_terms term(w) r^(deg - shift): the value at r w divided by r^shift, smooth at r = 0
/// provided every degree is >= shift.
inline double polynomial_scaled(const ModelConfig& cfg, const PerturbationSpec& spec, double r, const FiberVector& w,
                                int shift)
{
    const MetricPair g = metric_at(cfg, w.theta);
    const InvariantValues inv = invariants(g, spec, w);
    double acc = 0.0;
    for (const auto& term : spec.terms) {
        const int power = term.degree() - shift;
        acc += term_value(term, inv, w.theta) * (power == 0 ? 1.0 : std::pow(r, power));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Graph functions

/// chi_f(v) = -1/2 (h'(v',v') - h''(v'',v''))
inline double chi_f(const ModelConfig& cfg, const FiberVector& v)
{
    check_fiber_dims(cfg, v.v_prime, v.v_second);
    const MetricPair g = metric_at(cfg, v.theta);
    return -0.5 * (herm_norm2(g.prime, v.v_prime) - herm_norm2(g.second, v.v_second));
}

inline void check_domain(const ModelConfig& cfg, const FiberVector& v)
{
    const double n = std::sqrt(fiber_norm2(cfg, v));
    if (!(n <= cfg.domain_radius))
        throw Error(ErrorCode::OutOfDomain,
                    "|v| = " + std::to_string(n) + " exceeds domain_radius " + std::to_string(cfg.domain_radius));
}

/// chi(v) = chi_f(v) + r_x(v)
inline double chi_eval(const ModelConfig& cfg, const FiberVector& v)
{
    check_domain(cfg, v);
    return chi_f(cfg, v) + polynomial_value(cfg, cfg.perturbation, v);
}

/// Rest r_x(v) = chi(v) - (quadratic part).
inline double taylor_rest(const ModelConfig& cfg, const FiberVector& v)
{
    check_domain(cfg, v);
    return polynomial_value(cfg, cfg.perturbation, v);
}

struct RestBoundReport {
    double empirical_M = 0.0;
    FiberPoint max_ratio_point;
    int samples = 0;
};

/// Largest |r_x(v)| / |v|^3 over n_samples uniform draws from the domain ball.
inline RestBoundReport rest_bound_scan(const ModelConfig& cfg, int n_samples, std::uint64_t seed = 0)
{
    RestBoundReport rep;
    rep.samples = n_samples;
    rep.max_ratio_point = {{0.0, 0.0}, CVector::Zero(cfg.r_prime), CVector::Zero(cfg.r_second)};
    Sampler sampler(seed, 0x5e57);
    for (int i = 0; i < n_samples; ++i) {
        const FiberVector v = sampler.ball_fiber(cfg, cfg.domain_radius);
        const double n = std::sqrt(fiber_norm2(cfg, v));
        if (n == 0.0) continue;
        const double ratio = std::abs(taylor_rest(cfg, v)) / (n * n * n);
        if (ratio > rep.empirical_M) {
            rep.empirical_M = ratio;
            rep.max_ratio_point = over(v, chi_eval(cfg, v));
        }
    }
    return rep;
}

struct EstimatesMargin {
    double bound = 0.0; ///< empirical_M * domain_radius
    double limit = 0.0; ///< min metric eigenvalue / 4
    bool ok = false;
};

/// Operational form of |r(u',0)| <= h'(u',u')/4, |r(0,u'')| <= h''(u'',u'')/4 on the domain.
inline EstimatesMargin estimates_margin(const ModelConfig& cfg, const RestBoundReport& rest)
{
    EstimatesMargin m;
    m.bound = rest.empirical_M * cfg.domain_radius;
    m.limit = 0.25 * min_metric_eigenvalue(cfg);
    m.ok = m.bound <= m.limit;
    return m;
}

// ---------------------------------------------------------------------------
// Defining functions phi on a neighborhood of the zero section

/// phi(v, t) = t_linear t + t_cubic t^3 + 1/2 (quad_prime |v'|^2 + quad_second |v''|^2)
///             - perturbation_weight * r_x(v).
/// The defaults reproduce the graph form phi = t - chi(v), which is m^f when there are no terms.
struct PhiSpec {
    double t_linear = 1.0;
    double t_cubic = 0.0;
    double quad_prime = 1.0;
    double quad_second = -1.0;
    double perturbation_weight = 1.0;
};

/// PhiSpec bound to a configuration; callable as phi(v, t) with analytic d/dt.
class PhiField {
public:
    PhiField(const ModelConfig& cfg, PhiSpec spec) : cfg_(&cfg), spec_(spec) {}

    double operator()(const FiberVector& v, double t) const
    {
        check_fiber_dims(*cfg_, v.v_prime, v.v_second);
        const MetricPair g = metric_at(*cfg_, v.theta);
        const double quad =
            0.5 * (spec_.quad_prime * herm_norm2(g.prime, v.v_prime) + spec_.quad_second * herm_norm2(g.second, v.v_second));
        const double pert =
            spec_.perturbation_weight == 0.0 ? 0.0 : spec_.perturbation_weight * polynomial_value(*cfg_, cfg_->perturbation, v);
        return spec_.t_linear * t + spec_.t_cubic * t * t * t + quad - pert;
    }

    [[nodiscard]] double dt(const FiberVector&, double t) const { return spec_.t_linear + 3.0 * spec_.t_cubic * t * t; }

    [[nodiscard]] const PhiSpec& spec() const { return spec_; }

private:
    const ModelConfig* cfg_;
    PhiSpec spec_;
};

template <class Phi>
concept ScalarFieldOnE = requires(const Phi& phi, const FiberVector& v, double t) {
    { phi(v, t) } -> std::convertible_to<double>;
};

template <class Phi>
concept HasTimeDerivative = requires(const Phi& phi, const FiberVector& v, double t) {
    { phi.dt(v, t) } -> std::convertible_to<double>;
};

namespace detail {

template <ScalarFieldOnE Phi>
double phi_dt(const Phi& phi, const FiberVector& v, double t)
{
    if constexpr (HasTimeDerivative<Phi>) {
        return phi.dt(v, t);
    }
    else {
        const double h = 1e-6 * std::max(1.0, std::abs(t));
        return (phi(v, t + h) - phi(v, t - h)) / (2.0 * h);
    }
}

} // namespace detail

/// Solves phi(v, t) = 0 for t by Newton's method seeded at chi_f(v).
template <ScalarFieldOnE Phi>
double extract_graph(const ModelConfig& cfg, const Phi& phi, const FiberVector& v)
{
    double t = chi_f(cfg, v);
    for (int it = 0; it <= kNewtonMaxIter; ++it) {
        const double value = phi(v, t);
        if (!std::isfinite(value)) break;
        const double slope = detail::phi_dt(phi, v, t);
        if (std::abs(slope) < 1e-8)
            throw Error(ErrorCode::DegenerateDerivative, "d phi / dt vanishes near t=" + std::to_string(t));
        if (std::abs(value) <= kNewtonTol) return t;
        t -= value / slope;
    }
    throw Error(ErrorCode::NoRoot, "Newton iteration for the graph of phi did not converge");
}

struct ConditionReport {
    bool p1_ok = false;
    bool p2_ok = false;
    bool p3_ok = false;
    double worst_p1 = 0.0;
    double worst_p2 = 0.0;
    double worst_p3 = 0.0;
    int samples = 0;

    [[nodiscard]] bool all_ok() const { return p1_ok && p2_ok && p3_ok; }
};

/// Expected fiber Hessian at the zero section: Re h' on the first block, -Re h'' on the second,
/// in real coordinates (Re v', Im v', Re v'', Im v'').
inline RMatrix expected_fiber_hessian(const MetricPair& g)
{
    const auto n1 = 2 * g.prime.rows();
    const auto n2 = 2 * g.second.rows();
    RMatrix h = RMatrix::Zero(n1 + n2, n1 + n2);
    h.topLeftCorner(n1, n1) = realify(g.prime);
    h.bottomRightCorner(n2, n2) = -realify(g.second);
    return h;
}

namespace detail {

inline FiberVector from_real_coords(double theta, const RVector& x, Eigen::Index r_prime, Eigen::Index r_second)
{
    return {theta, from_real(x.head(2 * r_prime)), from_real(x.tail(2 * r_second))};
}

} // namespace detail

/// Central-difference real Hessian of f at x.
template <class F>
RMatrix fd_hessian(const F& f, const RVector& x, double h)
{
    const auto n = x.size();
    RMatrix H(n, n);
    const double f0 = f(x);
    for (Eigen::Index i = 0; i < n; ++i) {
        RVector xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            RVector pp = x, pm = x, mp = x, mm = x;
            pp[i] += h, pp[j] += h;
            pm[i] += h, pm[j] -= h;
            mp[i] -= h, mp[j] += h;
            mm[i] -= h, mm[j] -= h;
            H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    }
    return H;
}

/// Central-difference gradient of f at x.
template <class F>
RVector fd_gradient(const F& f, const RVector& x, double h)
{
    RVector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        RVector xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Finite-difference check of P1-P3 for phi along T at n_theta equally spaced angles.
template <ScalarFieldOnE Phi>
ConditionReport verify_conditions(const ModelConfig& cfg, const Phi& phi, int n_theta, double fd_step, double tol)
{
    if (!(fd_step > 1e-6 && fd_step < 1e-2))
        throw Error(ErrorCode::InvalidArgument, "fd_step must lie in (1e-6, 1e-2)");
    if (n_theta < 1) throw Error(ErrorCode::InvalidArgument, "n_theta must be >= 1");

    ConditionReport rep;
    rep.samples = n_theta;
    const Eigen::Index dim = 2 * (cfg.r_prime + cfg.r_second);
    const RVector origin = RVector::Zero(dim);
    for (int j = 0; j < n_theta; ++j) {
        const double theta = 2.0 * kPi * j / n_theta;
        const FiberVector zero{theta, CVector::Zero(cfg.r_prime), CVector::Zero(cfg.r_second)};

        const double at_zero = std::abs(phi(zero, 0.0));
        const double dphi_dt = (phi(zero, fd_step) - phi(zero, -fd_step)) / (2.0 * fd_step);
        rep.worst_p1 = std::max({rep.worst_p1, at_zero, std::abs(dphi_dt - 1.0)});

        auto fiber_fn = [&](const RVector& x) {
            return phi(detail::from_real_coords(theta, x, cfg.r_prime, cfg.r_second), 0.0);
        };
        rep.worst_p2 = std::max(rep.worst_p2, fd_gradient(fiber_fn, origin, fd_step).cwiseAbs().maxCoeff());

        const RMatrix expected = expected_fiber_hessian(metric_at(cfg, theta));
        const RMatrix measured = fd_hessian(fiber_fn, origin, fd_step);
        rep.worst_p3 = std::max(rep.worst_p3, (measured - expected).cwiseAbs().maxCoeff());
    }
    rep.p1_ok = rep.worst_p1 <= tol;
    rep.p2_ok = rep.worst_p2 <= tol;
    rep.p3_ok = rep.worst_p3 <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Orbit rescaling chi_f(rho v', rho^-1 v'') = chi(v', v'')

struct RhoSolution {
    double rho = 1.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

/// alpha(rho) - written as -((rho^2 - 1)/2)(a' + a''/rho^2) - rest, which is
/// chi_f(rho v', rho^-1 v'') - chi(v) for a' = |v'|^2, a'' = |v''|^2, rest = r_x(v).
inline double alpha_reduced(double rho, double a_prime, double a_second, double rest)
{
    const double rho2m1 = (rho - 1.0) * (rho + 1.0);
    return -0.5 * rho2m1 * (a_prime + a_second / (rho * rho)) - rest;
}

/// d alpha / d rho = -rho^-1 (rho^2 a' + rho^-2 a'')
inline double beta_reduced(double rho, double a_prime, double a_second)
{
    return -(rho * rho * a_prime + a_second / (rho * rho)) / rho;
}

inline RhoSolution newton_rho(double a_prime, double a_second, double rest, bool prime_zero, bool second_zero)
{
    if (prime_zero && second_zero) throw Error(ErrorCode::DegenerateBranch, "v lies on the zero section");
    const double c = -0.5 * (a_prime - a_second) + rest;
    if (prime_zero && c <= 0.0)
        throw Error(ErrorCode::DegenerateBranch, "v' = 0 with chi(v) <= 0 has no positive rescaling");
    if (second_zero && c >= 0.0)
        throw Error(ErrorCode::DegenerateBranch, "v'' = 0 with chi(v) >= 0 has no positive rescaling");

    double rho = std::sqrt(positive_quadratic_root(a_prime, a_second, c));
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    RhoSolution sol;
    for (int it = 0; it <= kNewtonMaxIter; ++it) {
        const double a = alpha_reduced(rho, a_prime, a_second, rest);
        // alpha is strictly decreasing in rho, so its sign locates the root.
        if (a > 0.0)
            lo = std::max(lo, rho);
        else
            hi = std::min(hi, rho);
        const double b = beta_reduced(rho, a_prime, a_second);
        if (std::abs(a) <= kNewtonTol) {
            const double polished = rho - a / b;
            const double a_pol = polished > 0.0 ? alpha_reduced(polished, a_prime, a_second, rest) : a;
            if (polished > 0.0 && std::abs(a_pol) <= std::abs(a)) {
                sol.rho = polished;
                sol.residual = std::abs(a_pol);
            }
            else {
                sol.rho = rho;
                sol.residual = std::abs(a);
            }
            sol.iterations = it;
            sol.converged = true;
            return sol;
        }
        if (it == kNewtonMaxIter) break;
        double next = rho - a / b;
        if (!(next > lo && next < hi)) next = std::isfinite(hi) ? (lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi) : 2.0 * rho;
        rho = next;
    }
    throw Error(ErrorCode::NoConvergence, "rescaling Newton iteration exceeded " + std::to_string(kNewtonMaxIter)
                                              + " iterations");
}

} // namespace detail

/// alpha(rho, v) = chi_f(rho v', rho^-1 v'') - chi(v)
inline double rho_alpha(const ModelConfig& cfg, double rho, const FiberVector& v)
{
    const MetricPair g = metric_at(cfg, v.theta);
    return detail::alpha_reduced(rho, herm_norm2(g.prime, v.v_prime), herm_norm2(g.second, v.v_second),
                                 taylor_rest(cfg, v));
}

inline double rho_beta(const ModelConfig& cfg, double rho, const FiberVector& v)
{
    const MetricPair g = metric_at(cfg, v.theta);
    return detail::beta_reduced(rho, herm_norm2(g.prime, v.v_prime), herm_norm2(g.second, v.v_second));
}

/// Unique rho > 0 with chi_f(rho v', rho^-1 v'') = chi(v).
inline RhoSolution solve_rho(const ModelConfig& cfg, const FiberVector& v)
{
    const double rest = taylor_rest(cfg, v);
    const MetricPair g = metric_at(cfg, v.theta);
    return detail::newton_rho(herm_norm2(g.prime, v.v_prime), herm_norm2(g.second, v.v_second), rest,
                              is_exact_zero(v.v_prime), is_exact_zero(v.v_second));
}

inline void check_unit(const ModelConfig& cfg, const FiberVector& w)
{
    const double d = std::abs(fiber_norm2(cfg, w) - 1.0);
    if (d > kNewtonTol) throw Error(ErrorCode::InvalidArgument, "direction w is not a unit vector");
}

/// alpha-hat(rho, r, w) = alpha(rho, r w) / r^2, extended to r = 0.
inline double rho_alpha_hat(const ModelConfig& cfg, double rho, double r, const FiberVector& w)
{
    const MetricPair g = metric_at(cfg, w.theta);
    const double rest = r == 0.0 ? 0.0 : polynomial_scaled(cfg, cfg.perturbation, r, w, 2);
    return detail::alpha_reduced(rho, herm_norm2(g.prime, w.v_prime), herm_norm2(g.second, w.v_second), rest);
}

inline double rho_beta_hat(const ModelConfig& cfg, double rho, const FiberVector& w) { return rho_beta(cfg, rho, w); }

/// rho on the spherical blowup, solved through alpha-hat so the problem stays O(1) as r -> 0.
/// Boundary points (r = 0) have rho = 1 identically.
inline RhoSolution solve_rho_blowup(const ModelConfig& cfg, double r, const FiberVector& w)
{
    if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be >= 0");
    check_fiber_dims(cfg, w.v_prime, w.v_second);
    check_unit(cfg, w);
    if (r > cfg.domain_radius) throw Error(ErrorCode::OutOfDomain, "r w lies outside the domain");
    if (r == 0.0) return {1.0, 0.0, 0, true};
    const MetricPair g = metric_at(cfg, w.theta);
    const double rest = polynomial_scaled(cfg, cfg.perturbation, r, w, 2);
    return detail::newton_rho(herm_norm2(g.prime, w.v_prime), herm_norm2(g.second, w.v_second), rest,
                              is_exact_zero(w.v_prime), is_exact_zero(w.v_second));
}

// ---------------------------------------------------------------------------
// Renormalization tau(r w) / r^k

/// Invariant polynomial used as tau; uses the metrics of the configuration it is evaluated with.
struct PolynomialTau {
    PerturbationSpec poly;

    double operator()(const ModelConfig& cfg, const FiberVector& v) const { return polynomial_value(cfg, poly, v); }
};

inline constexpr double kRenormStep = 1e-2;

namespace detail {

/// k-th derivative at 0 from the 5-point central stencil, k in 1..4.
template <class G>
double central_derivative(const G& g, int k, double h)
{
    const double fm2 = g(-2.0 * h), fm1 = g(-h), f0 = g(0.0), fp1 = g(h), fp2 = g(2.0 * h);
    switch (k) {
    case 1: return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    case 2: return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    case 3: return (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h);
    case 4: return (fm2 - 4.0 * fm1 + 6.0 * f0 - 4.0 * fp1 + fp2) / (h * h * h * h);
    default: throw Error(ErrorCode::InvalidArgument, "finite-difference boundary values support k in 1..4");
    }
}

inline double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

inline FiberVector scaled(const FiberVector& w, double s) { return {w.theta, s * w.v_prime, s * w.v_second}; }

} // namespace detail

/// tau-hat(r, w) for an invariant polynomial: tau(r w)/r^k for r > 0, the degree-k part at w for r = 0.
inline double renorm_eval(const ModelConfig& cfg, const PolynomialTau& tau, int k, double r, const FiberVector& w)
{
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be >= 0");
    for (const auto& term : tau.poly.terms)
        if (term.degree() < k && eval_fourier(term.coeff, w.theta) != 0.0)
            throw Error(ErrorCode::BoundViolated, "tau has a term of degree " + std::to_string(term.degree())
                                                      + " < k = " + std::to_string(k));
    if (r > 0.0) return tau(cfg, detail::scaled(w, r)) / std::pow(r, k);
    double acc = 0.0;
    const MetricPair g = metric_at(cfg, w.theta);
    const InvariantValues inv = invariants(g, tau.poly, w);
    for (const auto& term : tau.poly.terms)
        if (term.degree() == k) acc += term_value(term, inv, w.theta);
    return acc;
}

/// tau-hat for an arbitrary field tau(v). The order-k vanishing bound is probed along w at
/// r = R 10^-j, j = 0..4; the boundary value is the 5-point central k-th derivative of
/// s -> tau(s w) at step k * 1e-2, divided by k!.
template <class Tau>
    requires std::invocable<const Tau&, const FiberVector&>
double renorm_eval(const ModelConfig& cfg, const Tau& tau, int k, double r, const FiberVector& w)
{
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be >= 0");
    const double R = cfg.domain_radius;
    const double q_far = std::abs(tau(detail::scaled(w, R))) / std::pow(R, k);
    const double near = R * 1e-4;
    const double q_near = std::abs(tau(detail::scaled(w, near))) / std::pow(near, k);
    if (q_near > 1e3 * q_far + 1e-3)
        throw Error(ErrorCode::BoundViolated, "tau(r w)/r^k grows as r -> 0");
    if (r > 0.0) return tau(detail::scaled(w, r)) / std::pow(r, k);
    auto g = [&](double s) { return static_cast<double>(tau(detail::scaled(w, s))); };
    return detail::central_derivative(g, k, kRenormStep * k) / detail::factorial(k);
}

// ---------------------------------------------------------------------------
// Matching map

struct MatchedPoint {
    FiberPoint point;  ///< (rho v', rho^-1 v'') at (theta, chi(v)), on Z(m^f)
    FiberPoint source; ///< graph point (v', v'', chi(v))
    RhoSolution rho;
};

inline MatchedPoint match_point(const ModelConfig& cfg, const FiberVector& v)
{
    const double t = chi_eval(cfg, v);
    const RhoSolution sol = solve_rho(cfg, v);
    const FiberPoint source = over(v, t);
    return {cstar_act(Complex(sol.rho, 0.0), source), source, sol};
}

/// Matching map from the graph of chi onto Z(m^f), along C*-orbits.
inline FiberPoint matching_map(const ModelConfig& cfg, const FiberVector& v) { return match_point(cfg, v).point; }

/// Extension of the matching map to the blowup; identity on the boundary r = 0.
inline BlowupPoint matching_map_blowup(const ModelConfig& cfg, double r, const FiberVector& w)
{
    const RhoSolution sol = solve_rho_blowup(cfg, r, w);
    if (r == 0.0) return {0.0, w.v_prime, w.v_second, {w.theta, 0.0}};
    const BlowupPoint bp{r, w.v_prime, w.v_second, {w.theta, chi_eval(cfg, detail::scaled(w, r))}};
    return cstar_act_blowup(cfg, Complex(sol.rho, 0.0), bp);
}

} // namespace flip
