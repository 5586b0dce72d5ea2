// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "flip/cli.hpp"
#include "test_support.hpp"

using namespace flip;
using namespace flip::test;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

FiberPoint random_stable(const ModelConfig& cfg, Sampler& s)
{
    for (;;) {
        const FiberVector v = s.ball_fiber(cfg, cfg.domain_radius);
        const FiberPoint p = over(v, s.uniform(-cfg.epsilon, cfg.epsilon));
        if (classify(cfg, p) == StabilityClass::Stable) return p;
    }
}

// 1. Level-set exactness
Outcome level_set_exactness()
{
    const auto family = config_family();
    Sampler s(1001);
    double worst = 0.0;
    int n = 0;
    for (const auto& cfg : family) {
        for (int i = 0; i < 1250; ++i, ++n) {
            const FiberPoint p = random_stable(cfg, s);
            const auto lvl = normalize_to_level(cfg, cstar_act(s.zeta(), p));
            worst = std::max(worst, std::abs(moment_value(cfg, lvl.p0)));
        }
    }
    return {worst <= 1e-12 && n == 10000, std::to_string(n) + " points, max |m^f| = " + fmt("%.3e", worst)};
}

double chart_distance(const ChartCoords& a, const ChartCoords& b)
{
    if (!(a.pivot == b.pivot)) return std::numeric_limits<double>::infinity();
    return std::max(max_abs_diff(a.affine, b.affine), max_abs_diff(a.line_fiber, b.line_fiber));
}

double tilde_distance(const TildeCoords& a, const TildeCoords& b)
{
    return std::max({max_abs_diff(a.class_prime, b.class_prime), max_abs_diff(a.class_second, b.class_second),
                     std::abs(a.lambda - b.lambda)});
}

// 2. Orbit invariance
Outcome orbit_invariance()
{
    const auto family = config_family();
    Sampler s(1002);
    double worst = 0.0;
    int separated = 0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        const ModelConfig& cfg = family[i % family.size()];
        const FiberPoint p = random_stable(cfg, s);
        const FiberPoint q = cstar_act(s.zeta(2.0), p);
        worst = std::max({worst, chart_distance(quotient_chart(cfg, p), quotient_chart(cfg, q)),
                          (segre_point(p) - segre_point(q)).cwiseAbs().maxCoeff(),
                          tilde_distance(tilde_coords(cfg, p), tilde_coords(cfg, q))});

        FiberPoint other = random_stable(cfg, s);
        other.base = p.base;
        const double sep = std::max({chart_distance(quotient_chart(cfg, p), quotient_chart(cfg, other)),
                                     (segre_point(p) - segre_point(other)).cwiseAbs().maxCoeff(),
                                     tilde_distance(tilde_coords(cfg, p), tilde_coords(cfg, other))});
        if (sep > 1e-6) ++separated;
    }
    const double frac = static_cast<double>(separated) / draws;
    return {worst <= 1e-11 && frac >= 0.999,
            "same-orbit max deviation " + fmt("%.3e", worst) + ", distinct orbits separated " + fmt("%.4f", frac)};
}

// 3. Blowup-action equivariance
Outcome blowup_equivariance()
{
    const auto family = config_family();
    Sampler s(1003);
    double square = 0.0, law = 0.0;
    bool boundary_kept = true;
    for (int i = 0; i < 1000; ++i) {
        const ModelConfig& cfg = family[i % family.size()];
        const FiberVector w = s.unit_fiber(cfg, s.theta());
        const BlowupPoint bp{s.uniform(0.01, 1.0), w.v_prime, w.v_second, {w.theta, 0.0}};
        const Complex z = s.zeta(), z2 = s.zeta();
        const BlowupPoint a = cstar_act_blowup(cfg, z, bp);
        const BlowupPoint b = to_blowup(cfg, cstar_act(z, from_blowup(bp)));
        square = std::max({square, std::abs(a.r - b.r) / std::max(1.0, a.r), max_abs_diff(a.w_prime, b.w_prime),
                           max_abs_diff(a.w_second, b.w_second)});

        const BlowupPoint edge{0.0, w.v_prime, w.v_second, {w.theta, 0.0}};
        boundary_kept = boundary_kept && cstar_act_blowup(cfg, z, edge).r == 0.0;
        for (const BlowupPoint& x : {bp, edge}) {
            const BlowupPoint l = cstar_act_blowup(cfg, z, cstar_act_blowup(cfg, z2, x));
            const BlowupPoint r = cstar_act_blowup(cfg, z * z2, x);
            law = std::max({law, std::abs(l.r - r.r) / std::max(1.0, r.r), max_abs_diff(l.w_prime, r.w_prime),
                            max_abs_diff(l.w_second, r.w_second)});
        }
    }
    return {square <= 1e-11 && law <= 1e-11 && boundary_kept,
            "square " + fmt("%.3e", square) + ", action law " + fmt("%.3e", law)
                + (boundary_kept ? ", r=0 preserved" : ", r=0 NOT preserved")};
}

// 4. P1-P3 verification
Outcome conditions_check()
{
    double worst_pass = 0.0;
    bool all_ok = true;
    for (int r1 = 1; r1 <= 3; ++r1) {
        ModelConfig base = presets::fourier_config(r1, 4 - r1, 500 + r1);
        const ConditionReport m = verify_conditions(base, PhiField(base, {}), 16, 1e-3, 1e-4);
        all_ok = all_ok && m.all_ok();
        worst_pass = std::max(worst_pass, m.worst_p3);
        for (const auto& [name, pert] : presets::builtin_perturbations(r1)) {
            ModelConfig cfg = base;
            cfg.perturbation = pert;
            const ConditionReport rep = verify_conditions(cfg, PhiField(cfg, {}), 16, 1e-3, 1e-4);
            all_ok = all_ok && rep.all_ok();
            worst_pass = std::max(worst_pass, rep.worst_p3);
        }
    }
    const ModelConfig cfg = presets::default_config();
    const ConditionReport bad = verify_conditions(cfg, PhiField(cfg, presets::wrong_sign_phi()), 16, 1e-3, 1e-4);
    return {all_ok && !bad.p3_ok && bad.worst_p3 >= 1.0,
            "max passing Hessian deviation " + fmt("%.3e", worst_pass) + ", wrong-sign deviation "
                + fmt("%.3f", bad.worst_p3)};
}

// 5. Rescaling at the boundary
Outcome rho_boundary()
{
    const auto family = config_family();
    Sampler s(1005);
    bool exact = true;
    for (int i = 0; i < 1000; ++i) {
        ModelConfig cfg = family[i % family.size()];
        cfg.perturbation.add(constant_term(0.1, 0, 0, 1));
        const RhoSolution sol = solve_rho_blowup(cfg, 0.0, s.unit_fiber(cfg, s.theta()));
        exact = exact && sol.rho == 1.0 && sol.residual == 0.0;
    }
    const ModelConfig q = presets::quartic_config(0.1);
    double min_factor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 32; ++i) {
        const cli::RayEntry ray = cli::blowup_ray(q, s.unit_fiber(q, s.theta()));
        for (const auto& d : ray.decay) min_factor = std::min(min_factor, d ? *d : std::numeric_limits<double>::infinity());
    }
    return {exact && min_factor >= 50.0,
            std::string(exact ? "rho(0,w) = 1 exactly" : "rho(0,w) != 1") + ", min decay per decade "
                + fmt("%.2f", min_factor)};
}

// 6. Newton vs closed form
Outcome newton_vs_closed_form()
{
    auto oracle = [](const ModelConfig& cfg, const FiberVector& v) {
        const MetricPair g = metric_raw(cfg, v.theta);
        const double a1 = naive_inner(g.prime, v.v_prime, v.v_prime).real();
        const double a2 = naive_inner(g.second, v.v_second, v.v_second).real();
        const double c = -0.5 * (a1 - a2) + 0.1 * a1 * a2; // quartic folded into c
        const double s = a1 > 0.0 ? (-c + std::sqrt(c * c + a1 * a2)) / a1 : a2 / (2.0 * c);
        return std::sqrt(s);
    };
    Sampler s(1006);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        ModelConfig cfg = presets::fourier_config(1 + i % 3, 1 + (i / 3) % 3, 600 + i % 9);
        cfg.perturbation.add(constant_term(0.1, 0, 0, 1));
        const FiberVector v = s.ball_fiber(cfg, cfg.domain_radius);
        worst = std::max(worst, std::abs(solve_rho(cfg, v).rho - oracle(cfg, v)));
    }
    auto raises_degenerate = [](const ModelConfig& cfg, const FiberVector& v) {
        try {
            solve_rho(cfg, v);
        }
        catch (const Error& e) {
            return e.code() == ErrorCode::DegenerateBranch;
        }
        return false;
    };
    ModelConfig neg = presets::default_config();
    neg.perturbation.add(constant_term(-1.0, 0, 2)); // chi(0, v'') < 0 for |v''| > 1/sqrt(2)
    ModelConfig pos = presets::default_config();
    pos.perturbation.add(constant_term(1.0, 2, 0)); // chi(v', 0) > 0 for |v'| > 1/sqrt(2)
    const bool branch1 = raises_degenerate(neg, fv(0, cvec({0.0}), cvec({0.95})));
    const bool branch2 = raises_degenerate(pos, fv(0, cvec({0.95}), cvec({0.0})));
    return {worst <= 1e-10 && branch1 && branch2, "max |rho_newton - rho_closed| = " + fmt("%.3e", worst)
                                                      + ", degenerate branches " + (branch1 && branch2 ? "raised" : "MISSED")};
}

// 7. Matching-map contract
Outcome matching_contract()
{
    Sampler s(1007);
    double moment = 0.0, segre = 0.0;
    int n = 0;
    for (int r1 = 1; r1 <= 2; ++r1) {
        for (const auto& [name, pert] : presets::builtin_perturbations(r1)) {
            ModelConfig cfg = presets::fourier_config(r1, 3 - r1, 700 + r1);
            cfg.perturbation = pert;
            for (int i = 0; i < 1000; ++i, ++n) {
                const MatchedPoint m = match_point(cfg, s.ball_fiber(cfg, cfg.domain_radius));
                moment = std::max(moment, std::abs(moment_value(cfg, m.point)));
                segre = std::max(segre, (segre_point(m.point) - segre_point(m.source)).norm());
            }
        }
    }
    bool fixed = true;
    const ModelConfig q = presets::quartic_config(0.1, 2, 2);
    for (int i = 0; i < 1000; ++i) {
        const FiberVector w = s.unit_fiber(q, s.theta());
        const BlowupPoint b = matching_map_blowup(q, 0.0, w);
        fixed = fixed && b.r == 0.0 && b.w_prime == w.v_prime && b.w_second == w.v_second;
    }
    return {moment <= 1e-12 && segre <= 1e-11 && fixed && n >= 10000,
            std::to_string(n) + " points, max |m^f| " + fmt("%.3e", moment) + ", Segre deviation " + fmt("%.3e", segre)
                + (fixed ? ", boundary fixed" : ", boundary MOVED")};
}

// 8. Renormalization consistency
Outcome renorm_consistency()
{
    const ModelConfig cfg = presets::default_config(2, 2);
    const double c = 0.3;
    PolynomialTau norm4;
    norm4.poly.add(constant_term(1.0, 2, 0)).add(constant_term(2.0, 0, 0, 1)).add(constant_term(1.0, 0, 2));
    PolynomialTau mixed;
    mixed.poly.add(constant_term(c, 0, 0, 1));

    // independent closed forms for the callables
    auto norm4_fn = [&](const FiberVector& v) {
        const double n = v.v_prime.squaredNorm() + v.v_second.squaredNorm();
        return n * n;
    };
    auto mixed_fn = [&](const FiberVector& v) { return c * v.v_prime.squaredNorm() * v.v_second.squaredNorm(); };

    Sampler s(1008);
    double boundary_gap = 0.0;
    double worst_spread = 0.0;
    for (int i = 0; i < 20; ++i) {
        const FiberVector w = s.unit_fiber(cfg, s.theta());
        const double a = w.v_prime.squaredNorm(), b = w.v_second.squaredNorm();
        for (int k : {3, 4}) {
            const double analytic_norm4 = k == 4 ? 1.0 : 0.0;
            const double analytic_mixed = k == 4 ? c * a * b : 0.0;
            const std::array<std::pair<const PolynomialTau*, double>, 2> cases{
                {{&norm4, analytic_norm4}, {&mixed, analytic_mixed}}};
            boundary_gap = std::max({boundary_gap, std::abs(renorm_eval(cfg, norm4_fn, k, 0.0, w) - analytic_norm4),
                                     std::abs(renorm_eval(cfg, mixed_fn, k, 0.0, w) - analytic_mixed),
                                     std::abs(renorm_eval(cfg, norm4, k, 0.0, w) - analytic_norm4),
                                     std::abs(renorm_eval(cfg, mixed, k, 0.0, w) - analytic_mixed)});
            for (const auto& [tau, hat0] : cases) {
                std::vector<double> Cs;
                for (double r : {1e-1, 1e-2, 1e-3}) Cs.push_back(std::abs(renorm_eval(cfg, *tau, k, r, w) - hat0) / r);
                const double hi = *std::max_element(Cs.begin(), Cs.end());
                const double lo = *std::min_element(Cs.begin(), Cs.end());
                const double spread = hi <= 1e-12 ? 0.0 : (hi - lo) / hi;
                worst_spread = std::max(worst_spread, spread);
            }
        }
    }
    return {boundary_gap <= 1e-8 && worst_spread <= 0.05, "boundary gap " + fmt("%.3e", boundary_gap)
                                                             + ", fitted C relative spread " + fmt("%.3e", worst_spread)};
}

// 9. Sign separation
Outcome sign_separation()
{
    Sampler s(1009);
    int configs = 0, counterexamples = 0;
    for (int r1 = 1; r1 <= 3; ++r1) {
        for (const auto& [name, pert] : presets::builtin_perturbations(r1)) {
            ModelConfig cfg = presets::fourier_config(r1, 1 + (r1 % 3), 900 + r1);
            cfg.perturbation = pert;
            if (!estimates_margin(cfg, rest_bound_scan(cfg, 2000, 3)).ok) continue;
            ++configs;
            for (int i = 0; i < 1000; ++i) {
                const FiberVector v = s.ball_fiber(cfg, cfg.domain_radius);
                if (!(chi_eval(cfg, {v.theta, v.v_prime, CVector::Zero(cfg.r_second)}) < 0.0)) ++counterexamples;
                if (!(chi_eval(cfg, {v.theta, CVector::Zero(cfg.r_prime), v.v_second}) > 0.0)) ++counterexamples;
            }
        }
    }
    return {configs > 0 && counterexamples == 0,
            std::to_string(configs) + " configs within margin, " + std::to_string(counterexamples) + " counterexamples"};
}

// 10. CLI determinism and exit codes
Outcome cli_contract()
{
    const std::string fx = FLIP_FIXTURES;
    auto run = [](std::vector<std::string> args, std::string* out = nullptr) {
        std::ostringstream o, e;
        const int code = cli::run(args, o, e);
        if (out) *out = o.str();
        return code;
    };
    bool identical = true;
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"--config", fx + "/fourier.json", "--seed", "3", "scan", "--samples", "6"},
          std::vector<std::string>{"--config", fx + "/quartic.json", "--seed", "3", "verify", "--samples", "300"},
          std::vector<std::string>{"--config", fx + "/quartic.json", "--seed", "3", "--threads", "4", "match",
                                   "--random", "50", "--blowup-rays", "8"}}) {
        std::string a, b;
        run(args, &a);
        run(args, &b);
        identical = identical && !a.empty() && a == b;
    }
    const int pass = run({"--config", fx + "/default.json", "verify"});
    const int fail = run({"--config", fx + "/wrong_sign.json", "verify"});
    const int parse = run({"--config", fx + "/malformed.json", "verify"});
    const int invalid = run({"--config", fx + "/invalid.json", "scan"});
    const bool codes = pass == 0 && fail == 1 && parse == 2 && invalid == 2;
    return {identical && codes, std::string(identical ? "byte-identical reruns" : "outputs DIFFER") + ", exit codes "
                                    + std::to_string(pass) + "/" + std::to_string(fail) + "/" + std::to_string(parse)
                                    + "/" + std::to_string(invalid)};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1 level-set exactness", level_set_exactness},
        {"AC2 orbit invariance", orbit_invariance},
        {"AC3 blowup-action equivariance", blowup_equivariance},
        {"AC4 P1-P3 verification", conditions_check},
        {"AC5 rescaling at the boundary", rho_boundary},
        {"AC6 Newton vs closed form", newton_vs_closed_form},
        {"AC7 matching-map contract", matching_contract},
        {"AC8 renormalization consistency", renorm_consistency},
        {"AC9 sign separation", sign_separation},
        {"AC10 CLI determinism and exit codes", cli_contract},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o{false, ""};
        try {
            o = fn();
        }
        catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
