#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "flip/config_json.hpp"

namespace flip::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr double kLevelTol = 1e-12;
inline constexpr double kMomentTol = 1e-12;
inline constexpr double kOrbitTol = 1e-11;
inline constexpr double kDecayFactor = 50.0;
inline const std::vector<double> kRayRadii = {1e-1, 1e-2, 1e-3, 1e-4};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be written by index.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < n; i = next++) fn(i);
                }
                catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
    int samples = 1000;
    double fd_step = 1e-3;
    double tol = 1e-4;
    int n_theta = 16;
};

struct VerifyResult {
    ConditionReport conditions;
    RestBoundReport rest;
    EstimatesMargin margin;
    [[nodiscard]] bool pass() const { return conditions.all_ok(); }
};

inline VerifyResult run_verify(const RunConfig& rc, const VerifyOptions& opt)
{
    VerifyResult res;
    res.conditions = verify_conditions(rc.model, PhiField(rc.model, rc.phi), opt.n_theta, opt.fd_step, opt.tol);
    res.rest = rest_bound_scan(rc.model, opt.samples, rc.seed);
    res.margin = estimates_margin(rc.model, res.rest);
    return res;
}

// ---------------------------------------------------------------------------
// scan

struct ScanOptions {
    int theta_steps = 8;
    int t_steps = 5;
    int samples = 16;
};

struct ScanRow {
    double theta = 0.0;
    double t = 0.0;
    FiberType fiber_type = FiberType::QZero;
    int n_stable_samples = 0;
    double mean_level_residual = 0.0;
};

/// t_j = epsilon (2j - (m-1)) / (m+1): symmetric, strictly inside (-epsilon, epsilon), contains 0 for odd m.
inline std::vector<double> t_grid(double epsilon, int m)
{
    std::vector<double> out;
    for (int j = 0; j < m; ++j) out.push_back(epsilon * (2.0 * j - (m - 1)) / (m + 1));
    return out;
}

inline std::vector<ScanRow> run_scan(const RunConfig& rc, const ScanOptions& opt, int threads)
{
    if (opt.theta_steps < 1 || opt.t_steps < 1 || opt.samples < 0)
        throw Error(ErrorCode::InvalidArgument, "scan grid sizes must be positive");
    const ModelConfig& cfg = rc.model;
    const std::vector<double> ts = t_grid(cfg.epsilon, opt.t_steps);
    std::vector<ScanRow> rows(static_cast<std::size_t>(opt.theta_steps) * ts.size());
    parallel_for(rows.size(), threads, [&](std::size_t idx) {
        const std::size_t i = idx / ts.size();
        const std::size_t j = idx % ts.size();
        ScanRow row;
        row.theta = 2.0 * kPi * static_cast<double>(i) / opt.theta_steps;
        row.t = ts[j];
        row.fiber_type = fiber_type({row.theta, row.t});
        Sampler sampler(rc.seed, 0x5ca0000 + idx);
        double sum = 0.0;
        for (int attempt = 0; row.n_stable_samples < opt.samples && attempt < 100 * opt.samples; ++attempt) {
            FiberVector v = sampler.unit_fiber(cfg, row.theta);
            const double r = cfg.domain_radius * sampler.uniform(0.0, 1.0);
            const FiberPoint p{{row.theta, row.t}, r * v.v_prime, r * v.v_second};
            if (classify(cfg, p) != StabilityClass::Stable) continue;
            sum += std::abs(moment_value(cfg, normalize_to_level(cfg, p).p0));
            ++row.n_stable_samples;
        }
        row.mean_level_residual = row.n_stable_samples > 0 ? sum / row.n_stable_samples : 0.0;
        rows[idx] = row;
    });
    return rows;
}

inline std::string scan_csv(const std::vector<ScanRow>& rows)
{
    std::string out = "theta,t,fiber_type,n_stable_samples,mean_level_residual\n";
    for (const auto& r : rows) {
        out += format_double(r.theta) + "," + format_double(r.t) + "," + std::string(to_string(r.fiber_type)) + ","
               + std::to_string(r.n_stable_samples) + "," + format_double(r.mean_level_residual) + "\n";
    }
    return out;
}

inline json to_json(const ScanRow& r)
{
    return {{"theta", r.theta},
            {"t", r.t},
            {"fiber_type", std::string(to_string(r.fiber_type))},
            {"n_stable_samples", r.n_stable_samples},
            {"mean_level_residual", r.mean_level_residual}};
}

inline bool scan_pass(const std::vector<ScanRow>& rows)
{
    return std::all_of(rows.begin(), rows.end(), [](const ScanRow& r) { return r.mean_level_residual <= kLevelTol; });
}

// ---------------------------------------------------------------------------
// match

struct MatchEntry {
    FiberVector input;
    std::optional<MatchedPoint> matched;
    std::string error;
    double moment_residual = 0.0;
    double orbit_deviation = 0.0;
};

struct RayEntry {
    FiberVector direction;
    std::vector<double> deviation;         ///< |rho(r w) - 1| per radius
    std::vector<std::optional<double>> decay; ///< successive ratios; empty optional when undefined (0/0)
    std::optional<double> slope;           ///< least-squares slope of log|rho - 1| vs log r
    bool pass = true;
};

struct MatchResult {
    std::vector<MatchEntry> points;
    std::vector<RayEntry> rays;
    double max_moment_residual = 0.0;
    double max_orbit_deviation = 0.0;
    std::optional<double> rho_boundary_slope; ///< minimum over rays
    [[nodiscard]] bool pass() const
    {
        return max_moment_residual <= kMomentTol && max_orbit_deviation <= kOrbitTol
               && std::all_of(rays.begin(), rays.end(), [](const RayEntry& r) { return r.pass; });
    }
};

inline MatchEntry match_one(const ModelConfig& cfg, const FiberVector& v)
{
    MatchEntry e;
    e.input = v;
    try {
        MatchedPoint m = match_point(cfg, v);
        e.moment_residual = std::abs(moment_value(cfg, m.point));
        e.orbit_deviation = (segre_point(m.point) - segre_point(m.source)).norm();
        e.matched = std::move(m);
    }
    catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateBranch && err.code() != ErrorCode::NoConvergence
            && err.code() != ErrorCode::OutOfDomain && err.code() != ErrorCode::DimensionMismatch)
            throw;
        e.error = err.what();
    }
    return e;
}

inline RayEntry blowup_ray(const ModelConfig& cfg, const FiberVector& w)
{
    RayEntry ray;
    ray.direction = w;
    for (double r : kRayRadii) ray.deviation.push_back(std::abs(solve_rho_blowup(cfg, r, w).rho - 1.0));
    bool all_positive = true;
    for (std::size_t j = 0; j + 1 < ray.deviation.size(); ++j) {
        const double a = ray.deviation[j];
        const double b = ray.deviation[j + 1];
        if (b == 0.0) {
            ray.decay.emplace_back();
        }
        else {
            ray.decay.emplace_back(a / b);
            if (a / b < kDecayFactor) ray.pass = false;
        }
    }
    for (double d : ray.deviation) all_positive = all_positive && d > 0.0;
    if (all_positive) {
        const auto n = static_cast<double>(kRayRadii.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t j = 0; j < kRayRadii.size(); ++j) {
            const double x = std::log(kRayRadii[j]);
            const double y = std::log(ray.deviation[j]);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        ray.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return ray;
}

inline MatchResult run_match(const RunConfig& rc, const std::vector<FiberVector>& explicit_points, int random_points,
                             int rays, int threads)
{
    const ModelConfig& cfg = rc.model;
    MatchResult res;
    std::vector<FiberVector> inputs = explicit_points;
    for (int i = 0; i < random_points; ++i) {
        Sampler s(rc.seed, 0x3a7c0000 + static_cast<std::uint64_t>(i));
        inputs.push_back(s.ball_fiber(cfg, cfg.domain_radius));
    }
    res.points.resize(inputs.size());
    parallel_for(inputs.size(), threads, [&](std::size_t i) { res.points[i] = match_one(cfg, inputs[i]); });

    res.rays.resize(static_cast<std::size_t>(std::max(rays, 0)));
    parallel_for(res.rays.size(), threads, [&](std::size_t i) {
        Sampler s(rc.seed, 0xb10b0000 + i);
        res.rays[i] = blowup_ray(cfg, s.unit_fiber(cfg, s.theta()));
    });

    for (const auto& p : res.points) {
        res.max_moment_residual = std::max(res.max_moment_residual, p.moment_residual);
        res.max_orbit_deviation = std::max(res.max_orbit_deviation, p.orbit_deviation);
    }
    for (const auto& r : res.rays)
        if (r.slope) res.rho_boundary_slope = res.rho_boundary_slope ? std::min(*res.rho_boundary_slope, *r.slope) : *r.slope;
    return res;
}

namespace detail {

inline json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

} // namespace detail

inline json to_json(const MatchEntry& e)
{
    json j = {{"input", flip::to_json(e.input)}};
    if (!e.matched) {
        j["error"] = e.error;
        return j;
    }
    const MatchedPoint& m = *e.matched;
    j["rho"] = flip::to_json(m.rho);
    j["matched"] = flip::to_json(m.point);
    j["moment_residual"] = e.moment_residual;
    j["orbit_deviation"] = e.orbit_deviation;
    return j;
}

inline json to_json(const RayEntry& r)
{
    json decay = json::array();
    for (const auto& d : r.decay) decay.push_back(detail::optional_number(d));
    return {{"direction", flip::to_json(r.direction)},
            {"radii", kRayRadii},
            {"deviation", r.deviation},
            {"decay", decay},
            {"slope", detail::optional_number(r.slope)},
            {"pass", r.pass}};
}

inline json matching_stats_json(const MatchResult& m)
{
    return {{"max_moment_residual", m.max_moment_residual},
            {"max_orbit_deviation", m.max_orbit_deviation},
            {"rho_boundary_slope", detail::optional_number(m.rho_boundary_slope)}};
}

inline json match_json(const RunConfig& rc, const MatchResult& m)
{
    const ModelConfig& cfg = rc.model;
    json pts = json::array();
    for (const auto& p : m.points) {
        json j = to_json(p);
        if (p.matched) {
            const FiberPoint& q = p.matched->point;
            if (classify(cfg, q) == StabilityClass::Stable) j["chart"] = flip::to_json(quotient_chart(cfg, q));
            if (!is_exact_zero(q.y_prime) && !is_exact_zero(q.y_second))
                j["tilde"] = flip::to_json(tilde_coords(cfg, q));
        }
        pts.push_back(j);
    }
    json rays = json::array();
    for (const auto& r : m.rays) rays.push_back(to_json(r));
    return {{"points", pts}, {"blowup_rays", rays}, {"matching_stats", matching_stats_json(m)}, {"pass", m.pass()}};
}

// ---------------------------------------------------------------------------
// Entry point

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

namespace detail {

inline void emit(const GlobalOptions& g, const std::string& text, std::ostream& out)
{
    if (g.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(g.out_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + g.out_path);
    f << text;
}

inline RunConfig load_validated(const GlobalOptions& g)
{
    if (g.config_path.empty()) throw Error(ErrorCode::ConfigParse, "--config is required");
    RunConfig rc = load_run_config(g.config_path);
    if (g.seed) rc.seed = *g.seed;
    const ValidationReport rep = validate_config(rc.model);
    if (!rep.ok()) {
        std::string msg;
        for (const auto& v : rep.violations) msg += std::string(to_string(v.kind)) + " (" + v.detail + "); ";
        throw Error(ErrorCode::ConfigInvalid, msg);
    }
    return rc;
}

inline json header_json(const std::string& command, const RunConfig& rc)
{
    return {{"command", command}, {"config_digest", config_digest(rc)}, {"seed", rc.seed}};
}

} // namespace detail

/// Parses args (without the program name) and runs one subcommand. Returns 0 (pass),
/// 1 (a check failed) or 2 (usage or configuration error).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Flip passage model: verification, scans and matching"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::uint64_t seed_value = 0;
    app.add_option("--config", g.config_path, "model configuration (JSON)");
    app.add_option("--out", g.out_path, "write the JSON report here instead of stdout");
    auto* seed_opt = app.add_option("--seed", seed_value, "override the configuration seed");
    app.add_option("--threads", g.threads, "worker threads for sweeps")->check(CLI::Range(1, 64));

    VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "finite-difference check of P1-P3 and the rest bound");
    verify->add_option("--samples", vopt.samples, "rest-bound samples")->check(CLI::NonNegativeNumber);
    verify->add_option("--fd-step", vopt.fd_step, "finite-difference step");
    verify->add_option("--tol", vopt.tol, "tolerance for P1-P3 deviations");
    verify->add_option("--n-theta", vopt.n_theta, "angles on T")->check(CLI::PositiveNumber);

    ScanOptions sopt;
    std::string csv_path;
    auto* scan = app.add_subcommand("scan", "fiber types and level normalization over a (theta, t) grid");
    scan->add_option("--theta-steps", sopt.theta_steps)->check(CLI::PositiveNumber);
    scan->add_option("--t-steps", sopt.t_steps)->check(CLI::PositiveNumber);
    scan->add_option("--samples", sopt.samples)->check(CLI::NonNegativeNumber);
    scan->add_option("--csv", csv_path, "write the scan table as CSV");

    std::vector<std::string> point_args;
    int random_points = 0;
    int rays = 0;
    auto* match = app.add_subcommand("match", "matching map onto Z(m^f) and boundary behaviour of rho");
    match->add_option("--point", point_args, "fiber vector as JSON {theta, prime, second}");
    match->add_option("--random", random_points, "number of random points")->check(CLI::NonNegativeNumber);
    match->add_option("--blowup-rays", rays, "random boundary directions")->check(CLI::NonNegativeNumber);

    int report_samples = 256;
    auto* report = app.add_subcommand("report", "full run: verify, scan and match");
    report->add_option("--samples", report_samples)->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    if (*seed_opt) g.seed = seed_value;

    try {
        const RunConfig rc = detail::load_validated(g);
        if (verify->parsed()) {
            const VerifyResult r = run_verify(rc, vopt);
            json j = detail::header_json("verify", rc);
            j["condition_report"] = flip::to_json(r.conditions);
            j["rest_bound"] = flip::to_json(r.rest);
            j["estimates_margin"] = flip::to_json(r.margin);
            j["pass"] = r.pass();
            detail::emit(g, j.dump(2) + "\n", out);
            return r.pass() ? kExitPass : kExitCheckFailed;
        }
        if (scan->parsed()) {
            const auto rows = run_scan(rc, sopt, g.threads);
            if (!csv_path.empty()) {
                std::ofstream f(csv_path, std::ios::binary);
                if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + csv_path);
                f << scan_csv(rows);
            }
            json j = detail::header_json("scan", rc);
            json jr = json::array();
            for (const auto& r : rows) jr.push_back(to_json(r));
            j["scan"] = jr;
            j["pass"] = scan_pass(rows);
            detail::emit(g, j.dump(2) + "\n", out);
            return scan_pass(rows) ? kExitPass : kExitCheckFailed;
        }
        if (match->parsed()) {
            std::vector<FiberVector> pts;
            for (const auto& s : point_args) {
                json pj;
                try {
                    pj = json::parse(s);
                }
                catch (const json::parse_error& e) {
                    throw Error(ErrorCode::InvalidArgument, std::string("--point: ") + e.what());
                }
                pts.push_back(fiber_vector_from_json(pj));
            }
            const MatchResult m = run_match(rc, pts, random_points, rays, g.threads);
            json j = detail::header_json("match", rc);
            j.update(match_json(rc, m));
            detail::emit(g, j.dump(2) + "\n", out);
            return m.pass() ? kExitPass : kExitCheckFailed;
        }
        if (report->parsed()) {
            VerifyOptions vo;
            vo.samples = report_samples;
            const VerifyResult v = run_verify(rc, vo);
            const auto rows = run_scan(rc, ScanOptions{}, g.threads);
            const MatchResult m = run_match(rc, {}, report_samples, 8, g.threads);
            const bool pass = v.pass() && scan_pass(rows) && m.pass();
            json j = detail::header_json("report", rc);
            j["condition_report"] = flip::to_json(v.conditions);
            j["rest_bound"] = flip::to_json(v.rest);
            j["estimates_margin"] = flip::to_json(v.margin);
            json jr = json::array();
            for (const auto& r : rows) jr.push_back(to_json(r));
            j["scan"] = jr;
            j["matching_stats"] = matching_stats_json(m);
            j["pass"] = pass;
            detail::emit(g, j.dump(2) + "\n", out);
            return pass ? kExitPass : kExitCheckFailed;
        }
    }
    catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

} // namespace flip::cli
