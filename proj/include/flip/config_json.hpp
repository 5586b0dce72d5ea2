#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "flip/hermitian_core.hpp"
#include "flip/moment_quotient.hpp"
#include "flip/perturbation_matching.hpp"
#include "flip/spherical_blowup.hpp"

namespace flip {

using json = nlohmann::json;

/// Everything a CLI run consumes: the model, the defining function used by `verify`, and the seed.
struct RunConfig {
    ModelConfig model;
    PhiSpec phi;
    std::uint64_t seed = 0;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what)
{
    throw Error(ErrorCode::ConfigParse, where + ": " + what);
}

inline Complex complex_from_json(const json& j, const std::string& where)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    parse_fail(where, "expected a number or [re, im]");
}

inline CVector vector_from_json(const json& j, const std::string& where)
{
    if (!j.is_array()) parse_fail(where, "expected an array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

inline CMatrix matrix_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty array of rows");
    const auto rows = j.size();
    const auto cols = j[0].is_array() ? j[0].size() : 0;
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) parse_fail(where, "rows must be arrays of equal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = complex_from_json(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

inline std::vector<FourierMode> modes_from_json(const json& j, const std::string& where)
{
    if (!j.is_array()) parse_fail(where, "expected an array of {k, cos, sin}");
    std::vector<FourierMode> out;
    for (const auto& m : j) {
        if (!m.is_object()) parse_fail(where, "expected {k, cos, sin}");
        out.push_back({m.value("k", 0), m.value("cos", 0.0), m.value("sin", 0.0)});
    }
    return out;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const CMatrix& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

template <class T>
T required(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key)) parse_fail(where, std::string("missing key '") + key + "'");
    try {
        return obj.at(key).get<T>();
    }
    catch (const json::exception& e) {
        parse_fail(where + "." + key, e.what());
    }
}

} // namespace detail

inline json vector_to_json(const CVector& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(detail::complex_to_json(v[i]));
    return a;
}

inline RunConfig run_config_from_json(const json& doc)
{
    using namespace detail;
    if (!doc.is_object()) parse_fail("config", "top level must be an object");
    RunConfig rc;
    ModelConfig& cfg = rc.model;
    try {
        if (doc.contains("ranks")) {
            const json& r = doc.at("ranks");
            cfg.r_prime = required<int>(r, "r_prime", "ranks");
            cfg.r_second = required<int>(r, "r_second", "ranks");
        }
        cfg.epsilon = doc.value("epsilon", cfg.epsilon);
        cfg.domain_radius = doc.value("domain_radius", cfg.domain_radius);
        rc.seed = doc.value("seed", std::uint64_t{0});

        const int rp = std::max(cfg.r_prime, 0);
        const int rs = std::max(cfg.r_second, 0);
        cfg.metric_field = MetricFieldSpec::identity(rp, rs);
        if (doc.contains("metrics")) {
            const json& m = doc.at("metrics");
            const std::string kind = m.value("kind", std::string("constant"));
            if (kind == "constant") {
                CMatrix gp = m.contains("g_prime") ? matrix_from_json(m.at("g_prime"), "metrics.g_prime")
                                                   : CMatrix(CMatrix::Identity(rp, rp));
                CMatrix gs = m.contains("g_second") ? matrix_from_json(m.at("g_second"), "metrics.g_second")
                                                    : CMatrix(CMatrix::Identity(rs, rs));
                cfg.metric_field = MetricFieldSpec::constant(std::move(gp), std::move(gs));
            }
            else if (kind == "fourier") {
                std::vector<MatrixFourierMode> prime, second;
                if (!m.contains("fourier") || !m.at("fourier").is_array())
                    parse_fail("metrics", "fourier metrics need a 'fourier' array");
                for (const auto& mode : m.at("fourier")) {
                    const std::string block = required<std::string>(mode, "block", "metrics.fourier");
                    MatrixFourierMode fm;
                    fm.k = mode.value("k", 0);
                    if (mode.contains("cos")) fm.cos = matrix_from_json(mode.at("cos"), "metrics.fourier.cos");
                    if (mode.contains("sin")) fm.sin = matrix_from_json(mode.at("sin"), "metrics.fourier.sin");
                    if (block == "prime")
                        prime.push_back(std::move(fm));
                    else if (block == "second")
                        second.push_back(std::move(fm));
                    else
                        parse_fail("metrics.fourier.block", "expected 'prime' or 'second'");
                }
                cfg.metric_field = MetricFieldSpec::fourier(std::move(prime), std::move(second));
            }
            else {
                parse_fail("metrics.kind", "expected 'constant' or 'fourier'");
            }
        }

        if (doc.contains("perturbation")) {
            const json& p = doc.at("perturbation");
            if (p.contains("reference_sections"))
                for (const auto& a : p.at("reference_sections"))
                    cfg.perturbation.reference_sections.push_back(vector_from_json(a, "perturbation.reference_sections"));
            if (p.contains("terms")) {
                for (const auto& t : p.at("terms")) {
                    PerturbationTerm term;
                    const json gens = t.value("generators", json::object());
                    term.norm_prime = gens.value("norm_prime", 0);
                    term.norm_second = gens.value("norm_second", 0);
                    term.mixed = gens.value("mixed", 0);
                    term.reference = gens.value("reference", std::vector<int>{});
                    if (t.contains("coeff_fourier"))
                        term.coeff = modes_from_json(t.at("coeff_fourier"), "perturbation.terms.coeff_fourier");
                    else if (t.contains("coeff"))
                        term.coeff = {FourierMode{0, t.at("coeff").get<double>(), 0.0}};
                    else
                        parse_fail("perturbation.terms", "term needs 'coeff' or 'coeff_fourier'");
                    cfg.perturbation.terms.push_back(std::move(term));
                }
            }
        }

        if (doc.contains("phi")) {
            const json& f = doc.at("phi");
            rc.phi.t_linear = f.value("t_linear", rc.phi.t_linear);
            rc.phi.t_cubic = f.value("t_cubic", rc.phi.t_cubic);
            rc.phi.quad_prime = f.value("quad_prime", rc.phi.quad_prime);
            rc.phi.quad_second = f.value("quad_second", rc.phi.quad_second);
            rc.phi.perturbation_weight = f.value("perturbation_weight", rc.phi.perturbation_weight);
        }
    }
    catch (const json::exception& e) {
        parse_fail("config", e.what());
    }
    return rc;
}

inline RunConfig parse_run_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigParse, e.what());
    }
    return run_config_from_json(doc);
}

inline RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParse, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

/// Canonical document for a run configuration (keys sorted, complex entries as [re, im]).
inline json run_config_to_json(const RunConfig& rc)
{
    const ModelConfig& cfg = rc.model;
    json doc;
    doc["ranks"] = {{"r_prime", cfg.r_prime}, {"r_second", cfg.r_second}};
    doc["epsilon"] = cfg.epsilon;
    doc["domain_radius"] = cfg.domain_radius;
    doc["seed"] = rc.seed;
    const auto& mf = cfg.metric_field;
    if (mf.kind == MetricKind::Constant) {
        doc["metrics"] = {{"kind", "constant"},
                          {"g_prime", detail::matrix_to_json(mf.constant_prime)},
                          {"g_second", detail::matrix_to_json(mf.constant_second)}};
    }
    else {
        json modes = json::array();
        auto emit = [&](const std::vector<MatrixFourierMode>& ms, const char* block) {
            for (const auto& m : ms) {
                json e = {{"block", block}, {"k", m.k}};
                if (m.cos.size() > 0) e["cos"] = detail::matrix_to_json(m.cos);
                if (m.sin.size() > 0) e["sin"] = detail::matrix_to_json(m.sin);
                modes.push_back(e);
            }
        };
        emit(mf.fourier_prime, "prime");
        emit(mf.fourier_second, "second");
        doc["metrics"] = {{"kind", "fourier"}, {"fourier", modes}};
    }
    json sections = json::array();
    for (const auto& a : cfg.perturbation.reference_sections) sections.push_back(vector_to_json(a));
    json terms = json::array();
    for (const auto& t : cfg.perturbation.terms) {
        json coeff = json::array();
        for (const auto& m : t.coeff) coeff.push_back({{"k", m.k}, {"cos", m.cos}, {"sin", m.sin}});
        terms.push_back({{"generators",
                          {{"norm_prime", t.norm_prime},
                           {"norm_second", t.norm_second},
                           {"mixed", t.mixed},
                           {"reference", t.reference}}},
                         {"coeff_fourier", coeff}});
    }
    doc["perturbation"] = {{"reference_sections", sections}, {"terms", terms}};
    doc["phi"] = {{"t_linear", rc.phi.t_linear},
                  {"t_cubic", rc.phi.t_cubic},
                  {"quad_prime", rc.phi.quad_prime},
                  {"quad_second", rc.phi.quad_second},
                  {"perturbation_weight", rc.phi.perturbation_weight}};
    return doc;
}

/// 64-bit FNV-1a of the canonical config document, as 16 hex digits.
inline std::string config_digest(const RunConfig& rc)
{
    const std::string text = run_config_to_json(rc).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Report serialization

inline json to_json(const BasePoint& b) { return {{"theta", b.theta}, {"t", b.t}}; }

inline json to_json(const FiberPoint& p)
{
    return {{"base", to_json(p.base)}, {"y_prime", vector_to_json(p.y_prime)}, {"y_second", vector_to_json(p.y_second)}};
}

inline json to_json(const FiberVector& v)
{
    return {{"theta", v.theta}, {"prime", vector_to_json(v.v_prime)}, {"second", vector_to_json(v.v_second)}};
}

inline json to_json(const ChartCoords& c)
{
    return {{"pivot", {{"block", std::string(to_string(c.pivot.block))}, {"index", c.pivot.index}}},
            {"affine", vector_to_json(c.affine)},
            {"line_fiber", vector_to_json(c.line_fiber)},
            {"base", to_json(c.base)}};
}

inline json to_json(const TildeCoords& c)
{
    return {{"class_prime", vector_to_json(c.class_prime)},
            {"class_second", vector_to_json(c.class_second)},
            {"lambda", detail::complex_to_json(c.lambda)},
            {"base", to_json(c.base)}};
}

inline json to_json(const RhoSolution& s)
{
    return {{"rho", s.rho}, {"residual", s.residual}, {"iterations", s.iterations}, {"converged", s.converged}};
}

inline json to_json(const ConditionReport& r)
{
    return {{"p1_ok", r.p1_ok},       {"p2_ok", r.p2_ok},       {"p3_ok", r.p3_ok},       {"worst_p1", r.worst_p1},
            {"worst_p2", r.worst_p2}, {"worst_p3", r.worst_p3}, {"samples", r.samples}};
}

inline json to_json(const RestBoundReport& r)
{
    return {{"empirical_M", r.empirical_M}, {"max_ratio_point", to_json(r.max_ratio_point)}, {"samples", r.samples}};
}

inline json to_json(const EstimatesMargin& m) { return {{"bound", m.bound}, {"limit", m.limit}, {"ok", m.ok}}; }

/// Fiber vector from {"theta": x, "prime": [...], "second": [...]}.
inline FiberVector fiber_vector_from_json(const json& j)
{
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "point must be an object {theta, prime, second}");
    try {
        return {j.value("theta", 0.0), detail::vector_from_json(j.at("prime"), "point.prime"),
                detail::vector_from_json(j.at("second"), "point.second")};
    }
    catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("point: ") + e.what());
    }
    catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, e.what());
    }
}

} // namespace flip
