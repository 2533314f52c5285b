#pragma once

// JSON encodings of reports and results. Non-finite numbers are written as
// the strings "inf", "-inf" and "nan" so that every document stays valid JSON
// and reads back to the same value.

#include <varmp/diagnostics.hpp>
#include <varmp/hypotheses.hpp>
#include <varmp/solver.hpp>
#include <varmp/spectrum.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace varmp {

using json = nlohmann::ordered_json;

inline json jnum(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

inline double jnum_read(const json& j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return infinity;
        if (s == "-inf") return -infinity;
        if (s == "nan") return std::nan("");
        throw ConfigError("bad number '" + s + "'");
    }
    return j.get<double>();
}

inline json jnums(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v)
        a.push_back(jnum(x));
    return a;
}

// --- hypotheses -------------------------------------------------------------

inline json to_json(const GrowthExponents& e)
{
    return {{"p1", jnum(e.p1)},       {"p2", jnum(e.p2)},       {"N", e.N},
            {"p1_star", jnum(e.p1_star)}, {"p2_star", jnum(e.p2_star)}, {"s3", jnum(e.s3)},
            {"s4", jnum(e.s4)},       {"s5", jnum(e.s5)},       {"s6", jnum(e.s6)},
            {"qbar1", jnum(e.qbar1)}, {"qbar2", jnum(e.qbar2)}, {"s3_lo", jnum(e.s3_lo)},
            {"s3_hi", jnum(e.s3_hi)}, {"s5_lo", jnum(e.s5_lo)}, {"s5_hi", jnum(e.s5_hi)}};
}

inline GrowthExponents exponents_from_json(const json& j)
{
    GrowthExponents e;
    e.p1 = jnum_read(j.at("p1"));
    e.p2 = jnum_read(j.at("p2"));
    e.N = j.at("N").get<int>();
    e.p1_star = jnum_read(j.at("p1_star"));
    e.p2_star = jnum_read(j.at("p2_star"));
    e.s3 = jnum_read(j.at("s3"));
    e.s4 = jnum_read(j.at("s4"));
    e.s5 = jnum_read(j.at("s5"));
    e.s6 = jnum_read(j.at("s6"));
    e.qbar1 = jnum_read(j.at("qbar1"));
    e.qbar2 = jnum_read(j.at("qbar2"));
    e.s3_lo = jnum_read(j.at("s3_lo"));
    e.s3_hi = jnum_read(j.at("s3_hi"));
    e.s5_lo = jnum_read(j.at("s5_lo"));
    e.s5_hi = jnum_read(j.at("s5_hi"));
    return e;
}

inline json to_json(const ThetaWindow& w) { return json::array({jnum(w.lo), jnum(w.hi)}); }

inline json to_json(const DerivedConstants& d)
{
    json j = {{"mu0", jnum(d.mu0)},       {"mu1", jnum(d.mu1)},       {"mu2", jnum(d.mu2)},
              {"gamma1", jnum(d.gamma1)}, {"gamma2", jnum(d.gamma2)}, {"a1", jnum(d.a1)},
              {"a2", jnum(d.a2)},         {"b1", jnum(d.b1)},         {"b2", jnum(d.b2)},
              {"sigma_hat", jnum(d.sigma_hat)}, {"sigma1_hat", jnum(d.sigma1_hat)},
              {"g3_limsup", jnum(d.g3_limsup)}};
    j["theta_window1"] = d.theta_window1 ? to_json(*d.theta_window1) : json(nullptr);
    j["theta_window2"] = d.theta_window2 ? to_json(*d.theta_window2) : json(nullptr);
    j["exponents"] = d.exponents ? to_json(*d.exponents) : json(nullptr);
    return j;
}

inline DerivedConstants derived_from_json(const json& j)
{
    DerivedConstants d;
    d.mu0 = jnum_read(j.at("mu0"));
    d.mu1 = jnum_read(j.at("mu1"));
    d.mu2 = jnum_read(j.at("mu2"));
    d.gamma1 = jnum_read(j.at("gamma1"));
    d.gamma2 = jnum_read(j.at("gamma2"));
    d.a1 = jnum_read(j.at("a1"));
    d.a2 = jnum_read(j.at("a2"));
    d.b1 = jnum_read(j.at("b1"));
    d.b2 = jnum_read(j.at("b2"));
    d.sigma_hat = jnum_read(j.at("sigma_hat"));
    d.sigma1_hat = jnum_read(j.at("sigma1_hat"));
    d.g3_limsup = jnum_read(j.at("g3_limsup"));
    auto window = [](const json& w) -> std::optional<ThetaWindow> {
        if (w.is_null())
            return std::nullopt;
        return ThetaWindow{jnum_read(w.at(0)), jnum_read(w.at(1))};
    };
    d.theta_window1 = window(j.at("theta_window1"));
    d.theta_window2 = window(j.at("theta_window2"));
    if (!j.at("exponents").is_null())
        d.exponents = exponents_from_json(j.at("exponents"));
    return d;
}

inline json to_json(const HypothesisReport& r)
{
    json verdicts = json::object();
    for (const auto& [k, v] : r.verdicts)
        verdicts[k] = to_string(v);
    json witnesses = json::object();
    for (const auto& [k, w] : r.witnesses)
        witnesses[k] = {{"note", w.note}, {"values", jnums(w.values)}};
    json failed = json::array();
    for (const auto& f : r.failed())
        failed.push_back(f);
    return {{"overall", r.overall() ? "pass" : "fail"},
            {"failed", failed},
            {"verdicts", verdicts},
            {"witnesses", witnesses},
            {"informational", json(std::vector<std::string>(r.informational.begin(), r.informational.end()))},
            {"derived", to_json(r.derived)}};
}

inline HypothesisReport report_from_json(const json& j)
{
    HypothesisReport r;
    for (const auto& [k, v] : j.at("verdicts").items())
        r.verdicts[k] = verdict_from_string(v.get<std::string>());
    for (const auto& [k, w] : j.at("witnesses").items()) {
        Witness wit;
        wit.note = w.at("note").get<std::string>();
        for (const auto& x : w.at("values"))
            wit.values.push_back(jnum_read(x));
        r.witnesses[k] = wit;
    }
    for (const auto& k : j.at("informational"))
        r.informational.insert(k.get<std::string>());
    r.derived = derived_from_json(j.at("derived"));
    return r;
}

inline json to_json(const ModelSpec& s)
{
    return {{"family", s.family},
            {"p1", jnum(s.p1)},
            {"p2", jnum(s.p2)},
            {"q1", jnum(s.q1)},
            {"q2", jnum(s.q2)},
            {"gamma1", jnum(s.gamma1)},
            {"gamma2", jnum(s.gamma2)},
            {"gamma3", jnum(s.gamma3)},
            {"gamma4", jnum(s.gamma4)},
            {"c_star", jnum(s.c_star)},
            {"theta1", s.theta1 ? jnum(*s.theta1) : json(nullptr)},
            {"theta2", s.theta2 ? jnum(*s.theta2) : json(nullptr)},
            {"R", jnum(s.R)},
            {"N", s.N},
            {"a1", jnum(s.a1)},
            {"a2", jnum(s.a2)},
            {"b1", jnum(s.b1)},
            {"b2", jnum(s.b2)},
            {"g_scale", jnum(s.g_scale)}};
}

// --- spectra, traces, solver ------------------------------------------------

inline json to_json(const SpectralResult& r, double p)
{
    return {{"p", jnum(p)}, {"lambda", jnum(r.lambda)}, {"residual", jnum(r.residual)}, {"iterations", r.iterations}};
}

inline json to_json(const TraceSummary& s)
{
    return {{"final_J", jnum(s.final_J)},
            {"final_cps", jnum(s.final_cps)},
            {"iters", s.iters},
            {"linf_max", jnum(s.linf_max)}};
}

inline json to_json(const SolveConfig& c)
{
    return {{"tol_cps", jnum(c.tol_cps)},
            {"max_iters", c.max_iters},
            {"path_points", c.path_points},
            {"path_sweeps", c.path_sweeps},
            {"switch_ratio", jnum(c.switch_ratio)},
            {"armijo_c", jnum(c.armijo_c)},
            {"armijo_shrink", jnum(c.armijo_shrink)},
            {"max_backtracks", c.max_backtracks},
            {"initial_step", jnum(c.initial_step)},
            {"seed", c.seed},
            {"dedupe_distance", jnum(c.dedupe_distance)},
            {"divergence_bound", jnum(c.divergence_bound)},
            {"v_mix", jnum(c.v_mix)}};
}

inline json to_json(const GeometryReport& g)
{
    json doubling = json::array();
    for (const auto& d : g.doubling)
        doubling.push_back({{"t", jnum(d.t)}, {"J", jnum(d.J)}, {"norm_W", jnum(d.normW)}});
    return {{"certified", g.certified()},
            {"lambda_bar", jnum(g.lambda_bar)},
            {"g3_estimate", jnum(g.g3_estimate)},
            {"g3_bound", jnum(g.g3_bound)},
            {"sigma_star", jnum(g.sigma_star)},
            {"qbar", json::array({jnum(g.qbar1), jnum(g.qbar2)})},
            {"tau", json::array({jnum(g.tau1), jnum(g.tau2)})},
            {"R0", jnum(g.R0)},
            {"R0_max", jnum(g.R0_max)},
            {"rho0", jnum(g.rho0)},
            {"margins", json::array({jnum(g.margin1), jnum(g.margin2)})},
            {"e_energy", jnum(g.e_energy)},
            {"e_norm_W", jnum(g.e_norm)},
            {"doubling", doubling},
            {"sphere_samples", g.sphere_samples},
            {"sphere_violations", g.sphere_violations},
            {"sphere_min_J", jnum(g.sphere_min_J)}};
}

inline json to_json(const SolveResult& r)
{
    return {{"classification", to_string(r.classification)},
            {"level", jnum(r.level)},
            {"cps_final", jnum(r.cps_final)},
            {"iterations", r.iterations},
            {"path_sweeps", r.path_sweeps},
            {"warnings", json(r.warnings)},
            {"trace", to_json(summarize(r.trace))}};
}

// --- files ------------------------------------------------------------------

/// Writes through a sibling temporary and renames it into place.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out)
            throw std::runtime_error("I/O error writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline void write_json_atomic(const std::filesystem::path& path, const json& j)
{
    write_text_atomic(path, j.dump(2) + "\n");
}

} // namespace varmp
