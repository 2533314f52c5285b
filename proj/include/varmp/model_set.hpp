#pragma once

// A parsed model file turned into evaluable models, plus the full hypothesis
// report for it.

#include <varmp/hypotheses.hpp>
#include <varmp/models.hpp>

#include <fstream>
#include <string>

namespace varmp {

struct ModelSet {
    ModelSpec spec;
    CoefficientModel A;
    CoefficientModel B;
    NonlinearityModel G;
    double p1 = 2.0;
    double p2 = 2.0;
};

/// theta windows of the declared families. A vanishing A2 removes gamma from
/// the upper end; the log family's lower end is 1/gamma3 (resp. 1/gamma4).
inline std::pair<ThetaWindow, ThetaWindow> theta_windows(const ModelSpec& s)
{
    const double g1 = s.a2 == 0.0 ? 0.0 : s.gamma1;
    const double g2 = s.b2 == 0.0 ? 0.0 : s.gamma2;
    ThetaWindow w1 = theta_window(s.p1, g1, s.q1);
    ThetaWindow w2 = theta_window(s.p2, g2, s.q2);
    if (s.family == "log") {
        w1.lo = 1.0 / s.gamma3;
        w2.lo = 1.0 / s.gamma4;
    }
    return {w1, w2};
}

inline std::pair<double, double> resolved_theta(const ModelSpec& s)
{
    const auto [w1, w2] = theta_windows(s);
    return {s.theta1.value_or(w1.midpoint()), s.theta2.value_or(w2.midpoint())};
}

/// Throws std::invalid_argument naming the violated family condition.
inline ModelSet build_models(const ModelSpec& s)
{
    ModelSet m;
    m.spec = s;
    m.p1 = s.p1;
    m.p2 = s.p2;
    m.A = power_coefficient(constant_function(s.a1), {s.a1, s.a1}, constant_function(s.a2), {s.a2, s.a2}, s.gamma1);
    m.B = power_coefficient(constant_function(s.b1), {s.b1, s.b1}, constant_function(s.b2), {s.b2, s.b2}, s.gamma2);
    const auto [t1, t2] = resolved_theta(s);
    if (s.family == "log")
        m.G = log_nonlinearity(s.q1, s.q2, s.gamma3, s.gamma4, t1, t2, s.R, s.g_scale);
    else
        m.G = power_nonlinearity(s.q1, s.q2, s.gamma3, s.gamma4, s.c_star, t1, t2, s.R, s.g_scale);
    return m;
}

inline ModelSpec load_model_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open model file '" + path + "'");
    return parse_model_spec(in);
}

/// Every structural, growth and parameter condition for a declared model.
inline HypothesisReport check_model(const ModelSpec& s, unsigned long long seed = 0)
{
    HypothesisReport rep = s.family == "log" ? check_log_family(family_params(s)) : check_power_family(family_params(s));
    const auto [w1, w2] = theta_windows(s);
    rep.derived.theta_window1 = w1;
    rep.derived.theta_window2 = w2;
    ModelSet m;
    try {
        m = build_models(s);
    } catch (const std::invalid_argument& e) {
        rep.set("models", Verdict::fail, {e.what(), {}});
        return rep;
    }
    const auto box = default_box(s.R, seed);
    HypothesisReport structure = check_structure(m.A, m.B, s.p1, s.p2, m.G.theta1, m.G.theta2, box, s.R);
    HypothesisReport growth = check_nonlinearity(m.G, s.p1, s.p2, s.N, box);
    const DerivedConstants keep = rep.derived;
    rep.merge(structure);
    rep.merge(growth);
    rep.derived = structure.derived;
    rep.derived.theta_window1 = keep.theta_window1;
    rep.derived.theta_window2 = keep.theta_window2;
    rep.derived.exponents = growth.derived.exponents;
    rep.derived.sigma_hat = growth.derived.sigma_hat;
    rep.derived.sigma1_hat = growth.derived.sigma1_hat;
    rep.derived.g3_limsup = growth.derived.g3_limsup;
    return rep;
}

} // namespace varmp
