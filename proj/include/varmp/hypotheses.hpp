#pragma once

// Structural hypotheses on A, B, G: decided in closed form for the built-in
// families and by deterministic sampling for anything else. Sampled
// certificates are labeled sampled-pass, never pass.

#include <varmp/errors.hpp>
#include <varmp/models.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace varmp {

enum class Verdict { pass, fail, sampled_pass };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::sampled_pass: return "sampled-pass";
    }
    return "?";
}

inline Verdict verdict_from_string(const std::string& s)
{
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "sampled-pass") return Verdict::sampled_pass;
    throw ConfigError("unknown verdict '" + s + "'");
}

/// Counterexample point or derived constant backing a verdict.
struct Witness {
    std::string note;
    std::vector<double> values;

    bool operator==(const Witness&) const = default;
};

/// Half-open interval [lo, hi).
struct ThetaWindow {
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const { return !(lo < hi); }
    bool contains(double t) const { return t >= lo && t < hi; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool operator==(const ThetaWindow&) const = default;
};

struct DerivedConstants {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double gamma1 = 0.0; ///< max{p1(1-mu1), (1/theta1)(1 - p1 theta1 - mu2)}
    double gamma2 = 0.0;
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0; ///< growth bounds A <= a1 + a2|u|^(...)
    std::optional<ThetaWindow> theta_window1, theta_window2;
    std::optional<GrowthExponents> exponents;
    double sigma_hat = 0.0;  ///< sampled growth constant of (g1)
    double sigma1_hat = 0.0; ///< sampled constant of the G-bound
    double g3_limsup = 0.0;

    bool operator==(const DerivedConstants&) const = default;
};

struct HypothesisReport {
    std::map<std::string, Verdict> verdicts;
    std::map<std::string, Witness> witnesses;
    std::set<std::string> informational; ///< reported, but not part of overall()
    DerivedConstants derived;

    void set(const std::string& name, Verdict v, Witness w = {})
    {
        if (v == Verdict::fail && w.note.empty())
            w.note = "condition violated";
        verdicts[name] = v;
        if (!w.note.empty() || !w.values.empty())
            witnesses[name] = std::move(w);
        else
            witnesses.erase(name);
    }

    bool passes(const std::string& name) const
    {
        auto it = verdicts.find(name);
        return it != verdicts.end() && it->second != Verdict::fail;
    }

    bool overall() const { return !verdicts.empty() && failed().empty(); }

    std::vector<std::string> failed() const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : verdicts)
            if (v == Verdict::fail && !informational.count(k))
                out.push_back(k);
        return out;
    }

    void merge(const HypothesisReport& other)
    {
        for (const auto& [k, v] : other.verdicts)
            verdicts[k] = v;
        for (const auto& [k, w] : other.witnesses)
            witnesses[k] = w;
        informational.insert(other.informational.begin(), other.informational.end());
    }

    bool operator==(const HypothesisReport&) const = default;
};

/// Region sampled by the numerical checks: x-points and an amplitude box.
struct SamplingBox {
    std::vector<Point> xs{Point{0.5, 0.5}};
    double half_width = 10.0;
    int n_samples = 2000;
    unsigned long long seed = 0;
};

inline SamplingBox default_box(double R, unsigned long long seed = 0)
{
    SamplingBox b;
    b.half_width = std::max(10.0, 2.0 * R);
    b.seed = seed;
    return b;
}

namespace detail {

inline std::string num(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// Amplitudes probing large |u|: geometric ladder beyond the box.
inline std::vector<double> asymptotic_ladder(double from)
{
    std::vector<double> out;
    for (double r = from; r <= 1e6 * from; r *= 10.0)
        out.push_back(r);
    return out;
}

} // namespace detail

/// Points (u,v) with |(u,v)| >= R: axis points first, then diagonal rays, then
/// uniform samples in the box.
inline std::vector<std::array<double, 2>> sample_outside_ball(double R, double half_width, int n, unsigned long long seed)
{
    std::vector<std::array<double, 2>> pts;
    for (double r : {R, 1.5 * R, 2.0 * R, 0.5 * (R + half_width), half_width}) {
        double d = r / std::sqrt(2.0);
        while (std::hypot(d, d) < r)
            d = std::nextafter(d, infinity);
        for (double s : {1.0, -1.0}) {
            pts.push_back({s * r, 0.0});
            pts.push_back({0.0, s * r});
            pts.push_back({s * d, d});
            pts.push_back({s * d, -d});
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    int guard = 0;
    while (static_cast<int>(pts.size()) < n && guard++ < 100 * n) {
        const double u = unif(rng), v = unif(rng);
        if (std::hypot(u, v) >= R)
            pts.push_back({u, v});
    }
    return pts;
}

/// Admissible theta for (h4) on the power family together with (g2):
/// [1/q, 1/(p + gamma)). Empty iff q <= p + gamma.
inline ThetaWindow theta_window(double p, double gamma, double q)
{
    return ThetaWindow{1.0 / q, 1.0 / (p + gamma)};
}

// ---------------------------------------------------------------------------
// (h0)-(h5)

namespace detail {

inline void structure_power(HypothesisReport& rep, const CoefficientModel& A, double p, double theta,
                            const std::string& which, double& mu2_out, double& a_lo, double& a_hi)
{
    const auto& pw = *A.power;
    const bool degenerate = pw.a2_max == 0.0;
    const double gamma_eff = degenerate ? 0.0 : A.gamma;
    const double bound = 1.0 / (p + gamma_eff);
    const std::string h4 = "h4" + which;
    if (theta > 0.0 && theta < bound) {
        mu2_out = 1.0 - p * theta - gamma_eff * theta;
        rep.set(h4, Verdict::pass, {"contribution to mu2", {mu2_out}});
    } else {
        mu2_out = 1.0 - p * theta - gamma_eff * theta;
        rep.set(h4, Verdict::fail,
                {"theta = " + num(theta) + " outside (0, 1/(p+gamma)) = (0, " + num(bound) + ")", {theta, bound}});
    }
    a_lo = pw.a1_max + pw.a2_max;
    a_hi = pw.a2_max;
}

} // namespace detail

/// (h2)-(h5) for A and B. Power families are decided exactly; other models
/// need a sampling box.
inline HypothesisReport check_structure(const CoefficientModel& A, const CoefficientModel& B, double p1, double p2,
                                        double theta1, double theta2, const std::optional<SamplingBox>& box = std::nullopt,
                                        double R = 1.0);

/// Sampled version of check_structure, usable for any model.
inline HypothesisReport check_structure_sampled(const CoefficientModel& A, const CoefficientModel& B, double p1,
                                                double p2, double theta1, double theta2, const SamplingBox& box,
                                                double R = 1.0)
{
    HypothesisReport rep;
    std::mt19937_64 rng(box.seed);
    std::uniform_real_distribution<double> unif(-box.half_width, box.half_width);
    std::vector<double> us;
    for (int k = 0; k < box.n_samples; ++k)
        us.push_back(unif(rng));
    for (double r : detail::asymptotic_ladder(box.half_width)) {
        us.push_back(r);
        us.push_back(-r);
    }
    us.push_back(0.0);

    double mu0 = infinity, mu1 = 1.0, mu2 = infinity;
    struct Side {
        const CoefficientModel* m;
        double p, theta;
        std::string tag;
    };
    for (const Side& s : {Side{&A, p1, theta1, "1"}, Side{&B, p2, theta2, "2"}}) {
        double min_val = infinity, min_h3 = infinity, min_h4 = infinity;
        std::array<double, 2> w_h2{}, w_h4{};
        bool even = true;
        std::array<double, 2> w_even{};
        for (const Point& x : box.xs)
            for (double u : us) {
                const double a = s.m->evaluate(x, u);
                const double au = s.m->derivative(x, u);
                if (a < min_val) {
                    min_val = a;
                    w_h2 = {x.x, u};
                }
                if (std::abs(u) >= R)
                    min_h3 = std::min(min_h3, (a + au * u / s.p) / a);
                const double r4 = ((1.0 - s.p * s.theta) * a - s.theta * au * u) / a;
                if (r4 < min_h4) {
                    min_h4 = r4;
                    w_h4 = {x.x, u};
                }
                if (s.m->evaluate(x, -u) != a && even) {
                    even = false;
                    w_even = {x.x, u};
                }
            }
        if (min_val > 0.0 && min_val >= s.m->mu0 && s.m->mu0 > 0.0)
            rep.set("h2" + s.tag, Verdict::sampled_pass, {"min sampled value", {min_val}});
        else
            rep.set("h2" + s.tag, Verdict::fail, {"coefficient below declared mu0 at (x, u)", {w_h2[0], w_h2[1], min_val}});
        mu0 = std::min(mu0, std::min(min_val, s.m->mu0));
        if (min_h3 > 0.0) {
            rep.set("h3" + s.tag, Verdict::sampled_pass, {"largest mu1 in (0,1]", {std::min(1.0, min_h3)}});
            mu1 = std::min(mu1, min_h3);
        } else {
            rep.set("h3" + s.tag, Verdict::fail, {"A + A_u u / p <= 0 for some |u| >= R", {min_h3}});
        }
        if (s.theta > 0.0 && s.theta < 1.0 / s.p && min_h4 > 0.0) {
            rep.set("h4" + s.tag, Verdict::sampled_pass, {"contribution to mu2", {min_h4}});
        } else {
            rep.set("h4" + s.tag, Verdict::fail,
                    {"(1 - p theta) A - theta A_u u >= mu2 A fails at (x, u)", {w_h4[0], w_h4[1], min_h4}});
        }
        mu2 = std::min(mu2, min_h4);
        rep.set("h5" + s.tag, even ? Verdict::sampled_pass : Verdict::fail,
                even ? Witness{} : Witness{"A(x,-u) != A(x,u)", {w_even[0], w_even[1]}});
    }
    rep.derived.mu0 = mu0;
    rep.derived.mu1 = std::clamp(mu1, 0.0, 1.0);
    rep.derived.mu2 = mu2;
    return rep;
}

inline HypothesisReport check_structure(const CoefficientModel& A, const CoefficientModel& B, double p1, double p2,
                                        double theta1, double theta2, const std::optional<SamplingBox>& box, double R)
{
    if (!(A.power && B.power)) {
        if (!box)
            throw ConfigError("custom coefficient model needs a sampling box");
        return check_structure_sampled(A, B, p1, p2, theta1, theta2, *box, R);
    }
    HypothesisReport rep;
    for (const char* h : {"h0", "h1"})
        rep.set(h, Verdict::pass);
    rep.set("h2", Verdict::pass, {"mu0 = min(A1, B1)", {std::min(A.power->a1_min, B.power->a1_min)}});
    // A_u u = gamma A2 |u|^gamma >= 0, so (h3) holds with mu1 = 1.
    rep.set("h3", Verdict::pass, {"largest mu1 in (0,1]", {1.0}});
    double m1 = 0, m2 = 0;
    detail::structure_power(rep, A, p1, theta1, "1", m1, rep.derived.a1, rep.derived.a2);
    detail::structure_power(rep, B, p2, theta2, "2", m2, rep.derived.b1, rep.derived.b2);
    rep.set("h5", Verdict::pass);
    rep.derived.mu0 = std::min(A.power->a1_min, B.power->a1_min);
    rep.derived.mu1 = 1.0;
    rep.derived.mu2 = std::min(m1, m2);
    if (rep.derived.mu2 > 0.0) {
        rep.derived.gamma1 = std::max(p1 * (1.0 - rep.derived.mu1), (1.0 - p1 * theta1 - rep.derived.mu2) / theta1);
        rep.derived.gamma2 = std::max(p2 * (1.0 - rep.derived.mu1), (1.0 - p2 * theta2 - rep.derived.mu2) / theta2);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Closed-form checks for the power and log families

struct FamilyParams {
    double p1 = 2, p2 = 2;
    int N = 3;
    double gamma1 = 1.5, gamma2 = 1.5, gamma3 = 2, gamma4 = 2;
    double q1 = 4, q2 = 4;
    double c_star = 0;
};

inline FamilyParams family_params(const ModelSpec& s)
{
    return {s.p1, s.p2, s.N, s.gamma1, s.gamma2, s.gamma3, s.gamma4, s.q1, s.q2, s.c_star};
}

/// Power-coefficient / power-nonlinearity parameter conditions.
inline HypothesisReport check_power_family(const FamilyParams& c)
{
    using detail::num;
    HypothesisReport rep;
    const double p1s = sobolev_conjugate(c.p1, c.N), p2s = sobolev_conjugate(c.p2, c.N);
    const double b1 = coupling_bound(c.p1, c.p2, c.N), b2 = coupling_bound(c.p2, c.p1, c.N);

    if (c.gamma1 > 1 && c.gamma2 > 1)
        rep.set("ex05", Verdict::pass);
    else
        rep.set("ex05", Verdict::fail, {"need gamma1, gamma2 > 1", {c.gamma1, c.gamma2}});

    if (c.q1 > 1 && c.q2 > 1 && c.gamma3 > 1 && c.gamma4 > 1)
        rep.set("ex13", Verdict::pass);
    else
        rep.set("ex13", Verdict::fail, {"need q1, q2, gamma3, gamma4 > 1", {c.q1, c.q2, c.gamma3, c.gamma4}});

    const bool ex17 = c.gamma3 < c.q1 && c.gamma4 < c.q2;
    if (ex17)
        rep.set("ex17", Verdict::pass);
    else
        rep.set("ex17", Verdict::fail, {"need gamma3 < q1 and gamma4 < q2", {c.gamma3, c.q1, c.gamma4, c.q2}});

    const double ratio = c.gamma3 / c.q1 + c.gamma4 / c.q2;
    if (c.c_star >= 0 && ratio >= 1)
        rep.set("ex12", Verdict::pass, {"gamma3/q1 + gamma4/q2", {ratio}});
    else
        rep.set("ex12", Verdict::fail,
                {"need c* >= 0 and gamma3/q1 + gamma4/q2 >= 1; got c* = " + num(c.c_star) + ", sum = " + num(ratio),
                 {c.c_star, ratio}});

    const bool c11a = c.p1 + c.gamma1 < c.q1 && c.q1 < p1s;
    const bool c11b = c.p2 + c.gamma2 < c.q2 && c.q2 < p2s;
    if (c11a && c11b)
        rep.set("cor11", Verdict::pass);
    else if (!c11a)
        rep.set("cor11", Verdict::fail,
                {"need p1 + gamma1 < q1 < p1*: " + num(c.p1 + c.gamma1) + " < " + num(c.q1) + " < " + num(p1s),
                 {c.p1 + c.gamma1, c.q1, p1s}});
    else
        rep.set("cor11", Verdict::fail,
                {"need p2 + gamma2 < q2 < p2*: " + num(c.p2 + c.gamma2) + " < " + num(c.q2) + " < " + num(p2s),
                 {c.p2 + c.gamma2, c.q2, p2s}});

    if (!ex17) {
        rep.set("cor12", Verdict::fail, {"undefined: requires gamma3 < q1 and gamma4 < q2", {}});
    } else {
        const double l1 = c.gamma4 * (c.q1 - 1) / (c.q1 - c.gamma3);
        const double l2 = c.gamma3 * (c.q2 - 1) / (c.q2 - c.gamma4);
        if (l1 < b1 && l2 < b2)
            rep.set("cor12", Verdict::pass, {"left sides", {l1, l2}});
        else
            rep.set("cor12", Verdict::fail,
                    {l1 >= b1 ? "gamma4 (q1-1)/(q1-gamma3) = " + num(l1) + " >= " + num(b1)
                              : "gamma3 (q2-1)/(q2-gamma4) = " + num(l2) + " >= " + num(b2),
                     {l1, b1, l2, b2}});
    }
    return rep;
}

/// Power-coefficient / logarithmic-nonlinearity parameter conditions.
inline HypothesisReport check_log_family(const FamilyParams& c)
{
    using detail::num;
    HypothesisReport rep;
    const double p1s = sobolev_conjugate(c.p1, c.N), p2s = sobolev_conjugate(c.p2, c.N);
    if (c.gamma1 > 1 && c.gamma2 > 1)
        rep.set("ex05", Verdict::pass);
    else
        rep.set("ex05", Verdict::fail, {"need gamma1, gamma2 > 1", {c.gamma1, c.gamma2}});
    if (c.q1 > 1 && c.q2 > 1 && c.gamma3 > 1 && c.gamma4 > 1)
        rep.set("ex26", Verdict::pass);
    else
        rep.set("ex26", Verdict::fail, {"need q1, q2, gamma3, gamma4 > 1", {c.q1, c.q2, c.gamma3, c.gamma4}});

    const bool a = c.p1 + c.gamma1 < c.gamma3 && c.gamma3 < c.q1 && c.q1 < p1s;
    const bool b = c.p2 + c.gamma2 < c.gamma4 && c.gamma4 < c.q2 && c.q2 < p2s;
    if (a && b)
        rep.set("cor21", Verdict::pass);
    else if (!a)
        rep.set("cor21", Verdict::fail,
                {"need p1 + gamma1 < gamma3 < q1 < p1*: " + num(c.p1 + c.gamma1) + " < " + num(c.gamma3) + " < "
                     + num(c.q1) + " < " + num(p1s),
                 {c.p1 + c.gamma1, c.gamma3, c.q1, p1s}});
    else
        rep.set("cor21", Verdict::fail,
                {"need p2 + gamma2 < gamma4 < q2 < p2*: " + num(c.p2 + c.gamma2) + " < " + num(c.gamma4) + " < "
                     + num(c.q2) + " < " + num(p2s),
                 {c.p2 + c.gamma2, c.gamma4, c.q2, p2s}});

    const double b1 = coupling_bound(c.p2, c.p1, c.N); // bound on gamma3
    const double b2 = coupling_bound(c.p1, c.p2, c.N); // bound on gamma4
    if (c.gamma3 < b1 && c.gamma4 < b2)
        rep.set("cor22", Verdict::pass);
    else
        rep.set("cor22", Verdict::fail,
                {c.gamma3 >= b1 ? "gamma3 = " + num(c.gamma3) + " >= " + num(b1)
                                : "gamma4 = " + num(c.gamma4) + " >= " + num(b2),
                 {c.gamma3, b1, c.gamma4, b2}});
    return rep;
}

// ---------------------------------------------------------------------------
// (g0)-(g7) and related sampled certificates

struct SampledVerdict {
    Verdict verdict = Verdict::fail;
    Witness witness;
    std::size_t checked = 0;
};

/// Ambrosetti-Rabinowitz condition 0 < G <= theta1 G_u u + theta2 G_v v for |(u,v)| >= R.
inline SampledVerdict check_AR_sampled(const NonlinearityModel& G, const SamplingBox& box)
{
    SampledVerdict out;
    auto pts = sample_outside_ball(G.R, box.half_width, box.n_samples, box.seed);
    for (double r : detail::asymptotic_ladder(box.half_width)) {
        pts.push_back({r, 0.0});
        pts.push_back({0.0, r});
        pts.push_back({r, r});
    }
    for (const Point& x : box.xs)
        for (const auto& [u, v] : pts) {
            const double g = G.g(x, u, v);
            const double rhs = G.theta1 * G.gu(x, u, v) * u + G.theta2 * G.gv(x, u, v) * v;
            ++out.checked;
            if (!(g > 0.0) || g > rhs + 1e-12 * std::abs(g)) {
                out.verdict = Verdict::fail;
                out.witness = {"G <= theta1 G_u u + theta2 G_v v fails at (x, u, v); G, rhs", {x.x, u, v, g, rhs}};
                return out;
            }
        }
    out.verdict = Verdict::sampled_pass;
    out.witness = {"samples checked", {static_cast<double>(out.checked)}};
    return out;
}

/// G(x, t^theta1 u, t^theta2 v) >= t G(x,u,v) for |(u,v)| >= R, t in t_grid.
inline SampledVerdict check_superhomogeneity(const NonlinearityModel& G, const std::vector<double>& t_grid,
                                             const std::vector<std::array<double, 2>>& samples, Point x = {0.5, 0.5})
{
    SampledVerdict out;
    for (const auto& [u, v] : samples) {
        if (std::hypot(u, v) < G.R)
            continue;
        const double g = G.g(x, u, v);
        for (double t : t_grid) {
            const double lhs = G.g(x, std::pow(t, G.theta1) * u, std::pow(t, G.theta2) * v);
            ++out.checked;
            if (lhs < t * g * (1.0 - 1e-12)) {
                out.verdict = Verdict::fail;
                out.witness = {"G(t^theta1 u, t^theta2 v) < t G(u,v) at (u, v, t); lhs, rhs", {u, v, t, lhs, t * g}};
                return out;
            }
        }
    }
    out.verdict = Verdict::sampled_pass;
    out.witness = {"pairs checked", {static_cast<double>(out.checked)}};
    return out;
}

struct G3Margin {
    Verdict verdict = Verdict::fail;
    double limsup_estimate = 0.0;
    double bound = 0.0;      ///< mu0 min{lambda11/p1, lambda21/p2}
    double lambda_bar = 0.0; ///< strictly between the estimate and the bound when passing
    std::vector<double> shell_radii;
    std::vector<double> shell_max;
};

/// Shell estimate of limsup_{(u,v)->0} G / (|u|^p1 + |v|^p2).
inline std::pair<std::vector<double>, std::vector<double>> g3_shells(const NonlinearityModel& G, double p1, double p2,
                                                                     Point x = {0.5, 0.5}, int angles = 720)
{
    std::vector<double> radii, maxima;
    for (int k = 1; k <= 6; ++k) {
        const double r = std::pow(10.0, -k);
        double m = -infinity;
        for (int a = 0; a < angles; ++a) {
            const double phi = 2.0 * M_PI * a / angles;
            const double u = r * std::cos(phi), v = r * std::sin(phi);
            const double den = abs_pow(u, p1) + abs_pow(v, p2);
            if (den > 0.0)
                m = std::max(m, (G.g(x, u, v) - G.g(x, 0.0, 0.0)) / den);
        }
        radii.push_back(r);
        maxima.push_back(m);
    }
    return {radii, maxima};
}

inline G3Margin check_g3_margin(const NonlinearityModel& G, double mu0, double p1, double p2, double lambda11,
                                double lambda21, Point x = {0.5, 0.5})
{
    G3Margin out;
    std::tie(out.shell_radii, out.shell_max) = g3_shells(G, p1, p2, x);
    out.limsup_estimate = std::max(0.0, out.shell_max.back());
    out.bound = mu0 * std::min(lambda11 / p1, lambda21 / p2);
    if (out.limsup_estimate < out.bound) {
        out.verdict = Verdict::sampled_pass;
        out.lambda_bar = 0.5 * (out.limsup_estimate + out.bound);
    }
    return out;
}

/// inf of G on the circle |(w,z)| = R (dense angular sampling).
inline double sphere_infimum(const NonlinearityModel& G, const SamplingBox& box, int angles = 3600)
{
    double m = infinity;
    for (const Point& x : box.xs)
        for (int a = 0; a < angles; ++a) {
            const double phi = 2.0 * M_PI * a / angles;
            m = std::min(m, G.g(x, G.R * std::cos(phi), G.R * std::sin(phi)));
        }
    return m;
}

/// min over angles of G / (|u|^{1/theta1} + |v|^{1/theta2}) on growing shells.
inline std::vector<double> g4_shells(const NonlinearityModel& G, const SamplingBox& box, int angles = 360)
{
    std::vector<double> out;
    for (double r : detail::asymptotic_ladder(std::max(G.R, box.half_width))) {
        double m = infinity;
        for (const Point& x : box.xs)
            for (int a = 0; a < angles; ++a) {
                const double phi = 2.0 * M_PI * a / angles;
                const double u = r * std::cos(phi), v = r * std::sin(phi);
                m = std::min(m, G.g(x, u, v) / (abs_pow(u, 1.0 / G.theta1) + abs_pow(v, 1.0 / G.theta2)));
            }
        out.push_back(m);
    }
    return out;
}

/// Growth constant estimate for |G_u| <= sigma(1 + |u|^{q1-1} + |v|^{s1}) and the G-bound.
inline std::pair<double, double> estimate_sigma(const NonlinearityModel& G, const SamplingBox& box)
{
    std::mt19937_64 rng(box.seed + 17);
    std::uniform_real_distribution<double> unif(-box.half_width, box.half_width);
    double sigma = 0.0, sigma1 = 0.0;
    std::vector<std::array<double, 2>> pts;
    for (int k = 0; k < box.n_samples; ++k)
        pts.push_back({unif(rng), unif(rng)});
    for (double r : detail::asymptotic_ladder(box.half_width)) {
        pts.push_back({r, 0.0});
        pts.push_back({0.0, r});
        pts.push_back({r, r});
        pts.push_back({r, 0.5 * r});
    }
    for (const Point& x : box.xs)
        for (const auto& [u, v] : pts) {
            const double au = std::abs(u), av = std::abs(v);
            sigma = std::max(sigma, std::abs(G.gu(x, u, v)) / (1 + abs_pow(au, G.q1 - 1) + abs_pow(av, G.s1)));
            sigma = std::max(sigma, std::abs(G.gv(x, u, v)) / (1 + abs_pow(au, G.s2) + abs_pow(av, G.q2 - 1)));
            const double rhs = 1 + au + abs_pow(au, G.q1) + au * abs_pow(av, G.s1) + av + abs_pow(au, G.s2) * av
                             + abs_pow(av, G.q2);
            sigma1 = std::max(sigma1, std::abs(G.g(x, u, v)) / rhs);
        }
    return {sigma, sigma1};
}

/// (g0)-(g7) for G given theta, exponents and the coefficients' structure.
inline HypothesisReport check_nonlinearity(const NonlinearityModel& G, double p1, double p2, int N, const SamplingBox& box)
{
    using detail::num;
    HypothesisReport rep;
    const bool family = G.family_tag == "power" || G.family_tag == "log";

    // (g0)
    {
        bool ok = true;
        Witness w;
        for (const Point& x : box.xs) {
            const double g0 = G.g(x, 0, 0), gu0 = G.gu(x, 0, 0), gv0 = G.gv(x, 0, 0);
            if (!std::isfinite(g0) || gu0 != 0.0 || gv0 != 0.0) {
                ok = false;
                w = {"G(x,0,0), G_u(x,0,0), G_v(x,0,0) at x", {x.x, g0, gu0, gv0}};
                break;
            }
        }
        rep.set("g0", ok ? (family ? Verdict::pass : Verdict::sampled_pass) : Verdict::fail, w);
    }

    // (g1): growth constants and the subcritical windows.
    std::tie(rep.derived.sigma_hat, rep.derived.sigma1_hat) = estimate_sigma(G, box);
    try {
        rep.derived.exponents = derive_exponents(p1, p2, N, G.q1, G.q2, G.s1, G.s2);
        rep.set("g1", family ? Verdict::pass : Verdict::sampled_pass, {"sigma estimate", {rep.derived.sigma_hat}});
    } catch (const WindowEmptyError& e) {
        rep.set("g1", Verdict::fail, {e.what(), {G.q1, G.q2, G.s1, G.s2}});
    }

    // (g2)
    const auto ar = check_AR_sampled(G, box);
    if (G.family_tag == "power") {
        const bool ok = G.c_star >= 0 && G.theta1 * G.q1 >= 1 && G.theta2 * G.q2 >= 1
                     && (G.c_star == 0 || G.theta1 * G.gamma3 + G.theta2 * G.gamma4 >= 1);
        if (ok)
            rep.set("g2", Verdict::pass, {"theta_i q_i", {G.theta1 * G.q1, G.theta2 * G.q2}});
        else
            rep.set("g2", Verdict::fail,
                    ar.verdict == Verdict::fail
                        ? ar.witness
                        : Witness{"need c* >= 0, theta_i >= 1/q_i, theta1 gamma3 + theta2 gamma4 >= 1",
                                  {G.theta1, 1 / G.q1, G.theta2, 1 / G.q2}});
    } else if (G.family_tag == "log") {
        const bool ok = G.theta1 >= 1.0 / G.gamma3 && G.theta2 >= 1.0 / G.gamma4;
        if (ok)
            rep.set("g2", Verdict::pass, {"theta_i gamma_{i+2}", {G.theta1 * G.gamma3, G.theta2 * G.gamma4}});
        else
            rep.set("g2", Verdict::fail,
                    ar.verdict == Verdict::fail
                        ? ar.witness
                        : Witness{"need theta1 >= 1/gamma3 and theta2 >= 1/gamma4",
                                  {G.theta1, 1 / G.gamma3, G.theta2, 1 / G.gamma4}});
    } else {
        rep.set("g2", ar.verdict, ar.witness);
    }
    rep.set("g2_sampled", ar.verdict, ar.witness);

    // (g3) near the origin: zero limit suffices for any positive eigenvalue bound.
    {
        auto [radii, maxima] = g3_shells(G, p1, p2, box.xs.front());
        rep.derived.g3_limsup = std::max(0.0, maxima.back());
        bool zero_limit = false;
        if (G.family_tag == "power")
            zero_limit = G.q1 > p1 && G.q2 > p2 && (G.c_star == 0 || G.gamma3 / p1 + G.gamma4 / p2 > 1);
        else if (G.family_tag == "log")
            zero_limit = G.q1 > p1 && G.q2 > p2 && G.gamma3 / p1 + 2 / p2 > 1 && 2 / p1 + G.gamma4 / p2 > 1;
        else
            zero_limit = rep.derived.g3_limsup < 1e-8;
        if (zero_limit)
            rep.set("g3", family ? Verdict::pass : Verdict::sampled_pass,
                    {"limsup G/(|u|^p1+|v|^p2) at 0 (shell estimate)", {rep.derived.g3_limsup}});
        else
            rep.set("g3", Verdict::fail,
                    {"nonzero limsup at the origin; compare against mu0 min(lambda_i1/p_i) with the spectrum",
                     {rep.derived.g3_limsup}});
    }

    // (g5) evenness
    {
        bool even = true;
        Witness w;
        for (const auto& [u, v] : sample_outside_ball(0.0, box.half_width, 200, box.seed + 5))
            for (const Point& x : box.xs)
                if (G.g(x, -u, -v) != G.g(x, u, v)) {
                    even = false;
                    w = {"G(x,-u,-v) != G(x,u,v) at (u,v)", {u, v}};
                }
        rep.set("g5", even ? (family && G.even ? Verdict::pass : Verdict::sampled_pass) : Verdict::fail, w);
    }

    // (g4) directly, and via (g6) + (g7); either route suffices.
    {
        const auto shells = g4_shells(G, box);
        const double last = shells.back();
        const double prev = shells[shells.size() - 2];
        const bool direct = last > 0.0 && last >= 0.5 * prev;
        rep.set("g4_direct", direct ? Verdict::sampled_pass : Verdict::fail,
                {direct ? "liminf estimate on outer shells" : "ratio decays toward zero on outer shells", {prev, last}});
        const double inf_sphere = sphere_infimum(G, box);
        const bool g6 = inf_sphere > 0.0;
        const bool g7 = G.theta1 == G.theta2;
        rep.set("g6", g6 ? Verdict::sampled_pass : Verdict::fail, {"inf of G on |(w,z)| = R", {inf_sphere}});
        rep.set("g7", g7 ? Verdict::pass : Verdict::fail, {"theta1, theta2", {G.theta1, G.theta2}});
        const bool via = g6 && g7;
        const std::string route = direct && via ? "both" : direct ? "direct" : via ? "g6+g7" : "none";
        rep.set("g4", direct || via ? Verdict::sampled_pass : Verdict::fail, {"route: " + route, {last}});
        rep.informational.insert({"g4_direct", "g6", "g7", "g2_sampled"});
    }
    return rep;
}

} // namespace varmp
