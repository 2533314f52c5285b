#pragma once

// Mountain-pass geometry certificate, preconditioned descent, the mountain
// pass solver (path deformation followed by local minimax refinement) and
// the symmetric multiplicity sweep.

#include <varmp/diagnostics.hpp>
#include <varmp/energy.hpp>
#include <varmp/errors.hpp>
#include <varmp/hypotheses.hpp>
#include <varmp/model_set.hpp>
#include <varmp/spectrum.hpp>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace varmp {

struct SolveConfig {
    double tol_cps = 1e-6;
    int max_iters = 10000;
    int path_points = 21;
    int path_sweeps = 200;      ///< deformation sweeps before the minimax refinement
    double switch_ratio = 1e-2; ///< leave the path phase once cps <= switch_ratio * (1 + |J|)
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    int max_backtracks = 50;
    double initial_step = 1.0;
    unsigned long long seed = 0;
    double dedupe_distance = 0.0; ///< 0 selects 1e-2 * mesh diameter
    double divergence_bound = 1e6;
    double v_mix = 0.0; ///< weight of the second component in multiplicity seeds

    void validate() const
    {
        if (!(tol_cps > 0.0) || max_iters <= 0 || path_points < 3 || path_sweeps < 0 || !(armijo_c > 0.0)
            || !(armijo_shrink > 0.0 && armijo_shrink < 1.0) || max_backtracks <= 0 || !(initial_step > 0.0)
            || dedupe_distance < 0.0 || !(divergence_bound > 0.0))
            throw ConfigError("invalid solver configuration");
    }
};

enum class Classification { converged, max_iters, diverged };

inline const char* to_string(Classification c)
{
    switch (c) {
    case Classification::converged: return "converged";
    case Classification::max_iters: return "max-iters";
    case Classification::diverged: return "diverged";
    }
    return "?";
}

struct SolveResult {
    State state;
    double level = 0.0;
    double cps_final = 0.0;
    int iterations = 0;
    Classification classification = Classification::max_iters;
    CpsTrace trace;
    int path_sweeps = 0;
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Small helpers

inline double h1_inner(const Problem& P, const State& a, const State& b)
{
    return P.riesz().inner(a.u, b.u) + P.riesz().inner(a.v, b.v);
}

inline double h1_norm(const Problem& P, const State& a) { return std::sqrt(std::max(0.0, h1_inner(P, a, a))); }

/// ||u1 - u2||_W1 + ||v1 - v2||_W2
inline double w_distance(const Mesh& mesh, const State& a, const State& b) { return norm_Wpair(mesh, a - b); }

inline TraceRow trace_row(const Problem& P, const State& s, long iter, double J, double cps, double step)
{
    const Mesh& m = P.mesh();
    return {iter, J, cps, norm_W(m, s.u, s.p1), norm_W(m, s.v, s.p2), norm_Linf(m, s.u), norm_Linf(m, s.v), step};
}

// ---------------------------------------------------------------------------
// Geometry

struct GeometryInputs {
    double mu0 = 0.0;
    double lambda11 = 0.0;
    double lambda21 = 0.0;
    Field phi11;
    double qbar1 = 0.0, qbar2 = 0.0;
    unsigned long long seed = 0;
    int sphere_samples = 1000;
    int doubling_cap = 60;
};

struct DoublingStep {
    double t = 0.0;
    double J = 0.0;
    double normW = 0.0;
};

struct GeometryReport {
    double lambda_bar = 0.0;
    double g3_estimate = 0.0;
    double g3_bound = 0.0;
    double sigma_star = 0.0;
    double tau1 = 0.0, tau2 = 0.0; ///< embedding constants at qbar_i
    double qbar1 = 0.0, qbar2 = 0.0;
    double R0 = 0.0;
    double R0_max = 0.0;
    double rho0 = 0.0;
    double margin1 = 0.0, margin2 = 0.0; ///< the two coercivity margins at R0
    State e_state;
    double e_energy = 0.0;
    double e_norm = 0.0;
    std::vector<DoublingStep> doubling;
    double sphere_min_J = 0.0;
    int sphere_samples = 0;
    int sphere_violations = 0;

    bool certified() const { return rho0 > 0.0 && sphere_violations == 0 && e_energy < rho0 && e_norm > R0; }
};

namespace detail {

inline std::vector<Point> sample_points(const Mesh& mesh, std::size_t max_points = 16)
{
    std::vector<Point> xs;
    const std::size_t ne = mesh.n_elements();
    const std::size_t stride = std::max<std::size_t>(1, ne / max_points);
    for (std::size_t e = 0; e < ne; e += stride)
        xs.push_back(mesh.barycenter(e));
    return xs;
}

/// Smallest constant with G - G(x,0,0) <= lambda_bar(|u|^p1+|v|^p2) + sigma(|u|^qbar1+|v|^qbar2) on the samples.
inline double sigma_star(const NonlinearityModel& G, const std::vector<Point>& xs, double lambda_bar, double p1,
                         double p2, double qbar1, double qbar2, unsigned long long seed)
{
    const double hw = std::max(10.0, 2.0 * G.R);
    std::vector<std::array<double, 2>> pts;
    for (int a = 0; a < 72; ++a) {
        const double phi = 2.0 * M_PI * a / 72.0;
        for (double r = 1e-3; r <= 1e7; r *= 1.25)
            pts.push_back({r * std::cos(phi), r * std::sin(phi)});
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-hw, hw);
    for (int k = 0; k < 4000; ++k)
        pts.push_back({unif(rng), unif(rng)});
    double s = 0.0;
    for (const Point& x : xs)
        for (const auto& [u, v] : pts) {
            const double num = G.g(x, u, v) - G.g(x, 0.0, 0.0) - lambda_bar * (abs_pow(u, p1) + abs_pow(v, p2));
            const double den = abs_pow(u, qbar1) + abs_pow(v, qbar2);
            if (den > 0.0)
                s = std::max(s, num / den);
        }
    return s * (1.0 + 1e-3);
}

/// min over a + b = R0 of a^p1 c1 + b^p2 c2.
inline double sphere_lower_bound(double R0, double p1, double p2, double c1, double c2)
{
    if (!(c1 > 0.0 && c2 > 0.0))
        return -infinity;
    auto f = [&](double a) { return std::pow(a, p1) * c1 + std::pow(R0 - a, p2) * c2; };
    const auto r = boost::math::tools::brent_find_minima(f, 0.0, R0, 50);
    return std::min({r.second, f(0.0), f(R0)});
}

/// Random Dirichlet direction: Riesz-smoothed noise.
inline Field random_smooth(const Problem& P, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Field noise = P.mesh().zero_field();
    for (int i : P.mesh().interior_nodes())
        noise[i] = normal(rng);
    return P.riesz().represent(noise);
}

} // namespace detail

/// Certifies (geo1)-(geo4): a sphere of radius R0 on which J >= rho0 > 0, and
/// a point e = (t u_bar, 0) beyond it with J(e) < 0.
inline GeometryReport verify_geometry(const Problem& P, const GeometryInputs& in)
{
    const Mesh& mesh = P.mesh();
    const NonlinearityModel& G = P.G();
    const double p1 = P.p1(), p2 = P.p2();
    GeometryReport rep;
    rep.qbar1 = in.qbar1;
    rep.qbar2 = in.qbar2;

    const auto xs = detail::sample_points(mesh);
    const G3Margin g3 = check_g3_margin(G, in.mu0, p1, p2, in.lambda11, in.lambda21, xs.front());
    rep.g3_estimate = g3.limsup_estimate;
    rep.g3_bound = g3.bound;
    if (g3.verdict == Verdict::fail)
        throw GeometryError(GeometryError::Kind::unavailable,
                            "(g3) margin fails: limsup estimate " + detail::num(g3.limsup_estimate) + " >= bound "
                                + detail::num(g3.bound));
    rep.lambda_bar = g3.lambda_bar;
    rep.sigma_star = detail::sigma_star(G, xs, rep.lambda_bar, p1, p2, in.qbar1, in.qbar2, in.seed);
    rep.tau1 = embedding_constant(p1, in.qbar1, mesh);
    rep.tau2 = embedding_constant(p2, in.qbar2, mesh);

    const double k1 = in.mu0 / p1 - rep.lambda_bar / in.lambda11;
    const double k2 = in.mu0 / p2 - rep.lambda_bar / in.lambda21;
    const double s1 = rep.sigma_star * std::pow(rep.tau1, in.qbar1);
    const double s2 = rep.sigma_star * std::pow(rep.tau2, in.qbar2);
    auto margins = [&](double R) {
        return std::pair{k1 - s1 * std::pow(R, in.qbar1 - p1), k2 - s2 * std::pow(R, in.qbar2 - p2)};
    };
    auto rho_of = [&](double R) {
        const auto [c1, c2] = margins(R);
        return detail::sphere_lower_bound(R, p1, p2, c1, c2);
    };
    if (rep.sigma_star > 0.0) {
        rep.R0_max = std::min(std::pow(k1 / s1, 1.0 / (in.qbar1 - p1)), std::pow(k2 / s2, 1.0 / (in.qbar2 - p2)));
        const auto best = boost::math::tools::brent_find_minima([&](double R) { return -rho_of(R); }, 0.0,
                                                                rep.R0_max, 50);
        rep.R0 = best.first;
    } else {
        // G lies below the quadratic-order bound everywhere: any radius works.
        rep.R0_max = infinity;
        rep.R0 = 1.0;
    }
    rep.rho0 = rho_of(rep.R0);
    std::tie(rep.margin1, rep.margin2) = margins(rep.R0);

    // e = (t u_bar, 0), u_bar = R phi / |phi|_inf, doubling t.
    const Field ubar = G.R * in.phi11 / norm_Linf(mesh, in.phi11);
    double t = 1.0;
    bool found = false;
    for (int k = 0; k < in.doubling_cap; ++k, t *= 2.0) {
        State e{t * ubar, mesh.zero_field(), p1, p2};
        const double J = energy_value(P, e);
        const double nw = norm_Wpair(mesh, e);
        rep.doubling.push_back({t, J, nw});
        if (J < 0.0 && J < rep.rho0 && nw > rep.R0) {
            rep.e_state = e;
            rep.e_energy = J;
            rep.e_norm = nw;
            found = true;
            break;
        }
    }
    if (!found)
        throw GeometryError(GeometryError::Kind::superlinearity_not_detected,
                            "J(t u_bar, 0) stayed nonnegative up to t = " + detail::num(t / 2.0));

    // Sampled certificate on the sphere ||(u,v)||_W = R0.
    std::mt19937_64 rng(in.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    rep.sphere_min_J = infinity;
    for (int k = 0; k < in.sphere_samples; ++k) {
        Field u = k == 0 ? Field(in.phi11) : detail::random_smooth(P, rng);
        Field v = detail::random_smooth(P, rng);
        double a = k % 3 == 0 ? 1.0 : k % 3 == 1 ? 0.0 : unif(rng);
        if (k == 0)
            a = 1.0;
        const double nu = norm_W(mesh, u, p1), nv = norm_W(mesh, v, p2);
        State s{a * rep.R0 / nu * u, (1.0 - a) * rep.R0 / nv * v, p1, p2};
        const double J = energy_value(P, s);
        rep.sphere_min_J = std::min(rep.sphere_min_J, J);
        if (J < rep.rho0)
            ++rep.sphere_violations;
        ++rep.sphere_samples;
    }
    return rep;
}

/// Geometry from a model set: eigenpairs on the mesh, mu0 from the
/// coefficients, qbar from the growth exponents.
inline GeometryReport verify_geometry(const Problem& P, const ModelSet& m, unsigned long long seed = 0,
                                      int sphere_samples = 1000)
{
    const auto e1 = first_eigenpair(m.p1, P.mesh());
    const auto e2 = m.p2 == m.p1 ? e1 : first_eigenpair(m.p2, P.mesh());
    const auto ex = derive_exponents(m.p1, m.p2, m.spec.N, m.G.q1, m.G.q2, m.G.s1, m.G.s2);
    GeometryInputs in;
    in.mu0 = std::min(m.A.mu0, m.B.mu0);
    in.lambda11 = e1.lambda;
    in.lambda21 = e2.lambda;
    in.phi11 = e1.phi;
    in.qbar1 = ex.qbar1;
    in.qbar2 = ex.qbar2;
    in.seed = seed;
    in.sphere_samples = sphere_samples;
    return verify_geometry(P, in);
}

// ---------------------------------------------------------------------------
// Descent

struct DescentStep {
    State state;
    double J_before = 0.0;
    double J_after = 0.0;
    double cps = 0.0; ///< at the input state
    double step = 0.0;
    bool moved = false;
    bool failed = false;
};

/// One H^1_0-preconditioned steepest-descent step with Armijo backtracking.
inline DescentStep descend(const Problem& P, const State& s, const SolveConfig& cfg, double step0 = 0.0)
{
    DescentStep out;
    out.state = s;
    out.J_before = out.J_after = energy_value(P, s);
    const Cotangent c = differential(P, s);
    out.cps = cps_from(P, s, c);
    if (out.cps <= cfg.tol_cps)
        return out;
    const State d = riesz_gradient(P, c, s).scaled(-1.0);
    const double slope = c.pair(d);
    double t = step0 > 0.0 ? step0 : cfg.initial_step;
    for (int k = 0; k < cfg.max_backtracks; ++k, t *= cfg.armijo_shrink) {
        const State trial = s + d.scaled(t);
        double J = infinity;
        try {
            J = energy_value(P, trial);
        } catch (const EvaluationError&) {
            continue;
        }
        if (J <= out.J_before + cfg.armijo_c * t * slope) {
            out.state = trial;
            out.J_after = J;
            out.step = t;
            out.moved = true;
            return out;
        }
    }
    out.failed = true;
    return out;
}

/// Repeated descent to a local minimizer (critical point of minimum type).
inline SolveResult minimize(const Problem& P, const State& start, const SolveConfig& cfg)
{
    cfg.validate();
    SolveResult res;
    State s = start;
    double step = cfg.initial_step;
    double J = energy_value(P, s);
    double cps = cps_quantity(P, s);
    record(res.trace, trace_row(P, s, 0, J, cps, 0.0));
    for (int it = 1; it <= cfg.max_iters && cps > cfg.tol_cps; ++it) {
        const DescentStep st = descend(P, s, cfg, std::min(cfg.initial_step, 2.0 * step));
        if (st.failed) {
            res.warnings.push_back("line search exhausted");
            break;
        }
        s = st.state;
        step = st.step;
        J = st.J_after;
        cps = cps_quantity(P, s);
        record(res.trace, trace_row(P, s, it, J, cps, step));
        if (norm_X(P.mesh(), s) > cfg.divergence_bound) {
            res.classification = Classification::diverged;
            break;
        }
    }
    res.state = s;
    res.level = J;
    res.cps_final = cps;
    res.iterations = static_cast<int>(res.trace.size()) - 1;
    if (res.classification != Classification::diverged)
        res.classification = cps <= cfg.tol_cps ? Classification::converged : Classification::max_iters;
    return res;
}

// ---------------------------------------------------------------------------
// Local maxima along rays and over finite-dimensional spans

struct RayMax {
    double t = 0.0;
    double J = 0.0;
};

/// argmax_{t>0} J(t w), located as the sign change of t -> dJ(t w)[w].
inline RayMax ray_maximum(const Problem& P, const State& w, double t_guess = 1.0)
{
    auto h = [&](double t) { return differential(P, w.scaled(t)).pair(w); };
    double lo = t_guess, hi = t_guess;
    double hlo = h(lo), hhi = hlo;
    int guard = 0;
    while (!(hlo > 0.0) && guard++ < 200) {
        hi = lo;
        hhi = hlo;
        lo *= 0.5;
        hlo = h(lo);
    }
    guard = 0;
    while (!(hhi < 0.0) && guard++ < 200) {
        lo = hi;
        hlo = hhi;
        hi *= 2.0;
        hhi = h(hi);
    }
    if (!(hlo > 0.0) || !(hhi < 0.0))
        throw GeometryError(GeometryError::Kind::superlinearity_not_detected, "no maximum of J along the ray");
    std::uintmax_t max_iter = 200;
    const auto r = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi, boost::math::tools::eps_tolerance<double>(50),
                                                     max_iter);
    const double t = 0.5 * (r.first + r.second);
    return {t, energy_value(P, w.scaled(t))};
}

struct SpanMax {
    Eigen::VectorXd coeffs;
    State w;
    double J = 0.0;
    double grad_norm = 0.0;
};

/// Local maximum of c -> J(sum c_j b_j) near `init` by damped Newton with a
/// finite-difference Hessian of the exact restricted gradient.
inline SpanMax span_maximum(const Problem& P, const std::vector<State>& basis, Eigen::VectorXd c, int max_iters = 100)
{
    const auto n = static_cast<Eigen::Index>(basis.size());
    auto combine = [&](const Eigen::VectorXd& a) {
        State w = basis.front().scaled(0.0);
        for (Eigen::Index j = 0; j < n; ++j)
            w = w + basis[static_cast<std::size_t>(j)].scaled(a[j]);
        return w;
    };
    auto gradient = [&](const Eigen::VectorXd& a) {
        const Cotangent d = differential(P, combine(a));
        Eigen::VectorXd g(n);
        for (Eigen::Index j = 0; j < n; ++j)
            g[j] = d.pair(basis[static_cast<std::size_t>(j)]);
        return g;
    };
    double J = energy_value(P, combine(c));
    Eigen::VectorXd g = gradient(c);
    for (int it = 0; it < max_iters; ++it) {
        const double scale = 1.0 + std::abs(J);
        if (g.norm() <= 1e-13 * scale)
            break;
        Eigen::MatrixXd H(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(c[j]));
            Eigen::VectorXd cp = c, cm = c;
            cp[j] += h;
            cm[j] -= h;
            H.col(j) = (gradient(cp) - gradient(cm)) / (2.0 * h);
        }
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        // Ascent step with |H| in place of -H wherever curvature has the wrong sign.
        const Eigen::VectorXd lam = es.eigenvalues().cwiseAbs().cwiseMax(1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()));
        const Eigen::VectorXd delta = es.eigenvectors() * ((es.eigenvectors().transpose() * g).cwiseQuotient(lam));
        double alpha = 1.0;
        bool improved = false;
        for (int k = 0; k < 60; ++k, alpha *= 0.5) {
            const Eigen::VectorXd ct = c + alpha * delta;
            double Jt = -infinity;
            try {
                Jt = energy_value(P, combine(ct));
            } catch (const EvaluationError&) {
                continue;
            }
            const Eigen::VectorXd gt = gradient(ct);
            if (Jt >= J - 1e-15 * scale || gt.norm() < g.norm()) {
                c = ct;
                J = Jt;
                g = gt;
                improved = true;
                break;
            }
        }
        if (!improved)
            break;
    }
    return {c, combine(c), J, g.norm()};
}

// ---------------------------------------------------------------------------
// Local minimax descent (peak selection over [L, v])

struct MinimaxState {
    std::vector<State> support; ///< unit directions of previously found solutions
    State v;                    ///< unit H1 direction orthogonal to support
    Eigen::VectorXd coeffs;     ///< last peak coefficients (support..., v)
};

namespace detail {

inline State orthonormalize(const Problem& P, State v, const std::vector<State>& support)
{
    for (int pass = 0; pass < 2; ++pass)
        for (const State& l : support)
            v = v - l.scaled(h1_inner(P, v, l));
    return v.scaled(1.0 / h1_norm(P, v));
}

inline SpanMax peak(const Problem& P, const MinimaxState& ms)
{
    if (ms.support.empty()) {
        const RayMax r = ray_maximum(P, ms.v, ms.coeffs.size() ? ms.coeffs[0] : 1.0);
        Eigen::VectorXd c(1);
        c[0] = r.t;
        return {c, ms.v.scaled(r.t), r.J, 0.0};
    }
    std::vector<State> basis = ms.support;
    basis.push_back(ms.v);
    return span_maximum(P, basis, ms.coeffs);
}

} // namespace detail

/// Li-Zhou local minimax iteration from `ms`; appends to `res`.
inline void minimax_refine(const Problem& P, MinimaxState ms, const SolveConfig& cfg, SolveResult& res)
{
    const Mesh& mesh = P.mesh();
    ms.v = detail::orthonormalize(P, ms.v, ms.support);
    if (ms.coeffs.size() != static_cast<Eigen::Index>(ms.support.size() + 1)) {
        const RayMax r = ray_maximum(P, ms.v, 1.0);
        ms.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ms.support.size() + 1));
        ms.coeffs[ms.coeffs.size() - 1] = r.t;
    }
    SpanMax pk = detail::peak(P, ms);
    ms.coeffs = pk.coeffs;
    long iter = res.trace.empty() ? 0 : res.trace.back().iter + 1;
    double lambda = cfg.initial_step;
    double cps = infinity;
    for (; iter <= cfg.max_iters; ++iter) {
        const Cotangent c = differential(P, pk.w);
        cps = cps_from(P, pk.w, c);
        record(res.trace, trace_row(P, pk.w, iter, pk.J, cps, lambda));
        if (cps <= cfg.tol_cps) {
            res.classification = Classification::converged;
            break;
        }
        if (norm_X(mesh, pk.w) > cfg.divergence_bound) {
            res.classification = Classification::diverged;
            break;
        }
        const State d = riesz_gradient(P, c, pk.w).scaled(-1.0);
        const double dn2 = -c.pair(d);
        const double cv = ms.coeffs[ms.coeffs.size() - 1];
        bool accepted = false;
        double t = std::min(cfg.initial_step, 2.0 * lambda);
        for (int k = 0; k < cfg.max_backtracks; ++k, t *= cfg.armijo_shrink) {
            MinimaxState trial = ms;
            try {
                trial.v = detail::orthonormalize(P, ms.v + d.scaled(t / cv), ms.support);
                const SpanMax pt = detail::peak(P, trial);
                // Near the roundoff floor of J the Armijo decrease is invisible; fall back on cps.
                const bool armijo = pt.J <= pk.J - cfg.armijo_c * t * dn2;
                const bool flat = !armijo && pt.J <= pk.J + 1e-13 * (1.0 + std::abs(pk.J))
                                  && cps_quantity(P, pt.w) < cps;
                if (armijo || flat) {
                    ms = trial;
                    ms.coeffs = pt.coeffs;
                    pk = pt;
                    lambda = t;
                    accepted = true;
                    break;
                }
            } catch (const GeometryError&) {
            } catch (const EvaluationError&) {
            }
        }
        if (!accepted) {
            res.warnings.push_back("minimax line search exhausted at cps " + detail::num(cps));
            res.classification = Classification::max_iters;
            break;
        }
    }
    if (iter > cfg.max_iters)
        res.classification = Classification::max_iters;
    res.state = pk.w;
    res.level = pk.J;
    res.cps_final = cps;
    res.iterations = static_cast<int>(res.trace.size()) - 1;
}

// ---------------------------------------------------------------------------
// Mountain pass

namespace detail {

/// Re-spaces interior path points at equal H1 arc length (endpoints fixed).
inline std::vector<State> redistribute(const Problem& P, const std::vector<State>& path)
{
    const std::size_t n = path.size();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        s[i] = s[i - 1] + h1_norm(P, path[i] - path[i - 1]);
    std::vector<State> out{path.front()};
    std::size_t seg = 0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double target = s.back() * static_cast<double>(k) / static_cast<double>(n - 1);
        while (seg + 2 < n && s[seg + 1] < target)
            ++seg;
        const double len = s[seg + 1] - s[seg];
        const double a = len > 0.0 ? (target - s[seg]) / len : 0.0;
        out.push_back(path[seg].scaled(1.0 - a) + path[seg + 1].scaled(a));
    }
    out.push_back(path.back());
    return out;
}

} // namespace detail

/// Mountain-pass critical point between 0 and geometry.e_state.
inline SolveResult mountain_pass(const Problem& P, const GeometryReport& geometry, const SolveConfig& cfg)
{
    cfg.validate();
    const State& e = geometry.e_state;
    if (e.u.size() == 0 || !(energy_value(P, e) < geometry.rho0))
        throw GeometryError(GeometryError::Kind::unavailable, "geometry report has no admissible end point");
    SolveResult res;
    const int n = cfg.path_points;
    std::vector<State> path;
    for (int i = 0; i < n; ++i)
        path.push_back(e.scaled(static_cast<double>(i) / (n - 1)));

    std::vector<double> J(static_cast<std::size_t>(n));
    std::vector<double> steps(static_cast<std::size_t>(n), cfg.initial_step);
    std::size_t imax = 1;
    long iter = 0;
    std::vector<State> prev;
    for (int sweep = 0;; ++sweep) {
        for (std::size_t i = 0; i < path.size(); ++i)
            J[i] = energy_value(P, path[i]);
        const auto top = static_cast<std::size_t>(std::max_element(J.begin() + 1, J.end() - 1) - J.begin());
        if (sweep > 0 && J[top] < geometry.rho0) {
            // The discrete path slipped across the ridge; keep the last good one.
            path = prev;
            for (std::size_t i = 0; i < path.size(); ++i)
                J[i] = energy_value(P, path[i]);
            break;
        }
        imax = top;
        const double cps = cps_quantity(P, path[imax]);
        record(res.trace, trace_row(P, path[imax], iter, J[imax], cps, sweep == 0 ? 0.0 : steps[imax]));
        res.path_sweeps = sweep;
        if (cps <= cfg.switch_ratio * (1.0 + std::abs(J[imax])) || cps <= cfg.tol_cps || sweep >= cfg.path_sweeps
            || iter >= cfg.max_iters)
            break;
        ++iter;
        prev = path;
        const DescentStep st = descend(P, path[imax], cfg, std::min(cfg.initial_step, 2.0 * steps[imax]));
        if (!st.moved)
            break;
        path[imax] = st.state;
        steps[imax] = st.step;
        path = detail::redistribute(P, path);
    }
    if (res.trace.back().cps <= cfg.tol_cps) {
        res.state = path[imax];
        res.level = J[imax];
        res.cps_final = res.trace.back().cps;
        res.classification = Classification::converged;
        res.iterations = static_cast<int>(res.trace.size()) - 1;
    } else {
        MinimaxState ms;
        ms.v = path[imax];
        minimax_refine(P, ms, cfg, res);
    }
    if (res.classification == Classification::converged) {
        if (res.level < 0.5 * geometry.rho0)
            res.warnings.push_back("geometry violation: level " + detail::num(res.level) + " below rho0/2");
        if (norm_Wpair(P.mesh(), res.state) < 0.5 * geometry.R0)
            res.warnings.push_back("solution inside the R0/2 ball");
    }
    return res;
}

struct Residuals {
    double res_u = 0.0;
    double res_v = 0.0;
};

/// Discrete weak-form residual of each equation (the component dual norms).
inline Residuals residual_check(const Problem& P, const State& s)
{
    const DualNorm n = dual_norm(P, differential(P, s));
    return {n.part_u, n.part_v};
}

// ---------------------------------------------------------------------------
// Symmetric multiplicity

struct MultiplicityResult {
    std::vector<SolveResult> solutions; ///< sorted by level
    std::vector<std::string> warnings;
};

inline bool is_duplicate(const Mesh& mesh, const State& a, const State& b, double dist)
{
    return std::min(w_distance(mesh, a, b), w_distance(mesh, a, b.scaled(-1.0))) < dist;
}

/// Critical points from mode-m seeds, m = 1..count, each a local minimax over
/// the span of the previously found solutions and the seed direction.
inline MultiplicityResult symmetric_multiplicity(const Problem& P, const SubspaceLadder& ladder1,
                                                 const SubspaceLadder& ladder2, int count, const SolveConfig& cfg)
{
    cfg.validate();
    if (!(P.A().even && P.B().even && P.G().even))
        throw ConfigError("symmetric multiplicity requires even coefficients and nonlinearity");
    if (count < 1 || static_cast<std::size_t>(count) > ladder1.modes.size()
        || static_cast<std::size_t>(count) > ladder2.modes.size())
        throw ConfigError("ladder depth is smaller than the requested count");
    const Mesh& mesh = P.mesh();
    const double dist = cfg.dedupe_distance > 0.0 ? cfg.dedupe_distance : 1e-2 * mesh.diameter();
    MultiplicityResult out;
    std::vector<State> support;
    for (int m = 1; m <= count; ++m) {
        const auto k = static_cast<std::size_t>(m - 1);
        MinimaxState ms;
        ms.support = support;
        ms.v = State{ladder1.modes[k], cfg.v_mix * ladder2.modes[k], P.p1(), P.p2()};
        SolveResult res;
        try {
            minimax_refine(P, ms, cfg, res);
        } catch (const std::exception& ex) {
            out.warnings.push_back("mode " + std::to_string(m) + ": " + ex.what());
            continue;
        }
        if (res.classification != Classification::converged) {
            out.warnings.push_back("mode " + std::to_string(m) + ": " + to_string(res.classification));
            continue;
        }
        bool dup = false;
        for (const auto& prev : out.solutions)
            dup = dup || is_duplicate(mesh, res.state, prev.state, dist);
        if (dup) {
            out.warnings.push_back("mode " + std::to_string(m) + ": duplicate of an earlier solution");
            continue;
        }
        support.push_back(res.state.scaled(1.0 / h1_norm(P, res.state)));
        out.solutions.push_back(std::move(res));
    }
    std::sort(out.solutions.begin(), out.solutions.end(),
              [](const SolveResult& a, const SolveResult& b) { return a.level < b.level; });
    if (static_cast<int>(out.solutions.size()) < count)
        out.warnings.push_back("found " + std::to_string(out.solutions.size()) + " of " + std::to_string(count)
                               + " requested critical points");
    return out;
}

} // namespace varmp
