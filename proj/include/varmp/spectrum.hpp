#pragma once

// Rayleigh-type quotients  F_r(xi) = int|grad xi|^p / (int|xi|^r)^{p/r}
// minimized by H^1_0-preconditioned descent: the first eigenpair of -Delta_p
// (r = p), embedding constants tau_{p,r} = (min F_r)^{-1/p}, a surrogate
// subspace ladder, and the multiplicity radius.

#include <varmp/errors.hpp>
#include <varmp/mesh.hpp>
#include <varmp/models.hpp>
#include <varmp/riesz.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace varmp {

struct SpectralResult {
    double lambda = 0.0;
    Field phi;
    double residual = 0.0;
    int iterations = 0;
};

struct QuotientOptions {
    double tol = 1e-8;
    int max_iters = 20000;
};

namespace detail {

struct QuotientParts {
    double W = 0.0; ///< int |grad xi|^p
    double L = 0.0; ///< int |xi|^r
};

inline QuotientParts quotient_parts(const Mesh& mesh, const Field& xi, double p, double r)
{
    double W = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
        W += mesh.element_measures()[e] * std::pow(norm2(mesh.gradient_on(xi, e)), p);
    return {W, integral_abs_pow(mesh, xi, r)};
}

inline double quotient_value(const QuotientParts& q, double p, double r) { return q.W / std::pow(q.L, p / r); }

/// Nodal gradient of F_r at xi (boundary entries zero).
inline Field quotient_gradient(const Mesh& mesh, const Field& xi, double p, double r, const QuotientParts& q)
{
    Field dW = mesh.zero_field();
    Field dL = mesh.zero_field();
    const int nv = mesh.vertices_per_element();
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements()[e];
        const double meas = mesh.element_measures()[e];
        const Vec2 g = mesh.gradient_on(xi, e);
        const double ng = norm2(g);
        if (ng > 0.0) {
            const double f = p * std::pow(ng, p - 2.0);
            for (int k = 0; k < nv; ++k) {
                const Vec2& gk = mesh.basis_gradient(e, k);
                dW[el[k]] += meas * f * (g[0] * gk[0] + g[1] * gk[1]);
            }
        }
        for (const auto& qp : mesh.quadrature()) {
            const double val = mesh.value_at(xi, e, qp.bary);
            const double w = meas * qp.weight * r * signed_pow(val, r);
            for (int k = 0; k < nv; ++k)
                dL[el[k]] += w * qp.bary[k];
        }
    }
    const double scale = std::pow(q.L, p / r);
    Field out = (dW - (p / r) * (q.W / q.L) * dL) / scale;
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
        if (mesh.boundary_mask()[i])
            out[static_cast<Eigen::Index>(i)] = 0.0;
    return out;
}

/// Linear constraints C^T w = 0 on interior values, with K-orthogonal projection.
class ConstraintProjector {
public:
    ConstraintProjector(const RieszMap& riesz, const Eigen::MatrixXd& C) : riesz_(&riesz), C_(C)
    {
        if (C_.cols() == 0)
            return;
        Z_.resize(C_.rows(), C_.cols());
        for (Eigen::Index j = 0; j < C_.cols(); ++j)
            Z_.col(j) = riesz_->restrict(riesz_->represent(riesz_->extend(C_.col(j))));
        S_ = (C_.transpose() * Z_).ldlt();
    }

    Field project(const Field& d) const
    {
        if (C_.cols() == 0)
            return d;
        const Eigen::VectorXd di = riesz_->restrict(d);
        return riesz_->extend(di - Z_ * S_.solve(C_.transpose() * di));
    }

private:
    const RieszMap* riesz_;
    Eigen::MatrixXd C_, Z_;
    Eigen::LDLT<Eigen::MatrixXd> S_;
};

/// Approximate minimizer of phi on t > 0 starting from t0: bracket by
/// doubling/halving, then one parabolic refinement. Returns (0, phi0) if no
/// decrease is found.
template <class Phi>
std::pair<double, double> line_minimize(Phi&& phi, double phi0, double t0)
{
    double a = 0.0, fa = phi0;
    double b = t0, fb = phi(b);
    int guard = 0;
    while (!(fb < phi0) && guard++ < 60) {
        b *= 0.5;
        fb = phi(b);
    }
    if (!(fb < phi0))
        return {0.0, phi0};
    double cpt = 2.0 * b, fc = phi(cpt);
    guard = 0;
    while (fc < fb && guard++ < 30) {
        a = b;
        fa = fb;
        b = cpt;
        fb = fc;
        cpt = 2.0 * b;
        fc = phi(cpt);
    }
    // Parabola through (a, fa), (b, fb), (cpt, fc) with fb below both ends.
    double best_t = b, best_f = fb;
    const double num = (b - a) * (b - a) * (fb - fc) - (b - cpt) * (b - cpt) * (fb - fa);
    const double den = (b - a) * (fb - fc) - (b - cpt) * (fb - fa);
    if (den != 0.0) {
        const double t = b - 0.5 * num / den;
        if (t > a && t < cpt) {
            const double ft = phi(t);
            if (ft < best_f) {
                best_t = t;
                best_f = ft;
            }
        }
    }
    return {best_t, best_f};
}

inline Field normalized_Lr(const Mesh& mesh, const Field& xi, double r)
{
    const double n = norm_Lr(mesh, xi, r);
    return xi / n;
}

/// Minimizes F_r from `start` subject to the projector's constraints.
inline SpectralResult minimize_quotient(const RieszMap& riesz, Field xi, double p, double r,
                                        const ConstraintProjector* proj, const QuotientOptions& opt)
{
    const Mesh& mesh = riesz.mesh();
    if (proj)
        xi = proj->project(xi);
    xi = normalized_Lr(mesh, xi, r);
    QuotientParts q = quotient_parts(mesh, xi, p, r);
    double F = quotient_value(q, p, r);
    double step = 1.0 / p;
    int stagnant = 0;
    SpectralResult out;
    for (int it = 0; it < opt.max_iters; ++it) {
        const Field grad = quotient_gradient(mesh, xi, p, r, q);
        Field d = -riesz.represent(grad);
        if (proj)
            d = proj->project(d);
        const double slope = grad.dot(d);
        const double xnorm = riesz.norm(xi);
        out.residual = std::sqrt(std::max(0.0, -slope)) * xnorm / F;
        out.iterations = it;
        if (out.residual <= opt.tol)
            break;
        if (!(slope < 0.0))
            break;
        auto phi = [&](double t) {
            const double v = quotient_value(quotient_parts(mesh, xi + t * d, p, r), p, r);
            return std::isfinite(v) ? v : infinity;
        };
        const auto [t, Ft] = line_minimize(phi, F, step);
        if (t > 0.0) {
            const double before = F;
            xi = normalized_Lr(mesh, xi + t * d, r);
            q = quotient_parts(mesh, xi, p, r);
            F = quotient_value(q, p, r);
            step = t;
            // Roundoff floor: the quotient no longer moves.
            stagnant = before - F <= 1e-14 * std::abs(before) ? stagnant + 1 : 0;
            if (stagnant >= 5 && out.residual <= 1e-5)
                break;
        } else {
            // No representable decrease left: accept only if already near-stationary.
            if (out.residual <= 1e-5)
                break;
            throw ConvergenceError("quotient descent: line search failed", F);
        }
        if (it + 1 == opt.max_iters && out.residual > 1e-5)
            throw ConvergenceError("quotient descent: iteration cap reached", F);
    }
    out.lambda = F;
    out.phi = xi;
    return out;
}

inline Field positive_bump(const Mesh& mesh)
{
    Field f = mesh.zero_field();
    for (int i : mesh.interior_nodes())
        f[i] = 1.0;
    return f;
}

} // namespace detail

/// lambda_1 of -Delta_p with phi > 0 in the interior and |phi|_p = 1.
inline SpectralResult first_eigenpair(double p, const Mesh& mesh, double tol = 1e-8,
                                      const std::optional<Field>& initial = std::nullopt)
{
    if (!(p > 1.0))
        throw std::invalid_argument("first_eigenpair requires p > 1");
    if (!(tol > 0.0))
        throw std::invalid_argument("first_eigenpair requires tol > 0");
    const RieszMap riesz(mesh);
    QuotientOptions opt;
    opt.tol = tol;
    SpectralResult res = detail::minimize_quotient(riesz, initial.value_or(detail::positive_bump(mesh)), p, p, nullptr, opt);
    if (res.phi.sum() < 0.0)
        res.phi = -res.phi;
    return res;
}

/// Rayleigh quotient |grad xi|_p^p / |xi|_p^p.
inline double rayleigh_quotient(const Mesh& mesh, const Field& xi, double p)
{
    return detail::quotient_value(detail::quotient_parts(mesh, xi, p, p), p, p);
}

/// Whether |xi|_r <= tau ||xi||_W holds for (p, r) in the mesh's dimension.
inline bool embedding_admissible(double p, double r, int N)
{
    const double ps = sobolev_conjugate(p, N);
    return r >= 1.0 && r <= ps && std::isfinite(r);
}

/// tau = sup |xi|_r / ||xi||_W over the discrete space.
inline double embedding_constant(double p, double r, const Mesh& mesh, double tol = 1e-8)
{
    if (!(p > 1.0) || !embedding_admissible(p, r, mesh.dimension()))
        throw std::invalid_argument("embedding_constant: r outside [1, p*]");
    const RieszMap riesz(mesh);
    QuotientOptions opt;
    opt.tol = tol;
    const auto res = detail::minimize_quotient(riesz, detail::positive_bump(mesh), p, r, nullptr, opt);
    return std::pow(res.lambda, -1.0 / p);
}

// ---------------------------------------------------------------------------
// Subspace ladder

struct SubspaceLadder {
    double p = 2.0;
    std::vector<Field> basis;       ///< psi_1 .. psi_m
    std::vector<double> lambda_hat; ///< lambda_hat[k-1] = min quotient over Y_{k-1}
    std::vector<Field> modes;       ///< Laplacian modes 1 .. m (sign-normalized)
    std::vector<double> mode_eigenvalues;
};

/// Lowest `count` Dirichlet-Laplacian eigenpairs (K x = lambda M x on interior nodes).
inline std::pair<std::vector<double>, std::vector<Field>> laplacian_modes(const Mesh& mesh, int count)
{
    const auto n = static_cast<Eigen::Index>(mesh.n_interior());
    if (count < 1 || count > n)
        throw std::invalid_argument("requested mode count exceeds interior node count");
    const Eigen::MatrixXd K = Eigen::MatrixXd(stiffness_matrix(mesh));
    const Eigen::MatrixXd M = Eigen::MatrixXd(mass_matrix(mesh));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("Laplacian eigen solve failed");
    const RieszMap riesz(mesh);
    std::vector<double> vals;
    std::vector<Field> vecs;
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd x = es.eigenvectors().col(k);
        // Sign convention: first significant interior value positive.
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (std::abs(x[i]) > 1e-8 * x.cwiseAbs().maxCoeff()) {
                if (x[i] < 0.0)
                    x = -x;
                break;
            }
        vals.push_back(es.eigenvalues()[k]);
        vecs.push_back(riesz.extend(x));
    }
    return {vals, vecs};
}

namespace detail {

inline Eigen::MatrixXd mass_constraints(const Mesh& mesh, const RieszMap& riesz, const std::vector<Field>& psi,
                                        std::size_t count)
{
    const Eigen::SparseMatrix<double> M = mass_matrix(mesh);
    Eigen::MatrixXd C(static_cast<Eigen::Index>(mesh.n_interior()), static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j)
        C.col(static_cast<Eigen::Index>(j)) = M * riesz.restrict(psi[j]);
    return C;
}

} // namespace detail

inline SubspaceLadder subspace_ladder(double p, const Mesh& mesh, int m, double tol = 1e-8)
{
    if (m < 1)
        throw std::invalid_argument("ladder depth must be at least 1");
    if (static_cast<std::size_t>(m) > mesh.n_interior())
        throw std::invalid_argument("ladder depth exceeds interior node count");
    SubspaceLadder L;
    L.p = p;
    const auto first = first_eigenpair(p, mesh, tol);
    std::tie(L.mode_eigenvalues, L.modes) = laplacian_modes(mesh, m);
    L.basis.push_back(first.phi);
    L.lambda_hat.push_back(first.lambda);
    const RieszMap riesz(mesh);
    QuotientOptions opt;
    opt.tol = tol;
    for (int k = 2; k <= m; ++k) {
        L.basis.push_back(L.modes[static_cast<std::size_t>(k - 1)]);
        const Eigen::MatrixXd C = detail::mass_constraints(mesh, riesz, L.basis, static_cast<std::size_t>(k - 1));
        const detail::ConstraintProjector proj(riesz, C);
        const auto res = detail::minimize_quotient(riesz, L.modes[static_cast<std::size_t>(k - 1)], p, p, &proj, opt);
        L.lambda_hat.push_back(res.lambda);
    }
    return L;
}

struct LadderCheck {
    bool pass = false;
    double min_quotient = 0.0;
    double bound = 0.0;
    int samples = 0;
};

/// Samples random smooth fields in Y_m = {w : psi_j^T M w = 0, j <= m} and
/// compares their p-quotients with lambda_hat[m+1].
inline LadderCheck ladder_inequality_check(const SubspaceLadder& ladder, const Mesh& mesh, int m, int n_samples,
                                           unsigned long long seed = 0, double rel_tol = 1e-6)
{
    if (m < 0 || static_cast<std::size_t>(m) >= ladder.lambda_hat.size())
        throw std::invalid_argument("ladder too short for the requested check");
    const RieszMap riesz(mesh);
    const int n_modes = static_cast<int>(std::min<std::size_t>(mesh.n_interior(), static_cast<std::size_t>(4 * m + 12)));
    const auto [vals, modes] = laplacian_modes(mesh, n_modes);
    const Eigen::MatrixXd C = detail::mass_constraints(mesh, riesz, ladder.basis, static_cast<std::size_t>(m));
    const detail::ConstraintProjector proj(riesz, C);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    LadderCheck out;
    out.bound = ladder.lambda_hat[static_cast<std::size_t>(m)];
    out.min_quotient = infinity;
    for (int s = 0; s < n_samples; ++s) {
        Field w = mesh.zero_field();
        for (int k = 0; k < n_modes; ++k)
            w += normal(rng) / (1.0 + k) * modes[static_cast<std::size_t>(k)];
        w = proj.project(w);
        if (norm_Linf(mesh, w) == 0.0)
            continue;
        out.min_quotient = std::min(out.min_quotient, rayleigh_quotient(mesh, w, ladder.p));
        ++out.samples;
    }
    out.pass = out.min_quotient >= out.bound * (1.0 - rel_tol);
    return out;
}

// ---------------------------------------------------------------------------
// Multiplicity radius

struct RadiusReport {
    double r_m = 0.0;
    double lambda_bar = 0.0;
    double r1 = 0.0, r2 = 0.0;
    double mu0_bar = 0.0;
    double p = 0.0, q = 0.0;
};

/// Interpolation exponent r with r/p + (qbar - r)/p_star = 1.
inline double interpolation_exponent(double p, double qbar, double p_star)
{
    if (std::isinf(p_star))
        return p;
    return (1.0 - qbar / p_star) / (1.0 / p - 1.0 / p_star);
}

inline double radius_formula(double mu0_bar, double lambda_bar, double p, double q, double C3)
{
    if (!(q > p))
        throw std::invalid_argument("multiplicity radius requires q > p");
    return std::pow(mu0_bar * lambda_bar / (std::pow(2.0, p + 1.0) * C3), 1.0 / (q - p));
}

/// r_m from ladder values lambda_hat_{i,m+1}; p_i* are the values used for
/// the interpolation exponents.
inline RadiusReport multiplicity_radius(double mu0, double p1, double p2, double qbar1, double qbar2,
                                        double lambda1_next, double lambda2_next, double p1_star, double p2_star,
                                        double C3)
{
    RadiusReport out;
    out.p = std::min(p1, p2);
    out.q = std::max(qbar1, qbar2);
    out.mu0_bar = std::min(mu0 / p1, mu0 / p2);
    out.r1 = interpolation_exponent(p1, qbar1, p1_star);
    out.r2 = interpolation_exponent(p2, qbar2, p2_star);
    out.lambda_bar = std::min(std::pow(lambda1_next, out.r1 / p1), std::pow(lambda2_next, out.r2 / p2));
    out.r_m = radius_formula(out.mu0_bar, out.lambda_bar, out.p, out.q, C3);
    return out;
}

/// Finite stand-in for p* in the interpolation step when p >= dimension.
inline double effective_conjugate(double p, double qbar, int dimension)
{
    const double ps = sobolev_conjugate(p, dimension);
    return std::isinf(ps) ? 2.0 * qbar : ps;
}

/// Sampled C1 with G <= C1 (1 + |u|^qbar1 + |v|^qbar2) on the box.
inline double growth_constant(const NonlinearityModel& G, double qbar1, double qbar2, double half_width,
                              unsigned long long seed = 0, int n = 4000)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    double c = 0.0;
    const Point x{0.5, 0.5};
    auto visit = [&](double u, double v) {
        c = std::max(c, (G.g(x, u, v) - G.g(x, 0, 0)) / (1.0 + abs_pow(u, qbar1) + abs_pow(v, qbar2)));
    };
    for (int k = 0; k < n; ++k)
        visit(unif(rng), unif(rng));
    for (double r = half_width; r <= 1e6 * half_width; r *= 10.0) {
        visit(r, 0.0);
        visit(0.0, r);
        visit(r, r);
    }
    return c;
}

/// C3 = C1 * max_i tau_{i, p_i*}^{qbar_i - r_i}.
inline double estimate_c3(double C1, double tau1, double tau2, double qbar1, double qbar2, double r1, double r2)
{
    return C1 * std::max(std::pow(tau1, qbar1 - r1), std::pow(tau2, qbar2 - r2));
}

} // namespace varmp
