#pragma once

// The energy functional J(u,v), its Gateaux differential, the discrete dual
// norm used for all convergence tests, and the truncation maps T_k, R_k.
//
// A(x,u)|grad u|^p1 is integrated with u evaluated at element barycenters;
// G uses the mesh quadrature rule. The differential is the exact derivative
// of this discrete functional.

#include <varmp/errors.hpp>
#include <varmp/mesh.hpp>
#include <varmp/model_set.hpp>
#include <varmp/models.hpp>
#include <varmp/riesz.hpp>
#include <varmp/threads.hpp>

#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>

namespace varmp {

struct State {
    Field u;
    Field v;
    double p1 = 2.0;
    double p2 = 2.0;

    State scaled(double t) const { return {t * u, t * v, p1, p2}; }
};

inline State operator+(const State& a, const State& b) { return {a.u + b.u, a.v + b.v, a.p1, a.p2}; }
inline State operator-(const State& a, const State& b) { return {a.u - b.u, a.v - b.v, a.p1, a.p2}; }

struct EnergyBreakdown {
    double termA = 0.0;
    double termB = 0.0;
    double termG = 0.0;
    double total = 0.0;
};

/// Nodal dual vectors; entries at boundary nodes are zero.
struct Cotangent {
    Field du;
    Field dv;

    double pair(const State& dir) const { return du.dot(dir.u) + dv.dot(dir.v); }
};

struct DualNorm {
    double total = 0.0;
    double part_u = 0.0;
    double part_v = 0.0;
};

/// Mesh, models and the Riesz map bundled for repeated evaluation.
class Problem {
public:
    Problem(const Mesh& mesh, CoefficientModel A, CoefficientModel B, NonlinearityModel G, double p1, double p2)
        : mesh_(&mesh), A_(std::move(A)), B_(std::move(B)), G_(std::move(G)), p1_(p1), p2_(p2),
          riesz_(std::make_shared<RieszMap>(mesh))
    {
        const std::size_t ne = mesh.n_elements();
        bary_.reserve(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            bary_.push_back(mesh.barycenter(e));
            for (const auto& q : mesh.quadrature()) {
                const Point x = mesh.point_at(e, q.bary);
                qpoints_.push_back(x);
                g0_.push_back(G_.g(x, 0.0, 0.0));
            }
        }
    }

    Problem(const Mesh& mesh, const ModelSet& m) : Problem(mesh, m.A, m.B, m.G, m.p1, m.p2) {}

    const Mesh& mesh() const noexcept { return *mesh_; }
    const CoefficientModel& A() const noexcept { return A_; }
    const CoefficientModel& B() const noexcept { return B_; }
    const NonlinearityModel& G() const noexcept { return G_; }
    double p1() const noexcept { return p1_; }
    double p2() const noexcept { return p2_; }
    const RieszMap& riesz() const noexcept { return *riesz_; }
    Point barycenter(std::size_t e) const { return bary_[e]; }
    Point qpoint(std::size_t e, std::size_t k) const { return qpoints_[e * mesh_->quadrature().size() + k]; }
    double g_at_zero(std::size_t e, std::size_t k) const { return g0_[e * mesh_->quadrature().size() + k]; }

    State zero_state() const { return {mesh_->zero_field(), mesh_->zero_field(), p1_, p2_}; }

private:
    const Mesh* mesh_;
    CoefficientModel A_, B_;
    NonlinearityModel G_;
    double p1_, p2_;
    std::shared_ptr<RieszMap> riesz_;
    std::vector<Point> bary_;
    std::vector<Point> qpoints_;
    std::vector<double> g0_;
};

namespace detail {

inline double centroid_value(const Mesh& mesh, const Field& f, std::size_t e)
{
    const auto& el = mesh.elements()[e];
    const int nv = mesh.vertices_per_element();
    double s = 0.0;
    for (int k = 0; k < nv; ++k)
        s += f[el[k]];
    return s / nv;
}

inline void require_finite(double v, std::size_t e, const char* what)
{
    if (!std::isfinite(v))
        throw EvaluationError(std::string("non-finite ") + what + " on element " + std::to_string(e), e);
}

} // namespace detail

inline EnergyBreakdown energy(const Problem& P, const State& s)
{
    const Mesh& mesh = P.mesh();
    mesh.check_field(s.u);
    mesh.check_field(s.v);
    const auto& rule = mesh.quadrature();
    auto gradient_term = [&](const CoefficientModel& C, const Field& f, double p) {
        return deterministic_sum(mesh.n_elements(), [&](std::size_t e) {
            const double g = norm2(mesh.gradient_on(f, e));
            if (g == 0.0)
                return 0.0;
            const double val = mesh.element_measures()[e] * C.evaluate(P.barycenter(e), detail::centroid_value(mesh, f, e))
                             * std::pow(g, p) / p;
            detail::require_finite(val, e, "coefficient integrand");
            return val;
        });
    };
    EnergyBreakdown out;
    out.termA = gradient_term(P.A(), s.u, s.p1);
    out.termB = gradient_term(P.B(), s.v, s.p2);
    out.termG = deterministic_sum(mesh.n_elements(), [&](std::size_t e) {
        double local = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const double u = mesh.value_at(s.u, e, rule[k].bary);
            const double v = mesh.value_at(s.v, e, rule[k].bary);
            local += rule[k].weight * (P.G().g(P.qpoint(e, k), u, v) - P.g_at_zero(e, k));
        }
        const double val = mesh.element_measures()[e] * local;
        detail::require_finite(val, e, "nonlinearity integrand");
        return val;
    });
    out.total = out.termA + out.termB - out.termG;
    return out;
}

inline double energy_value(const Problem& P, const State& s) { return energy(P, s).total; }

/// du[phi_i], dv[phi_i] for every nodal basis function; boundary rows zeroed.
inline Cotangent differential(const Problem& P, const State& s)
{
    const Mesh& mesh = P.mesh();
    mesh.check_field(s.u);
    mesh.check_field(s.v);
    const auto& rule = mesh.quadrature();
    const int nv = mesh.vertices_per_element();
    const std::size_t ne = mesh.n_elements();
    // Per-element local vectors, scattered afterwards in element order.
    std::vector<std::array<double, 6>> local(ne);
    parallel_chunks(ne, 64, [&](std::size_t b, std::size_t end, std::size_t) {
        for (std::size_t e = b; e < end; ++e) {
            std::array<double, 6> loc{};
            const double meas = mesh.element_measures()[e];
            auto gradient_part = [&](const CoefficientModel& C, const Field& f, double p, int offset) {
                const Vec2 g = mesh.gradient_on(f, e);
                const double ng = norm2(g);
                if (ng == 0.0)
                    return;
                const double fc = detail::centroid_value(mesh, f, e);
                const Point xb = P.barycenter(e);
                const double a = C.evaluate(xb, fc);
                const double au = C.derivative(xb, fc);
                const double flux = a * std::pow(ng, p - 2.0);
                const double lower = au * std::pow(ng, p) / p / nv;
                for (int k = 0; k < nv; ++k) {
                    const Vec2& gk = mesh.basis_gradient(e, k);
                    loc[offset + k] += meas * (flux * (g[0] * gk[0] + g[1] * gk[1]) + lower);
                }
            };
            gradient_part(P.A(), s.u, s.p1, 0);
            gradient_part(P.B(), s.v, s.p2, 3);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double u = mesh.value_at(s.u, e, rule[q].bary);
                const double v = mesh.value_at(s.v, e, rule[q].bary);
                const Point x = P.qpoint(e, q);
                const double gu = P.G().gu(x, u, v);
                const double gv = P.G().gv(x, u, v);
                for (int k = 0; k < nv; ++k) {
                    loc[k] -= meas * rule[q].weight * gu * rule[q].bary[k];
                    loc[3 + k] -= meas * rule[q].weight * gv * rule[q].bary[k];
                }
            }
            for (double val : loc)
                detail::require_finite(val, e, "differential");
            local[e] = loc;
        }
    });
    Cotangent c{mesh.zero_field(), mesh.zero_field()};
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& el = mesh.elements()[e];
        for (int k = 0; k < nv; ++k) {
            c.du[el[k]] += local[e][k];
            c.dv[el[k]] += local[e][3 + k];
        }
    }
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
        if (mesh.boundary_mask()[i]) {
            c.du[static_cast<Eigen::Index>(i)] = 0.0;
            c.dv[static_cast<Eigen::Index>(i)] = 0.0;
        }
    return c;
}

/// Component norms by Riesz representation; the total is the sup over the
/// product unit ball {||w||^2 + ||z||^2 <= 1}.
inline DualNorm dual_norm(const Problem& P, const Cotangent& c)
{
    DualNorm n;
    n.part_u = P.riesz().dual_norm(c.du);
    n.part_v = P.riesz().dual_norm(c.dv);
    n.total = std::hypot(n.part_u, n.part_v);
    return n;
}

/// ||u||_W1 + ||v||_W2 + |u|_inf + |v|_inf
inline double norm_X(const Mesh& mesh, const State& s)
{
    return norm_W(mesh, s.u, s.p1) + norm_W(mesh, s.v, s.p2) + norm_Linf(mesh, s.u) + norm_Linf(mesh, s.v);
}

inline double norm_Wpair(const Mesh& mesh, const State& s)
{
    return norm_W(mesh, s.u, s.p1) + norm_W(mesh, s.v, s.p2);
}

inline double cps_from(const Problem& P, const State& s, const Cotangent& c)
{
    return dual_norm(P, c).total * (1.0 + norm_X(P.mesh(), s));
}

inline double cps_quantity(const Problem& P, const State& s) { return cps_from(P, s, differential(P, s)); }

/// Primal descent direction: the Riesz representative of -dJ per component.
inline State riesz_gradient(const Problem& P, const Cotangent& c, const State& like)
{
    return {P.riesz().represent(c.du), P.riesz().represent(c.dv), like.p1, like.p2};
}

// ---------------------------------------------------------------------------
// Truncation

inline double truncate_value(double t, double k) { return std::abs(t) <= k ? t : std::copysign(k, t); }

inline State truncate(const State& s, double k)
{
    if (!(k > 0.0))
        throw std::invalid_argument("truncation level must be positive");
    State out = s;
    out.u = s.u.unaryExpr([k](double t) { return truncate_value(t, k); });
    out.v = s.v.unaryExpr([k](double t) { return truncate_value(t, k); });
    return out;
}

inline State remainder(const State& s, double k)
{
    const State t = truncate(s, k);
    return {s.u - t.u, s.v - t.v, s.p1, s.p2};
}

// ---------------------------------------------------------------------------
// |xi|^{r-2} xi - |eta|^{r-2} eta versus C|xi-eta|(|xi|+|eta|)^{r-2}  (r >= 2)
// or C|xi-eta|^{r-1}  (1 < r <= 2), sampled in the unit ball of R^2.

inline double vector_difference_ratio(double r, const Vec2& xi, const Vec2& eta)
{
    auto map = [r](const Vec2& a) {
        const double n = norm2(a);
        const double f = n == 0.0 ? 0.0 : std::pow(n, r - 2.0);
        return Vec2{f * a[0], f * a[1]};
    };
    const Vec2 a = map(xi), b = map(eta);
    const double num = std::hypot(a[0] - b[0], a[1] - b[1]);
    const double diff = std::hypot(xi[0] - eta[0], xi[1] - eta[1]);
    if (num == 0.0)
        return 0.0;
    const double den = r >= 2.0 ? diff * std::pow(norm2(xi) + norm2(eta), r - 2.0) : std::pow(diff, r - 1.0);
    return num / den;
}

inline double vector_difference_bound(double r, int n_samples, unsigned long long seed = 0)
{
    if (!(r > 1.0))
        throw std::invalid_argument("vector_difference_bound requires r > 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto draw = [&] {
        Vec2 a;
        do {
            a = {unif(rng), unif(rng)};
        } while (norm2(a) > 1.0);
        return a;
    };
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const Vec2 xi = draw(), eta = draw();
        worst = std::max(worst, vector_difference_ratio(r, xi, eta));
    }
    return worst;
}

/// CSV  node,x[,y],u,v,du,dv
inline void write_state_csv(std::ostream& os, const Mesh& mesh, const State& s, const Cotangent& c)
{
    os << (mesh.dimension() == 1 ? "node,x,u,v,du,dv\n" : "node,x,y,u,v,du,dv\n");
    os << std::setprecision(17);
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        os << i << ',' << mesh.nodes()[i].x;
        if (mesh.dimension() == 2)
            os << ',' << mesh.nodes()[i].y;
        os << ',' << s.u[k] << ',' << s.v[k] << ',' << c.du[k] << ',' << c.dv[k] << '\n';
    }
}

} // namespace varmp
