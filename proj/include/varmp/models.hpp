#pragma once

// Coefficients A(x,u), B(x,v), the coupling potential G(x,u,v), the built-in
// power and logarithmic families, and the growth-exponent bookkeeping.

#include <varmp/errors.hpp>
#include <varmp/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

namespace varmp {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// |t|^e
inline double abs_pow(double t, double e) { return t == 0.0 ? (e == 0.0 ? 1.0 : 0.0) : std::pow(std::abs(t), e); }

/// |t|^{e-2} t, i.e. the derivative of |t|^e / e.
inline double signed_pow(double t, double e) { return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), e - 1.0), t); }

/// Np/(N-p) if p < N, otherwise +infinity (so that 1/p* = 0).
inline double sobolev_conjugate(double p, int N)
{
    if (!(p > 1.0) || N < 1)
        throw std::invalid_argument("sobolev_conjugate requires p > 1 and N >= 1");
    return p < N ? N * p / (N - p) : infinity;
}

using SpatialFunction = std::function<double(Point)>;

inline SpatialFunction constant_function(double c)
{
    return [c](Point) { return c; };
}

/// Piecewise-linear interpolation of a nodal field, evaluable at any point of the mesh.
inline SpatialFunction nodal_function(const Mesh& mesh, Field values)
{
    mesh.check_field(values);
    if (mesh.dimension() == 1) {
        std::vector<double> xs;
        std::vector<double> vs;
        std::vector<std::pair<double, double>> sorted;
        for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
            sorted.emplace_back(mesh.nodes()[i].x, values[static_cast<Eigen::Index>(i)]);
        std::sort(sorted.begin(), sorted.end());
        for (auto& [x, v] : sorted) {
            xs.push_back(x);
            vs.push_back(v);
        }
        return [xs, vs](Point p) {
            auto it = std::upper_bound(xs.begin(), xs.end(), p.x);
            if (it == xs.begin())
                return vs.front();
            if (it == xs.end())
                return vs.back();
            const auto k = static_cast<std::size_t>(it - xs.begin());
            const double t = (p.x - xs[k - 1]) / (xs[k] - xs[k - 1]);
            return (1.0 - t) * vs[k - 1] + t * vs[k];
        };
    }
    // 2-D: bucket elements by bounding box on a uniform grid.
    struct Locator {
        std::vector<Point> nodes;
        std::vector<Mesh::Element> elements;
        Field values;
        double x0 = 0, y0 = 0, dx = 1, dy = 1;
        int nb = 1;
        std::vector<std::vector<int>> buckets;
    };
    auto loc = std::make_shared<Locator>();
    loc->nodes.assign(mesh.nodes().begin(), mesh.nodes().end());
    loc->elements.assign(mesh.elements().begin(), mesh.elements().end());
    loc->values = std::move(values);
    double x1 = -infinity, y1 = -infinity;
    loc->x0 = loc->y0 = infinity;
    for (const auto& p : loc->nodes) {
        loc->x0 = std::min(loc->x0, p.x);
        loc->y0 = std::min(loc->y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    loc->nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(loc->elements.size()))));
    loc->dx = std::max(1e-300, (x1 - loc->x0) / loc->nb);
    loc->dy = std::max(1e-300, (y1 - loc->y0) / loc->nb);
    loc->buckets.resize(static_cast<std::size_t>(loc->nb) * loc->nb);
    auto clampi = [&](double t) { return std::clamp(static_cast<int>(t), 0, loc->nb - 1); };
    for (std::size_t e = 0; e < loc->elements.size(); ++e) {
        double ex0 = infinity, ey0 = infinity, ex1 = -infinity, ey1 = -infinity;
        for (int k = 0; k < 3; ++k) {
            const Point& p = loc->nodes[loc->elements[e][k]];
            ex0 = std::min(ex0, p.x);
            ey0 = std::min(ey0, p.y);
            ex1 = std::max(ex1, p.x);
            ey1 = std::max(ey1, p.y);
        }
        for (int j = clampi((ey0 - loc->y0) / loc->dy); j <= clampi((ey1 - loc->y0) / loc->dy); ++j)
            for (int i = clampi((ex0 - loc->x0) / loc->dx); i <= clampi((ex1 - loc->x0) / loc->dx); ++i)
                loc->buckets[static_cast<std::size_t>(j) * loc->nb + i].push_back(static_cast<int>(e));
    }
    return [loc](Point p) {
        const int i = std::clamp(static_cast<int>((p.x - loc->x0) / loc->dx), 0, loc->nb - 1);
        const int j = std::clamp(static_cast<int>((p.y - loc->y0) / loc->dy), 0, loc->nb - 1);
        double best = -infinity, best_value = 0.0;
        for (int e : loc->buckets[static_cast<std::size_t>(j) * loc->nb + i]) {
            const auto& el = loc->elements[e];
            const Point &a = loc->nodes[el[0]], &b = loc->nodes[el[1]], &c = loc->nodes[el[2]];
            const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
            const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
            const double l0 = 1.0 - l1 - l2;
            const double inside = std::min({l0, l1, l2});
            if (inside > best) {
                best = inside;
                best_value = l0 * loc->values[el[0]] + l1 * loc->values[el[1]] + l2 * loc->values[el[2]];
            }
        }
        return best_value;
    };
}

/// A(x,u) with its u-derivative. `power` is set for the A1 + A2|u|^gamma family.
struct CoefficientModel {
    struct PowerData {
        SpatialFunction a1;
        SpatialFunction a2;
        double a1_min = 0.0;
        double a1_max = 0.0;
        double a2_min = 0.0;
        double a2_max = 0.0;
    };

    std::function<double(Point, double)> evaluate;
    std::function<double(Point, double)> derivative;
    double mu0 = 0.0;
    double gamma = 0.0;
    bool even = false;
    std::string family_tag = "custom";
    std::optional<PowerData> power;

    double operator()(Point x, double u) const { return evaluate(x, u); }
};

/// Sampled range of a spatial coefficient (min, max) over a mesh's nodes, or
/// the constant itself when no mesh is given.
struct CoefficientRange {
    double min = 0.0;
    double max = 0.0;
};

/// A(x,u) = A1(x) + A2(x)|u|^gamma with A1 >= mu0 > 0, A2 >= 0.
inline CoefficientModel power_coefficient(SpatialFunction a1, CoefficientRange a1_range, SpatialFunction a2,
                                          CoefficientRange a2_range, double gamma)
{
    if (!(gamma > 1.0))
        throw std::invalid_argument("power coefficient requires gamma > 1 (ex05)");
    if (!(a1_range.min > 0.0))
        throw std::invalid_argument("power coefficient requires A1 >= mu0 > 0 (ex03)");
    if (a2_range.min < 0.0)
        throw std::invalid_argument("power coefficient requires A2 >= 0 (ex03)");
    CoefficientModel m;
    m.evaluate = [a1, a2, gamma](Point x, double u) { return a1(x) + a2(x) * abs_pow(u, gamma); };
    m.derivative = [a2, gamma](Point x, double u) { return gamma * a2(x) * signed_pow(u, gamma); };
    m.mu0 = a1_range.min;
    m.gamma = gamma;
    m.even = true;
    m.family_tag = "power";
    m.power = CoefficientModel::PowerData{std::move(a1), std::move(a2), a1_range.min, a1_range.max, a2_range.min, a2_range.max};
    return m;
}

inline CoefficientModel power_coefficient(double a1, double a2, double gamma)
{
    return power_coefficient(constant_function(a1), {a1, a1}, constant_function(a2), {a2, a2}, gamma);
}

/// Power coefficient with nodal A1, A2 interpolated element-wise on `mesh`.
inline CoefficientModel power_coefficient(const Mesh& mesh, const Field& a1, const Field& a2, double gamma)
{
    return power_coefficient(nodal_function(mesh, a1), {a1.minCoeff(), a1.maxCoeff()}, nodal_function(mesh, a2),
                             {a2.minCoeff(), a2.maxCoeff()}, gamma);
}

/// G(x,u,v) with partial derivatives and the declared structural metadata.
struct NonlinearityModel {
    std::function<double(Point, double, double)> g;
    std::function<double(Point, double, double)> gu;
    std::function<double(Point, double, double)> gv;
    double q1 = 1.0, q2 = 1.0;
    double s1 = 0.0, s2 = 0.0;
    double sigma = 0.0; ///< growth constant if known; otherwise estimated by sampling
    double theta1 = 0.0, theta2 = 0.0;
    double R = 1.0;
    bool even = false;
    std::string family_tag = "custom";
    // family parameters (power / log)
    double gamma3 = 0.0, gamma4 = 0.0, c_star = 0.0, scale = 1.0;

    double operator()(Point x, double u, double v) const { return g(x, u, v); }
};

namespace detail {

inline void require_family_exponents(double q1, double q2, double gamma3, double gamma4)
{
    if (!(q1 > 1.0 && q2 > 1.0 && gamma3 > 1.0 && gamma4 > 1.0))
        throw std::invalid_argument("violated (ex13): need q1, q2, gamma3, gamma4 > 1");
    if (!(gamma3 < q1 && gamma4 < q2))
        throw std::invalid_argument("violated (ex17): need gamma3 < q1 and gamma4 < q2");
}

} // namespace detail

/// G = scale (|u|^q1 + c*|u|^g3|v|^g4 + |v|^q2).
inline NonlinearityModel power_nonlinearity(double q1, double q2, double gamma3, double gamma4, double c_star,
                                            double theta1, double theta2, double R, double scale = 1.0)
{
    detail::require_family_exponents(q1, q2, gamma3, gamma4);
    if (!(scale > 0.0))
        throw std::invalid_argument("nonlinearity scale must be positive");
    NonlinearityModel m;
    m.g = [=](Point, double u, double v) {
        return scale * (abs_pow(u, q1) + c_star * abs_pow(u, gamma3) * abs_pow(v, gamma4) + abs_pow(v, q2));
    };
    m.gu = [=](Point, double u, double v) {
        return scale * (q1 * signed_pow(u, q1) + gamma3 * c_star * signed_pow(u, gamma3) * abs_pow(v, gamma4));
    };
    m.gv = [=](Point, double u, double v) {
        return scale * (gamma4 * c_star * abs_pow(u, gamma3) * signed_pow(v, gamma4) + q2 * signed_pow(v, q2));
    };
    m.q1 = q1;
    m.q2 = q2;
    // Young's inequality bound on the cross term; an uncoupled model needs none.
    m.s1 = c_star == 0.0 ? 0.0 : gamma4 * (q1 - 1.0) / (q1 - gamma3);
    m.s2 = c_star == 0.0 ? 0.0 : gamma3 * (q2 - 1.0) / (q2 - gamma4);
    m.theta1 = theta1;
    m.theta2 = theta2;
    m.R = R;
    m.even = true;
    m.family_tag = "power";
    m.gamma3 = gamma3;
    m.gamma4 = gamma4;
    m.c_star = c_star;
    m.scale = scale;
    return m;
}

/// G = scale (|u|^q1 + |u|^g3 log(v^2+1) + log(u^2+1)|v|^g4 + |v|^q2).
inline NonlinearityModel log_nonlinearity(double q1, double q2, double gamma3, double gamma4, double theta1,
                                          double theta2, double R, double scale = 1.0)
{
    detail::require_family_exponents(q1, q2, gamma3, gamma4);
    if (!(scale > 0.0))
        throw std::invalid_argument("nonlinearity scale must be positive");
    NonlinearityModel m;
    m.g = [=](Point, double u, double v) {
        return scale * (abs_pow(u, q1) + abs_pow(u, gamma3) * std::log1p(v * v) + std::log1p(u * u) * abs_pow(v, gamma4)
                        + abs_pow(v, q2));
    };
    m.gu = [=](Point, double u, double v) {
        return scale * (q1 * signed_pow(u, q1) + gamma3 * signed_pow(u, gamma3) * std::log1p(v * v)
                        + 2.0 * u / (u * u + 1.0) * abs_pow(v, gamma4));
    };
    m.gv = [=](Point, double u, double v) {
        return scale * (abs_pow(u, gamma3) * 2.0 * v / (v * v + 1.0) + gamma4 * std::log1p(u * u) * signed_pow(v, gamma4)
                        + q2 * signed_pow(v, q2));
    };
    m.q1 = q1;
    m.q2 = q2;
    m.s1 = gamma4;
    m.s2 = gamma3;
    m.theta1 = theta1;
    m.theta2 = theta2;
    m.R = R;
    m.even = true;
    m.family_tag = "log";
    m.gamma3 = gamma3;
    m.gamma4 = gamma4;
    m.scale = scale;
    return m;
}

// ---------------------------------------------------------------------------
// Growth exponents

struct GrowthExponents {
    double p1 = 2.0, p2 = 2.0;
    int N = 1;
    double p1_star = infinity, p2_star = infinity;
    double s3 = 0.0, s4 = 0.0, s5 = 0.0, s6 = 0.0;
    double qbar1 = 0.0, qbar2 = 0.0;
    /// Admissible open interval the s3 (resp. s5) choice was taken from.
    double s3_lo = 1.0, s3_hi = infinity, s5_lo = 1.0, s5_hi = infinity;

    bool operator==(const GrowthExponents&) const = default;
};

/// Upper bound (p_a/N)(1 - 1/p_a*) p_b* of the coupling exponent window.
inline double coupling_bound(double pa, double pb, int N)
{
    const double pa_star = sobolev_conjugate(pa, N);
    const double pb_star = sobolev_conjugate(pb, N);
    const double factor = (pa / N) * (1.0 - 1.0 / pa_star);
    return std::isinf(pb_star) ? infinity : factor * pb_star;
}

namespace detail {

// Young pair (s_lo, s_hi) for |a||b|^s <= |a|^t/t + (t-1)/t |b|^{s t/(t-1)}.
inline std::pair<double, double> young_exponents(double s, double pa, double pb_star, double pa_star, int N,
                                                 double qa, double& lo, double& hi)
{
    lo = std::isinf(pb_star) ? 1.0 : pa * pb_star / (pa * pb_star - N * s);
    hi = pa_star;
    double t = std::isinf(hi) ? std::max(qa, lo + 1.0) : 0.5 * (lo + hi);
    if (s == 0.0)
        return {t, 0.0};
    return {t, s * t / (t - 1.0)};
}

} // namespace detail

/// Auxiliary exponents s3..s6 and the effective growth exponents qbar_i.
inline GrowthExponents derive_exponents(double p1, double p2, int N, double q1, double q2, double s1, double s2)
{
    GrowthExponents out;
    out.p1 = p1;
    out.p2 = p2;
    out.N = N;
    out.p1_star = sobolev_conjugate(p1, N);
    out.p2_star = sobolev_conjugate(p2, N);
    auto fmt = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    if (!(q1 >= 1.0 && q1 < out.p1_star))
        throw WindowEmptyError("crit_exp", "(crit_exp) violated: need 1 <= q1 < p1* = " + fmt(out.p1_star) + ", got q1 = " + fmt(q1));
    if (!(q2 >= 1.0 && q2 < out.p2_star))
        throw WindowEmptyError("crit_exp", "(crit_exp) violated: need 1 <= q2 < p2* = " + fmt(out.p2_star) + ", got q2 = " + fmt(q2));
    const double b1 = coupling_bound(p1, p2, N);
    const double b2 = coupling_bound(p2, p1, N);
    if (!(s1 >= 0.0 && s1 < b1))
        throw WindowEmptyError("crit_expi", "(crit_expi) violated: need 0 <= s1 < " + fmt(b1) + ", got s1 = " + fmt(s1));
    if (!(s2 >= 0.0 && s2 < b2))
        throw WindowEmptyError("crit_expi", "(crit_expi) violated: need 0 <= s2 < " + fmt(b2) + ", got s2 = " + fmt(s2));
    std::tie(out.s3, out.s4) = detail::young_exponents(s1, p1, out.p2_star, out.p1_star, N, q1, out.s3_lo, out.s3_hi);
    std::tie(out.s5, out.s6) = detail::young_exponents(s2, p2, out.p1_star, out.p2_star, N, q2, out.s5_lo, out.s5_hi);
    out.qbar1 = std::max({q1, out.s3, out.s6});
    out.qbar2 = std::max({q2, out.s4, out.s5});
    return out;
}

// ---------------------------------------------------------------------------
// Model declaration files:  key = value  per line, '#' comments.

struct ModelSpec {
    std::string family = "power"; // power | log
    double p1 = 2.0, p2 = 2.0;
    double q1 = 4.0, q2 = 4.0;
    double gamma1 = 1.5, gamma2 = 1.5, gamma3 = 2.0, gamma4 = 2.0;
    double c_star = 0.0;
    std::optional<double> theta1, theta2;
    double R = 1.0;
    int N = 3;
    double a1 = 1.0, a2 = 1.0, b1 = 1.0, b2 = 1.0;
    double g_scale = 1.0;
};

inline ModelSpec parse_model_spec(std::istream& in)
{
    static const std::set<std::string> required = {"family", "p1", "p2", "q1", "q2", "gamma1",
                                                    "gamma2", "gamma3", "gamma4", "N"};
    ModelSpec s;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
        };
        if (trim(line).empty())
            continue;
        if (eq == std::string::npos)
            throw ConfigError("model file line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError("model file: duplicate key '" + key + "'");
        auto number = [&]() {
            try {
                std::size_t used = 0;
                const double v = std::stod(value, &used);
                if (used != value.size())
                    throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("model file: key '" + key + "' expects a number, got '" + value + "'");
            }
        };
        if (key == "family") {
            if (value != "power" && value != "log")
                throw ConfigError("model file: unknown family '" + value + "'");
            s.family = value;
        } else if (key == "p1") s.p1 = number();
        else if (key == "p2") s.p2 = number();
        else if (key == "q1") s.q1 = number();
        else if (key == "q2") s.q2 = number();
        else if (key == "gamma1") s.gamma1 = number();
        else if (key == "gamma2") s.gamma2 = number();
        else if (key == "gamma3") s.gamma3 = number();
        else if (key == "gamma4") s.gamma4 = number();
        else if (key == "c_star") s.c_star = number();
        else if (key == "theta1") s.theta1 = number();
        else if (key == "theta2") s.theta2 = number();
        else if (key == "R") s.R = number();
        else if (key == "N") {
            const double n = number();
            if (n != std::floor(n) || n < 1)
                throw ConfigError("model file: N must be a positive integer");
            s.N = static_cast<int>(n);
        } else if (key == "a1") s.a1 = number();
        else if (key == "a2") s.a2 = number();
        else if (key == "b1") s.b1 = number();
        else if (key == "b2") s.b2 = number();
        else if (key == "g_scale") s.g_scale = number();
        else
            throw ConfigError("model file: unknown key '" + key + "'");
    }
    for (const auto& k : required)
        if (!seen.count(k))
            throw ConfigError("model file: missing required key '" + k + "'");
    if (!(s.p1 > 1.0 && s.p2 > 1.0))
        throw ConfigError("model file: p1, p2 must exceed 1");
    if (!(s.R >= 1.0))
        throw ConfigError("model file: R must be >= 1");
    return s;
}

} // namespace varmp
