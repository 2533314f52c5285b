#pragma once

// Piecewise-linear conforming discretization of a domain in 1-D (segments) or
// 2-D (triangles), with the quadrature and norms used by the energy code.

#include <varmp/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace varmp {

/// Nodal scalar function. Length equals the owning mesh's node count.
using Field = Eigen::VectorXd;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Vec2 = std::array<double, 2>;

/// One quadrature point of the reference element in barycentric coordinates.
/// Weights sum to one; multiply by the element measure.
struct QuadraturePoint {
    std::array<double, 3> bary{};
    double weight = 0.0;
};

namespace detail {

inline const std::vector<QuadraturePoint>& reference_rule(int dimension)
{
    // 1-D: three-point Gauss-Legendre (degree 5). 2-D: interior three-point rule (degree 2).
    static const std::vector<QuadraturePoint> segment = [] {
        const double a = 0.5 * std::sqrt(3.0 / 5.0);
        return std::vector<QuadraturePoint>{
            {{0.5 + a, 0.5 - a, 0.0}, 5.0 / 18.0},
            {{0.5, 0.5, 0.0}, 8.0 / 18.0},
            {{0.5 - a, 0.5 + a, 0.0}, 5.0 / 18.0},
        };
    }();
    static const std::vector<QuadraturePoint> triangle = {
        {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
        {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
        {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
    };
    return dimension == 1 ? segment : triangle;
}

} // namespace detail

class Mesh {
public:
    using Element = std::array<int, 3>; // segments use the first two entries

    Mesh() = default;

    /// Validates connectivity and precomputes measures and basis gradients.
    Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
         std::vector<bool> boundary_mask)
        : dim_(dimension), nodes_(std::move(nodes)), elements_(std::move(elements)),
          boundary_(std::move(boundary_mask))
    {
        if (dim_ != 1 && dim_ != 2)
            throw std::invalid_argument("mesh dimension must be 1 or 2");
        if (boundary_.size() != nodes_.size())
            throw std::invalid_argument("boundary mask length does not match node count");
        const int nv = dim_ + 1;
        measures_.reserve(elements_.size());
        grads_.reserve(elements_.size());
        for (std::size_t e = 0; e < elements_.size(); ++e) {
            const auto& el = elements_[e];
            for (int k = 0; k < nv; ++k)
                if (el[k] < 0 || static_cast<std::size_t>(el[k]) >= nodes_.size())
                    throw std::invalid_argument("element " + std::to_string(e) + " references a missing node");
            std::array<Vec2, 3> g{};
            double measure = 0.0;
            if (dim_ == 1) {
                const double h = nodes_[el[1]].x - nodes_[el[0]].x;
                measure = std::abs(h);
                g[0] = {-1.0 / h, 0.0};
                g[1] = {1.0 / h, 0.0};
            } else {
                const Point& a = nodes_[el[0]];
                const Point& b = nodes_[el[1]];
                const Point& c = nodes_[el[2]];
                const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
                measure = 0.5 * std::abs(det);
                g[0] = {(b.y - c.y) / det, (c.x - b.x) / det};
                g[1] = {(c.y - a.y) / det, (a.x - c.x) / det};
                g[2] = {(a.y - b.y) / det, (b.x - a.x) / det};
            }
            if (!(measure > 0.0))
                throw std::invalid_argument("element " + std::to_string(e) + " has non-positive measure");
            measures_.push_back(measure);
            grads_.push_back(g);
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            dof_of_node_.push_back(boundary_[i] ? -1 : static_cast<int>(interior_.size()));
            if (!boundary_[i])
                interior_.push_back(static_cast<int>(i));
        }
    }

    int dimension() const noexcept { return dim_; }
    int vertices_per_element() const noexcept { return dim_ + 1; }
    std::size_t n_nodes() const noexcept { return nodes_.size(); }
    std::size_t n_elements() const noexcept { return elements_.size(); }
    std::size_t n_interior() const noexcept { return interior_.size(); }

    std::span<const Point> nodes() const noexcept { return nodes_; }
    std::span<const Element> elements() const noexcept { return elements_; }
    const std::vector<bool>& boundary_mask() const noexcept { return boundary_; }
    std::span<const double> element_measures() const noexcept { return measures_; }
    std::span<const int> interior_nodes() const noexcept { return interior_; }
    /// Interior unknown index of a node, or -1 on the boundary.
    int dof(int node) const noexcept { return dof_of_node_[node]; }

    /// Gradient of the local hat function `local` on element `e`.
    const Vec2& basis_gradient(std::size_t e, int local) const noexcept { return grads_[e][local]; }

    double total_measure() const
    {
        double s = 0.0;
        for (double m : measures_)
            s += m;
        return s;
    }

    Point barycenter(std::size_t e) const
    {
        return point_at(e, dim_ == 1 ? std::array<double, 3>{0.5, 0.5, 0.0}
                                     : std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3});
    }

    Point point_at(std::size_t e, const std::array<double, 3>& bary) const
    {
        Point p;
        for (int k = 0; k < vertices_per_element(); ++k) {
            p.x += bary[k] * nodes_[elements_[e][k]].x;
            p.y += bary[k] * nodes_[elements_[e][k]].y;
        }
        return p;
    }

    const std::vector<QuadraturePoint>& quadrature() const { return detail::reference_rule(dim_); }

    /// Bounding-box diagonal.
    double diameter() const
    {
        double x0 = std::numeric_limits<double>::max(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto& p : nodes_) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        return std::hypot(x1 - x0, y1 - y0);
    }

    void check_field(const Field& f) const
    {
        if (static_cast<std::size_t>(f.size()) != nodes_.size())
            throw std::invalid_argument("field length " + std::to_string(f.size())
                                        + " does not match node count " + std::to_string(nodes_.size()));
    }

    bool is_dirichlet_admissible(const Field& f) const
    {
        check_field(f);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (boundary_[i] && f[static_cast<Eigen::Index>(i)] != 0.0)
                return false;
        return true;
    }

    Field zero_field() const { return Field::Zero(static_cast<Eigen::Index>(nodes_.size())); }

    /// Nodal interpolant of f with boundary values forced to zero.
    Field interpolate_dirichlet(const std::function<double(Point)>& f) const
    {
        Field out = zero_field();
        for (int i : interior_)
            out[i] = f(nodes_[i]);
        return out;
    }

    /// Nodal interpolant of f (no boundary condition applied).
    Field interpolate(const std::function<double(Point)>& f) const
    {
        Field out = zero_field();
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            out[static_cast<Eigen::Index>(i)] = f(nodes_[i]);
        return out;
    }

    /// Value of the piecewise-linear interpolant at barycentric coordinates of element e.
    double value_at(const Field& f, std::size_t e, const std::array<double, 3>& bary) const
    {
        double s = 0.0;
        for (int k = 0; k < vertices_per_element(); ++k)
            s += bary[k] * f[elements_[e][k]];
        return s;
    }

    Vec2 gradient_on(const Field& f, std::size_t e) const
    {
        Vec2 g{0.0, 0.0};
        for (int k = 0; k < vertices_per_element(); ++k) {
            const double fk = f[elements_[e][k]];
            g[0] += fk * grads_[e][k][0];
            g[1] += fk * grads_[e][k][1];
        }
        return g;
    }

private:
    int dim_ = 1;
    std::vector<Point> nodes_;
    std::vector<Element> elements_;
    std::vector<bool> boundary_;
    std::vector<double> measures_;
    std::vector<std::array<Vec2, 3>> grads_;
    std::vector<int> interior_;
    std::vector<int> dof_of_node_;
};

inline Mesh build_interval_mesh(int n_cells, double length = 1.0)
{
    if (n_cells < 2)
        throw std::invalid_argument("interval mesh needs at least 2 cells");
    if (!(length > 0.0))
        throw std::invalid_argument("interval length must be positive");
    std::vector<Point> nodes(n_cells + 1);
    std::vector<Mesh::Element> elements(n_cells);
    std::vector<bool> boundary(n_cells + 1, false);
    for (int i = 0; i <= n_cells; ++i)
        nodes[i] = {length * i / n_cells, 0.0};
    nodes[n_cells].x = length;
    for (int i = 0; i < n_cells; ++i)
        elements[i] = {i, i + 1, -1};
    boundary.front() = boundary.back() = true;
    return Mesh(1, std::move(nodes), std::move(elements), std::move(boundary));
}

/// Unit square, each grid cell split along its (i,j)-(i+1,j+1) diagonal.
inline Mesh build_rect_mesh(int nx, int ny)
{
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("square mesh needs at least 2 cells per direction");
    const int rx = nx + 1;
    auto id = [rx](int i, int j) { return j * rx + i; };
    std::vector<Point> nodes;
    std::vector<bool> boundary;
    nodes.reserve(static_cast<std::size_t>(rx) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            nodes.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});
            boundary.push_back(i == 0 || j == 0 || i == nx || j == ny);
        }
    std::vector<Mesh::Element> elements;
    elements.reserve(2 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return Mesh(2, std::move(nodes), std::move(elements), std::move(boundary));
}

/// Constant gradient of the interpolant on every element.
inline std::vector<Vec2> element_gradient(const Mesh& mesh, const Field& f)
{
    mesh.check_field(f);
    std::vector<Vec2> out(mesh.n_elements());
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
        out[e] = mesh.gradient_on(f, e);
    return out;
}

inline double norm2(const Vec2& g) { return std::hypot(g[0], g[1]); }

/// |grad f|_p, the W_0^{1,p} norm.
inline double norm_W(const Mesh& mesh, const Field& f, double p)
{
    if (!(p > 1.0))
        throw std::invalid_argument("norm_W requires p > 1");
    mesh.check_field(f);
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
        s += mesh.element_measures()[e] * std::pow(norm2(mesh.gradient_on(f, e)), p);
    return std::pow(s, 1.0 / p);
}

/// int |f|^r by the mesh quadrature rule.
inline double integral_abs_pow(const Mesh& mesh, const Field& f, double r)
{
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        double local = 0.0;
        for (const auto& q : mesh.quadrature())
            local += q.weight * std::pow(std::abs(mesh.value_at(f, e, q.bary)), r);
        s += mesh.element_measures()[e] * local;
    }
    return s;
}

inline double norm_Lr(const Mesh& mesh, const Field& f, double r)
{
    if (!(r >= 1.0))
        throw std::invalid_argument("norm_Lr requires r >= 1");
    mesh.check_field(f);
    return std::pow(integral_abs_pow(mesh, f, r), 1.0 / r);
}

inline double norm_Linf(const Mesh& mesh, const Field& f)
{
    mesh.check_field(f);
    return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Plain-text I/O
//
//   dim n_nodes n_elements
//   x [y]            (n_nodes lines)
//   i j [k]          (n_elements lines)
//   b0 b1 ...        (boundary node indices, one line)

inline void write_mesh(std::ostream& os, const Mesh& mesh)
{
    os << std::setprecision(17);
    os << mesh.dimension() << ' ' << mesh.n_nodes() << ' ' << mesh.n_elements() << '\n';
    for (const auto& p : mesh.nodes()) {
        os << p.x;
        if (mesh.dimension() == 2)
            os << ' ' << p.y;
        os << '\n';
    }
    for (const auto& el : mesh.elements()) {
        os << el[0] << ' ' << el[1];
        if (mesh.dimension() == 2)
            os << ' ' << el[2];
        os << '\n';
    }
    bool first = true;
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
        if (mesh.boundary_mask()[i]) {
            os << (first ? "" : " ") << i;
            first = false;
        }
    os << '\n';
}

inline Mesh read_mesh(std::istream& is)
{
    int dim = 0;
    std::size_t nn = 0, ne = 0;
    if (!(is >> dim >> nn >> ne))
        throw ConfigError("mesh file: malformed header");
    std::vector<Point> nodes(nn);
    for (auto& p : nodes) {
        if (!(is >> p.x) || (dim == 2 && !(is >> p.y)))
            throw ConfigError("mesh file: truncated node list");
    }
    std::vector<Mesh::Element> elements(ne, Mesh::Element{-1, -1, -1});
    for (auto& el : elements)
        for (int k = 0; k <= dim; ++k)
            if (!(is >> el[k]))
                throw ConfigError("mesh file: truncated element list");
    std::vector<bool> boundary(nn, false);
    std::size_t b = 0;
    while (is >> b) {
        if (b >= nn)
            throw ConfigError("mesh file: boundary index out of range");
        boundary[b] = true;
    }
    try {
        return Mesh(dim, std::move(nodes), std::move(elements), std::move(boundary));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("mesh file: ") + e.what());
    }
}

inline void write_field(std::ostream& os, const Field& f)
{
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        os << f[i] << '\n';
}

inline Field read_field(std::istream& is)
{
    std::vector<double> values;
    double v = 0.0;
    while (is >> v)
        values.push_back(v);
    return Eigen::Map<const Field>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// Parses `interval:<n>[:<length>]` or `square:<nx>x<ny>`.
inline Mesh mesh_from_spec(const std::string& spec)
{
    auto fail = [&] { return ConfigError("bad mesh spec '" + spec + "'"); };
    try {
        if (spec.rfind("interval:", 0) == 0) {
            const std::string rest = spec.substr(9);
            const auto colon = rest.find(':');
            const int n = std::stoi(rest.substr(0, colon));
            const double len = colon == std::string::npos ? 1.0 : std::stod(rest.substr(colon + 1));
            return build_interval_mesh(n, len);
        }
        if (spec.rfind("square:", 0) == 0) {
            const std::string rest = spec.substr(7);
            const auto x = rest.find('x');
            if (x == std::string::npos)
                throw fail();
            return build_rect_mesh(std::stoi(rest.substr(0, x)), std::stoi(rest.substr(x + 1)));
        }
    } catch (const std::invalid_argument&) {
        throw fail();
    } catch (const std::out_of_range&) {
        throw fail();
    }
    std::ifstream in(spec);
    if (!in)
        throw fail();
    return read_mesh(in);
}

} // namespace varmp
