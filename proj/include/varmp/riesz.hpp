#pragma once

// Discrete H^1_0 Riesz map: the stiffness matrix of -Laplace on interior
// nodes, factored once per mesh. Dual vectors are full-length nodal arrays
// whose boundary entries are ignored.

#include <varmp/errors.hpp>
#include <varmp/mesh.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace varmp {

namespace detail {

template <class Kernel>
Eigen::SparseMatrix<double> assemble_interior(const Mesh& mesh, Kernel&& kernel)
{
    const auto n = static_cast<Eigen::Index>(mesh.n_interior());
    std::vector<Eigen::Triplet<double>> triplets;
    const int nv = mesh.vertices_per_element();
    triplets.reserve(mesh.n_elements() * nv * nv);
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements()[e];
        for (int a = 0; a < nv; ++a) {
            const int ia = mesh.dof(el[a]);
            if (ia < 0)
                continue;
            for (int b = 0; b < nv; ++b) {
                const int ib = mesh.dof(el[b]);
                if (ib >= 0)
                    triplets.emplace_back(ia, ib, kernel(e, a, b));
            }
        }
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

} // namespace detail

/// Interior stiffness matrix  K_ij = int grad phi_i . grad phi_j.
inline Eigen::SparseMatrix<double> stiffness_matrix(const Mesh& mesh)
{
    return detail::assemble_interior(mesh, [&](std::size_t e, int a, int b) {
        const Vec2& ga = mesh.basis_gradient(e, a);
        const Vec2& gb = mesh.basis_gradient(e, b);
        return mesh.element_measures()[e] * (ga[0] * gb[0] + ga[1] * gb[1]);
    });
}

/// Interior mass matrix with the mesh quadrature rule (exact for P1 x P1).
inline Eigen::SparseMatrix<double> mass_matrix(const Mesh& mesh)
{
    return detail::assemble_interior(mesh, [&](std::size_t e, int a, int b) {
        double s = 0.0;
        for (const auto& q : mesh.quadrature())
            s += q.weight * q.bary[a] * q.bary[b];
        return mesh.element_measures()[e] * s;
    });
}

class RieszMap {
public:
    explicit RieszMap(const Mesh& mesh) : mesh_(&mesh), stiffness_(stiffness_matrix(mesh))
    {
        solver_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(stiffness_);
        if (solver_->info() != Eigen::Success)
            throw std::runtime_error("Riesz system is singular");
    }

    const Mesh& mesh() const noexcept { return *mesh_; }
    const Eigen::SparseMatrix<double>& stiffness() const noexcept { return stiffness_; }

    Eigen::VectorXd restrict(const Field& full) const
    {
        Eigen::VectorXd r(static_cast<Eigen::Index>(mesh_->n_interior()));
        const auto interior = mesh_->interior_nodes();
        for (std::size_t k = 0; k < interior.size(); ++k)
            r[static_cast<Eigen::Index>(k)] = full[interior[k]];
        return r;
    }

    Field extend(const Eigen::VectorXd& interior_values) const
    {
        Field out = mesh_->zero_field();
        const auto interior = mesh_->interior_nodes();
        for (std::size_t k = 0; k < interior.size(); ++k)
            out[interior[k]] = interior_values[static_cast<Eigen::Index>(k)];
        return out;
    }

    /// Primal representative of a nodal dual vector (boundary entries ignored).
    Field represent(const Field& dual) const { return extend(solver_->solve(restrict(dual))); }

    /// Discrete H^1_0 dual norm sqrt(d^T K^{-1} d).
    double dual_norm(const Field& dual) const
    {
        const Eigen::VectorXd d = restrict(dual);
        return std::sqrt(std::max(0.0, d.dot(solver_->solve(d))));
    }

    /// H^1_0 inner product of two Dirichlet fields.
    double inner(const Field& a, const Field& b) const
    {
        return restrict(a).dot(stiffness_ * restrict(b));
    }

    double norm(const Field& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

private:
    const Mesh* mesh_;
    Eigen::SparseMatrix<double> stiffness_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

} // namespace varmp
