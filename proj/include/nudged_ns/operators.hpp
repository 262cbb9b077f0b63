#pragma once

#include "nudged_ns/fespace.hpp"
#include "nudged_ns/linalg.hpp"
#include "nudged_ns/observe.hpp"

#include <array>
#include <span>
#include <vector>

namespace nudged_ns {

/// M_ij = (phi_j, phi_i)
SparseMatrix assemble_mass(const FESpace& s);
/// K_ij = (grad phi_j, grad phi_i)
SparseMatrix assemble_stiffness(const FESpace& s);
/// G_ij = (div phi_j, div phi_i); vector spaces only.
SparseMatrix assemble_graddiv(const FESpace& s);
/// B_ij = (r_i, div phi_j), rows indexed by pressure dofs.
SparseMatrix assemble_div(const FESpace& v, const FESpace& p);
/// C(w)_ij = (w . grad phi_j, phi_i) + 1/2 ((div w) phi_j, phi_i)
SparseMatrix assemble_convection(const FESpace& s, std::span<const double> w);
/// N_ij = (I_H phi_j, phi_i)
SparseMatrix assemble_nudging(const FESpace& s, const Observer& obs);

/// Scalar convection block of cell c, row-major over local basis (a, b):
/// entry a*6+b couples test function a with trial function b. The same block
/// acts on each velocity component.
void convection_cell_matrix(const FESpace& s, std::span<const double> w, int c, std::array<double, 36>& out);

/// F_i = (f(t), phi_i) for a vector space.
std::vector<double> assemble_load(const FESpace& s, const VectorFunction& f, double t);

/// m_i = integral of r_i.
std::vector<double> pressure_mean_vector(const FESpace& p);

/// Dirichlet data on the velocity; an empty value function means zero.
struct DirichletBC {
    std::vector<BoundaryTag> tags;
    VectorFunction value;
};

/// Parabolic channel profile (4 U y (H - y) / H^2, 0) with peak U at mid-height.
VectorFunction parabolic_profile(double peak, double height);

/// Prescribed value of every constrained dof, in the order of d.dofs.
std::vector<double> boundary_values(const DirichletDofs& d, const VectorFunction& g, double t);

/// Symmetric row and column elimination of a fixed dof set on a fixed
/// sparsity pattern. Constrained rows become identity rows, the constrained
/// columns move to the right-hand side, and the pattern is left untouched so
/// that repeated application is idempotent.
class DirichletConstraint {
public:
    DirichletConstraint() = default;
    DirichletConstraint(const SparseMatrix& pattern, std::vector<int> dofs);

    const std::vector<int>& dofs() const { return dofs_; }

    void apply(SparseMatrix& a, std::span<double> rhs, std::span<const double> values) const;

private:
    struct ColumnEntry {
        std::ptrdiff_t pos;
        int row;
        int slot;
    };
    int n_ = 0;
    std::vector<int> dofs_;
    std::vector<std::ptrdiff_t> diag_;
    std::vector<ColumnEntry> columns_;
};

/// Impose bc at time t on a system whose leading unknowns are the velocity
/// dofs of v. Throws UnknownTagError when a tag is absent from the mesh.
void apply_dirichlet(SparseMatrix& a, std::vector<double>& rhs, const FESpace& v, const DirichletBC& bc, double t);

} // namespace nudged_ns
