#pragma once

#include "nudged_ns/fespace.hpp"
#include "nudged_ns/linalg.hpp"

#include <span>
#include <vector>

namespace nudged_ns::oracle {

/// Row-major dense matrix.
struct Dense {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Dense() = default;
    Dense(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
};

Dense to_dense(const SparseMatrix& m);
/// Largest entrywise difference; infinity when the shapes differ.
double max_diff(const Dense& a, const Dense& b);
double max_diff(const Dense& a, const SparseMatrix& b);

// Brute-force assembly: the local basis of every cell is obtained by fitting
// monomials to the nodal values, and integrals use a 36-point collapsed Gauss
// rule. Nothing is shared with the production assembler except the dof map.
Dense mass(const FESpace& v);
Dense stiffness(const FESpace& v);
Dense graddiv(const FESpace& v);
Dense div(const FESpace& v, const FESpace& p);
Dense convection(const FESpace& v, std::span<const double> w);
/// Nudging matrix for observation by cell means (centroid = false) or by
/// centroid values (centroid = true) on the coarse mesh.
Dense nudging(const FESpace& v, const Mesh& coarse, bool centroid);
std::vector<double> load(const FESpace& v, const VectorFunction& f, double t);

/// Dense LU solve with partial pivoting; throws SingularMatrixError.
std::vector<double> solve(Dense a, std::vector<double> b);
/// True when the symmetric part passes a Cholesky factorization and the
/// matrix is symmetric to tol.
bool is_spd(const Dense& a, double tol);

} // namespace nudged_ns::oracle
