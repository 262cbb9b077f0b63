#pragma once

#include "nudged_ns/mesh.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nudged_ns {

using Vec2 = std::array<double, 2>;
using Bary = std::array<double, 3>;

using ScalarFunction = std::function<double(double x, double y, double t)>;
using VectorFunction = std::function<Vec2(double x, double y, double t)>;

enum class Family { P1, P2, P1disc, P0disc };

const char* to_string(Family f);

constexpr int local_size(Family f) {
    switch (f) {
    case Family::P1: return 3;
    case Family::P2: return 6;
    case Family::P1disc: return 3;
    case Family::P0disc: return 1;
    }
    return 0;
}

constexpr bool is_continuous(Family f) { return f == Family::P1 || f == Family::P2; }

/// Basis values and gradients at one point. Local order for P2: the three
/// vertex functions, then the edge functions opposite vertex 0, 1, 2.
struct BasisValues {
    std::array<double, 6> value{};
    std::array<Vec2, 6> grad{};
    int size = 0;
};

/// Reference-cell evaluation; gradients are with respect to (xi, eta) where
/// bary = (1 - xi - eta, xi, eta).
BasisValues eval_basis(Family f, const Bary& bary);

/// Affine cell data: area and the (constant) physical gradients of the
/// barycentric coordinates.
struct CellGeometry {
    std::array<Point, 3> p{};
    double area = 0.0;
    std::array<Vec2, 3> grad_lambda{};

    static CellGeometry of(const Mesh& m, int c);
    Point map(const Bary& b) const {
        return {b[0] * p[0].x + b[1] * p[1].x + b[2] * p[2].x,
                b[0] * p[0].y + b[1] * p[1].y + b[2] * p[2].y};
    }
};

/// Basis values with gradients in physical coordinates.
BasisValues eval_basis_physical(Family f, const Bary& bary, const CellGeometry& g);

struct DirichletDofs {
    std::vector<int> dofs;      // sorted
    std::vector<Point> coords;  // coordinate of each dof
};

/// Scalar or 2-vector Lagrange space on a triangulation.
///
/// Scalar numbering: P1 uses vertex ids; P2 uses vertex ids followed by
/// num_vertices() + edge id; P1disc uses 3c + k; P0disc uses c. Vector
/// spaces interleave components: dof = 2 * scalar + component.
class FESpace {
public:
    FESpace(std::shared_ptr<const Mesh> mesh, Family family, int components);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    Family family() const { return family_; }
    int components() const { return components_; }
    int n_scalar_dofs() const { return n_scalar_; }
    int n_dofs() const { return n_scalar_ * components_; }
    int local_size() const { return nudged_ns::local_size(family_); }

    /// Scalar dofs of cell c in local basis order.
    std::span<const int> cell_dofs(int c) const {
        return {cell_dofs_.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(local_size()),
                static_cast<std::size_t>(local_size())};
    }

    /// Coordinates of the scalar node s.
    const Point& node(int s) const { return nodes_[static_cast<std::size_t>(s)]; }

    /// Dofs (all components) of nodes lying on edges with any of the tags.
    DirichletDofs dirichlet_dofs(std::span<const BoundaryTag> tags) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    Family family_;
    int components_;
    int n_scalar_ = 0;
    std::vector<int> cell_dofs_;
    std::vector<Point> nodes_;
};

/// Nodal interpolation at the scalar nodes.
std::vector<double> interpolate_function(const FESpace& s, const ScalarFunction& g, double t);
std::vector<double> interpolate_function(const FESpace& s, const VectorFunction& g, double t);

/// Field value inside cell c at barycentric point b (second entry is 0 for scalar spaces).
Vec2 eval_in_cell(const FESpace& s, std::span<const double> coeffs, int c, const Bary& b);

/// Physical gradient inside cell c; row k is the gradient of component k.
std::array<Vec2, 2> grad_in_cell(const FESpace& s, std::span<const double> coeffs, int c, const Bary& b);

/// Locate p and evaluate there.
Vec2 eval_field(const FESpace& s, std::span<const double> coeffs, const Point& p);

/// Taylor-Hood (P2, P1) or Scott-Vogelius (P2, P1disc) velocity/pressure pair.
enum class ElementPair { TaylorHood, ScottVogelius };

const char* to_string(ElementPair e);
Family pressure_family(ElementPair e);
bool requires_barycentric(ElementPair e);

} // namespace nudged_ns
