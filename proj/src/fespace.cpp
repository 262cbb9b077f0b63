#include "nudged_ns/fespace.hpp"

#include "nudged_ns/error.hpp"

#include <algorithm>
#include <set>

namespace nudged_ns {

const char* to_string(Family f) {
    switch (f) {
    case Family::P1: return "P1";
    case Family::P2: return "P2";
    case Family::P1disc: return "P1disc";
    case Family::P0disc: return "P0disc";
    }
    return "?";
}

const char* to_string(ElementPair e) {
    return e == ElementPair::TaylorHood ? "TaylorHood" : "ScottVogelius";
}

Family pressure_family(ElementPair e) {
    return e == ElementPair::TaylorHood ? Family::P1 : Family::P1disc;
}

bool requires_barycentric(ElementPair e) { return e == ElementPair::ScottVogelius; }

namespace {

// Values and gradients given the gradients of the barycentric coordinates.
BasisValues eval_with_lambda_grads(Family f, const Bary& l, const std::array<Vec2, 3>& gl) {
    BasisValues out;
    out.size = local_size(f);
    switch (f) {
    case Family::P1:
    case Family::P1disc:
        for (int k = 0; k < 3; ++k) {
            out.value[static_cast<std::size_t>(k)] = l[static_cast<std::size_t>(k)];
            out.grad[static_cast<std::size_t>(k)] = gl[static_cast<std::size_t>(k)];
        }
        break;
    case Family::P2:
        for (std::size_t k = 0; k < 3; ++k) {
            out.value[k] = l[k] * (2.0 * l[k] - 1.0);
            out.grad[k] = {(4.0 * l[k] - 1.0) * gl[k][0], (4.0 * l[k] - 1.0) * gl[k][1]};
            const std::size_t i = (k + 1) % 3;
            const std::size_t j = (k + 2) % 3;
            out.value[3 + k] = 4.0 * l[i] * l[j];
            out.grad[3 + k] = {4.0 * (l[i] * gl[j][0] + l[j] * gl[i][0]),
                               4.0 * (l[i] * gl[j][1] + l[j] * gl[i][1])};
        }
        break;
    case Family::P0disc:
        out.value[0] = 1.0;
        out.grad[0] = {0.0, 0.0};
        break;
    }
    return out;
}

} // namespace

BasisValues eval_basis(Family f, const Bary& bary) {
    static const std::array<Vec2, 3> ref_grads{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
    return eval_with_lambda_grads(f, bary, ref_grads);
}

BasisValues eval_basis_physical(Family f, const Bary& bary, const CellGeometry& g) {
    return eval_with_lambda_grads(f, bary, g.grad_lambda);
}

CellGeometry CellGeometry::of(const Mesh& m, int c) {
    CellGeometry g;
    g.p = m.cell_points(c);
    g.area = signed_area(g.p[0], g.p[1], g.p[2]);
    const double inv2a = 1.0 / (2.0 * g.area);
    for (std::size_t k = 0; k < 3; ++k) {
        const Point& a = g.p[(k + 1) % 3];
        const Point& b = g.p[(k + 2) % 3];
        g.grad_lambda[k] = {(a.y - b.y) * inv2a, (b.x - a.x) * inv2a};
    }
    return g;
}

FESpace::FESpace(std::shared_ptr<const Mesh> mesh, Family family, int components)
    : mesh_(std::move(mesh)), family_(family), components_(components) {
    if (components_ != 1 && components_ != 2) throw DimensionError("FESpace: components must be 1 or 2");
    const Mesh& m = *mesh_;
    const int nloc = local_size();
    cell_dofs_.resize(static_cast<std::size_t>(m.num_cells() * nloc));
    switch (family_) {
    case Family::P1:
        n_scalar_ = m.num_vertices();
        nodes_ = m.vertices();
        for (int c = 0; c < m.num_cells(); ++c) {
            for (int k = 0; k < 3; ++k) cell_dofs_[static_cast<std::size_t>(3 * c + k)] = m.cells()[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        }
        break;
    case Family::P2: {
        const int nv = m.num_vertices();
        n_scalar_ = nv + m.num_edges();
        nodes_ = m.vertices();
        for (const auto& e : m.edges()) {
            const Point& a = m.vertices()[static_cast<std::size_t>(e.v[0])];
            const Point& b = m.vertices()[static_cast<std::size_t>(e.v[1])];
            nodes_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
        }
        for (int c = 0; c < m.num_cells(); ++c) {
            for (int k = 0; k < 3; ++k) {
                cell_dofs_[static_cast<std::size_t>(6 * c + k)] = m.cells()[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
                cell_dofs_[static_cast<std::size_t>(6 * c + 3 + k)] = nv + m.cell_edge(c, k);
            }
        }
        break;
    }
    case Family::P1disc:
        n_scalar_ = 3 * m.num_cells();
        for (int c = 0; c < m.num_cells(); ++c) {
            const auto p = m.cell_points(c);
            for (int k = 0; k < 3; ++k) {
                cell_dofs_[static_cast<std::size_t>(3 * c + k)] = 3 * c + k;
                nodes_.push_back(p[static_cast<std::size_t>(k)]);
            }
        }
        break;
    case Family::P0disc:
        n_scalar_ = m.num_cells();
        for (int c = 0; c < m.num_cells(); ++c) {
            cell_dofs_[static_cast<std::size_t>(c)] = c;
            nodes_.push_back(m.centroid(c));
        }
        break;
    }
}

DirichletDofs FESpace::dirichlet_dofs(std::span<const BoundaryTag> tags) const {
    DirichletDofs out;
    if (!is_continuous(family_)) return out;
    const Mesh& m = *mesh_;
    std::set<int> scalar;
    for (int b = 0; b < m.num_boundary_edges(); ++b) {
        const auto& be = m.boundary_edges()[static_cast<std::size_t>(b)];
        if (std::find(tags.begin(), tags.end(), be.tag) == tags.end()) continue;
        scalar.insert(be.v[0]);
        scalar.insert(be.v[1]);
        if (family_ == Family::P2) scalar.insert(m.num_vertices() + m.boundary_edge_index(b));
    }
    for (int s : scalar) {
        for (int k = 0; k < components_; ++k) {
            out.dofs.push_back(components_ * s + k);
            out.coords.push_back(node(s));
        }
    }
    return out;
}

std::vector<double> interpolate_function(const FESpace& s, const ScalarFunction& g, double t) {
    if (s.components() != 1) throw DimensionError("interpolate_function: scalar function on vector space");
    std::vector<double> out(static_cast<std::size_t>(s.n_dofs()));
    for (int i = 0; i < s.n_scalar_dofs(); ++i) {
        const Point& p = s.node(i);
        out[static_cast<std::size_t>(i)] = g(p.x, p.y, t);
    }
    return out;
}

std::vector<double> interpolate_function(const FESpace& s, const VectorFunction& g, double t) {
    if (s.components() != 2) throw DimensionError("interpolate_function: vector function on scalar space");
    std::vector<double> out(static_cast<std::size_t>(s.n_dofs()));
    for (int i = 0; i < s.n_scalar_dofs(); ++i) {
        const Point& p = s.node(i);
        const Vec2 v = g(p.x, p.y, t);
        out[static_cast<std::size_t>(2 * i)] = v[0];
        out[static_cast<std::size_t>(2 * i + 1)] = v[1];
    }
    return out;
}

Vec2 eval_in_cell(const FESpace& s, std::span<const double> coeffs, int c, const Bary& b) {
    const BasisValues bv = eval_basis(s.family(), b);
    const auto dofs = s.cell_dofs(c);
    const int nc = s.components();
    Vec2 v{0.0, 0.0};
    for (int a = 0; a < bv.size; ++a) {
        for (int k = 0; k < nc; ++k) {
            v[static_cast<std::size_t>(k)] += bv.value[static_cast<std::size_t>(a)] *
                                              coeffs[static_cast<std::size_t>(nc * dofs[static_cast<std::size_t>(a)] + k)];
        }
    }
    return v;
}

std::array<Vec2, 2> grad_in_cell(const FESpace& s, std::span<const double> coeffs, int c, const Bary& b) {
    const CellGeometry g = CellGeometry::of(s.mesh(), c);
    const BasisValues bv = eval_basis_physical(s.family(), b, g);
    const auto dofs = s.cell_dofs(c);
    const int nc = s.components();
    std::array<Vec2, 2> out{};
    for (int a = 0; a < bv.size; ++a) {
        const Vec2& gr = bv.grad[static_cast<std::size_t>(a)];
        for (int k = 0; k < nc; ++k) {
            const double u = coeffs[static_cast<std::size_t>(nc * dofs[static_cast<std::size_t>(a)] + k)];
            out[static_cast<std::size_t>(k)][0] += u * gr[0];
            out[static_cast<std::size_t>(k)][1] += u * gr[1];
        }
    }
    return out;
}

Vec2 eval_field(const FESpace& s, std::span<const double> coeffs, const Point& p) {
    if (static_cast<int>(coeffs.size()) != s.n_dofs()) throw DimensionError("eval_field: coefficient size mismatch");
    const int c = locate(s.mesh(), p);
    const auto q = s.mesh().cell_points(c);
    return eval_in_cell(s, coeffs, c, barycentric(q[0], q[1], q[2], p));
}

} // namespace nudged_ns
