#include "nudged_ns/fespace.hpp"
#include "nudged_ns/mesh.hpp"
#include "nudged_ns/quadrature.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

using namespace nudged_ns;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(gen_unit_square(n)); }

Bary at(double xi, double eta) { return {1.0 - xi - eta, xi, eta}; }

const std::array<Bary, 6> kP2Nodes = {
    Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}, Bary{0, 0.5, 0.5}, Bary{0.5, 0, 0.5}, Bary{0.5, 0.5, 0},
};

} // namespace

TEST(DofCount, TwoCellSquare) {
    const auto m = square(1);
    EXPECT_EQ(FESpace(m, Family::P2, 1).n_scalar_dofs(), 9);
    EXPECT_EQ(FESpace(m, Family::P2, 2).n_dofs(), 18);
    EXPECT_EQ(FESpace(m, Family::P1, 1).n_dofs(), 4);
    EXPECT_EQ(FESpace(m, Family::P1disc, 1).n_dofs(), 6);
    EXPECT_EQ(FESpace(m, Family::P0disc, 1).n_dofs(), 2);
}

TEST(DofCount, P2IsVerticesPlusEdges) {
    const auto m = square(7);
    EXPECT_EQ(FESpace(m, Family::P2, 1).n_scalar_dofs(), m->num_vertices() + m->num_edges());
}

TEST(Basis, P2NodalProperty) {
    for (int i = 0; i < 6; ++i) {
        const BasisValues b = eval_basis(Family::P2, kP2Nodes[static_cast<std::size_t>(i)]);
        ASSERT_EQ(b.size, 6);
        for (int j = 0; j < 6; ++j) EXPECT_NEAR(b.value[static_cast<std::size_t>(j)], i == j ? 1.0 : 0.0, 1e-15);
    }
}

TEST(Basis, PartitionOfUnity) {
    for (Family f : {Family::P1, Family::P2, Family::P1disc, Family::P0disc}) {
        for (const auto& q : accurate_rule().points) {
            const BasisValues b = eval_basis(f, q);
            double sum = 0.0;
            Vec2 gsum{0, 0};
            for (int k = 0; k < b.size; ++k) {
                sum += b.value[static_cast<std::size_t>(k)];
                gsum[0] += b.grad[static_cast<std::size_t>(k)][0];
                gsum[1] += b.grad[static_cast<std::size_t>(k)][1];
            }
            EXPECT_NEAR(sum, 1.0, 1e-14) << to_string(f);
            EXPECT_NEAR(gsum[0], 0.0, 1e-13);
            EXPECT_NEAR(gsum[1], 0.0, 1e-13);
        }
    }
}

TEST(Basis, GradientsMatchFiniteDifferences) {
    const double h = 1e-6;
    for (auto [xi, eta] : {std::pair{0.2, 0.3}, std::pair{0.6, 0.1}, std::pair{0.25, 0.25}}) {
        const BasisValues b = eval_basis(Family::P2, at(xi, eta));
        const BasisValues px = eval_basis(Family::P2, at(xi + h, eta)), mx = eval_basis(Family::P2, at(xi - h, eta));
        const BasisValues py = eval_basis(Family::P2, at(xi, eta + h)), my = eval_basis(Family::P2, at(xi, eta - h));
        for (std::size_t k = 0; k < 6; ++k) {
            EXPECT_NEAR(b.grad[k][0], (px.value[k] - mx.value[k]) / (2 * h), 1e-8);
            EXPECT_NEAR(b.grad[k][1], (py.value[k] - my.value[k]) / (2 * h), 1e-8);
        }
    }
}

TEST(Basis, PhysicalGradientsOnStretchedCell) {
    std::vector<Point> v = {{0.1, 0.2}, {1.3, 0.4}, {0.5, 1.7}};
    const Mesh m(v, {{0, 1, 2}}, {{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall}, {{2, 0}, BoundaryTag::wall}});
    const CellGeometry g = CellGeometry::of(m, 0);
    const Bary b{0.3, 0.45, 0.25};
    const Point x = g.map(b);
    const BasisValues phys = eval_basis_physical(Family::P2, b, g);
    const double h = 1e-6;
    auto value_at = [&](Point p, std::size_t k) {
        const auto l = barycentric(v[0], v[1], v[2], p);
        return eval_basis(Family::P2, l).value[k];
    };
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(phys.grad[k][0], (value_at({x.x + h, x.y}, k) - value_at({x.x - h, x.y}, k)) / (2 * h), 1e-7);
        EXPECT_NEAR(phys.grad[k][1], (value_at({x.x, x.y + h}, k) - value_at({x.x, x.y - h}, k)) / (2 * h), 1e-7);
    }
}

TEST(Interpolation, ReproducesQuadratics) {
    const auto m = square(3);
    const FESpace s(m, Family::P2, 2);
    const VectorFunction u = [](double x, double y, double) { return Vec2{x * x - 2 * x * y + 0.5, y * y + x}; };
    const auto c = interpolate_function(s, u, 0.0);
    for (const Point& p : {Point{0.11, 0.73}, Point{0.5, 0.5}, Point{0.97, 0.02}}) {
        const Vec2 e = u(p.x, p.y, 0.0), h = eval_field(s, c, p);
        EXPECT_NEAR(h[0], e[0], 1e-14);
        EXPECT_NEAR(h[1], e[1], 1e-14);
    }
    const auto g = grad_in_cell(s, c, 4, {0.2, 0.3, 0.5});
    const Point x = CellGeometry::of(*m, 4).map({0.2, 0.3, 0.5});
    EXPECT_NEAR(g[0][0], 2 * x.x - 2 * x.y, 1e-13);
    EXPECT_NEAR(g[0][1], -2 * x.x, 1e-13);
    EXPECT_NEAR(g[1][0], 1.0, 1e-13);
    EXPECT_NEAR(g[1][1], 2 * x.y, 1e-13);
}

TEST(Interpolation, P1discIsCellwiseLinear) {
    const auto m = square(2);
    const FESpace s(m, Family::P1disc, 1);
    const ScalarFunction f = [](double x, double y, double) { return 3 * x - y + 2; };
    const auto c = interpolate_function(s, f, 0.0);
    for (int cell = 0; cell < m->num_cells(); ++cell) {
        const Point g = m->centroid(cell);
        EXPECT_NEAR(eval_in_cell(s, c, cell, {1.0 / 3, 1.0 / 3, 1.0 / 3})[0], f(g.x, g.y, 0), 1e-14);
    }
}

TEST(Dirichlet, DofsOnTaggedEdges) {
    const auto m = std::make_shared<const Mesh>(gen_channel_cylinder(16, 8, 16));
    const FESpace s(m, Family::P2, 2);
    const std::array tags{BoundaryTag::cylinder};
    const DirichletDofs d = s.dirichlet_dofs(tags);
    int cyl_edges = 0;
    for (const auto& e : m->boundary_edges()) cyl_edges += e.tag == BoundaryTag::cylinder;
    // A closed loop of k edges carries k vertices and k midpoints, two components each.
    EXPECT_EQ(d.dofs.size(), static_cast<std::size_t>(4 * cyl_edges));
    EXPECT_TRUE(std::is_sorted(d.dofs.begin(), d.dofs.end()));
    for (const Point& p : d.coords) {
        const double r = std::hypot(p.x - ChannelGeometry::cx, p.y - ChannelGeometry::cy);
        // Edge midpoints sit slightly inside the arc.
        EXPECT_LE(r, ChannelGeometry::radius + 1e-12);
        EXPECT_GE(r, ChannelGeometry::radius * 0.95);
    }
}

TEST(Dirichlet, WallsCoverWholeSquareBoundary) {
    const auto m = square(4);
    const FESpace s(m, Family::P2, 1);
    const std::array tags{BoundaryTag::wall};
    const DirichletDofs d = s.dirichlet_dofs(tags);
    EXPECT_EQ(d.dofs.size(), 32u);
    for (const Point& p : d.coords) EXPECT_TRUE(p.x == 0 || p.x == 1 || p.y == 0 || p.y == 1);
}
