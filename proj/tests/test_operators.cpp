#include "nudged_ns/dense_oracle.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace nudged_ns;
namespace o = nudged_ns::oracle;

namespace {

std::shared_ptr<const Mesh> unit_triangle() {
    return std::make_shared<const Mesh>(std::vector<Point>{{0, 0}, {1, 0}, {0, 1}}, std::vector<Cell>{{0, 1, 2}},
                                        std::vector<BoundaryEdge>{{{0, 1}, BoundaryTag::wall},
                                                                  {{1, 2}, BoundaryTag::wall},
                                                                  {{2, 0}, BoundaryTag::wall}});
}

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(gen_unit_square(n)); }

double sum_all(const SparseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v;
    return s;
}

} // namespace

TEST(ElementMatrices, P1MassOnReferenceTriangle) {
    const FESpace s(unit_triangle(), Family::P1, 1);
    const SparseMatrix m = assemble_mass(s);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(m.at(i, j), (i == j ? 2.0 : 1.0) / 24.0, 1e-15);
}

TEST(ElementMatrices, P1StiffnessOnReferenceTriangle) {
    const FESpace s(unit_triangle(), Family::P1, 1);
    const SparseMatrix k = assemble_stiffness(s);
    const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(k.at(i, j), expect[i][j], 1e-15);
}

TEST(Mass, TotalEqualsArea) {
    const auto m = std::make_shared<const Mesh>(gen_channel_cylinder(16, 8, 16));
    EXPECT_NEAR(sum_all(assemble_mass(FESpace(m, Family::P2, 1))), m->total_area(), 1e-13);
    EXPECT_NEAR(sum_all(assemble_mass(FESpace(m, Family::P2, 2))), 2 * m->total_area(), 1e-13);
    EXPECT_NEAR(sum_all(assemble_mass(FESpace(m, Family::P1disc, 1))), m->total_area(), 1e-13);
}

TEST(Stiffness, AnnihilatesConstants) {
    const FESpace s(square(5), Family::P2, 2);
    const std::vector<double> ones(static_cast<std::size_t>(s.n_dofs()), 1.0);
    EXPECT_LT(norm_linf(matvec(assemble_stiffness(s), ones)), 1e-12);
}

TEST(Stiffness, DirichletEnergyOfQuadratic) {
    const FESpace s(square(4), Family::P2, 1);
    const auto c = interpolate_function(s, ScalarFunction([](double x, double y, double) { return x * y; }), 0.0);
    // integral of |grad xy|^2 over the unit square is 2/3.
    EXPECT_NEAR(dot(c, matvec(assemble_stiffness(s), c)), 2.0 / 3.0, 1e-13);
}

TEST(GradDiv, VanishesOnSolenoidalField) {
    const FESpace s(square(4), Family::P2, 2);
    const auto c = interpolate_function(s, VectorFunction([](double, double y, double) { return Vec2{y, 0.0}; }), 0.0);
    EXPECT_LT(norm_linf(matvec(assemble_graddiv(s), c)), 1e-14);
}

TEST(Div, AnnihilatesDivergenceFreeField) {
    const auto m = square(4);
    const FESpace v(m, Family::P2, 2);
    const auto c = interpolate_function(v, VectorFunction([](double x, double y, double) { return Vec2{x, -y}; }), 0.0);
    EXPECT_LT(norm_linf(matvec(assemble_div(v, FESpace(m, Family::P1, 1)), c)), 1e-14);
    EXPECT_LT(norm_linf(matvec(assemble_div(v, FESpace(m, Family::P1disc, 1)), c)), 1e-14);
}

TEST(Convection, SkewWhenFieldVanishesOnBoundary) {
    const FESpace s(square(4), Family::P2, 2);
    const auto w = interpolate_function(s, VectorFunction([](double x, double y, double) {
        return Vec2{std::sin(std::numbers::pi * x) * y * (1 - y), x * (1 - x) * y * (1 - y)};
    }), 0.0);
    const SparseMatrix c = assemble_convection(s, w);
    EXPECT_LT(max_abs(add(c, c.transpose())), 1e-14);
    EXPECT_GT(max_abs(c), 1e-3);
}

TEST(Load, ConstantForceIntegratesToArea) {
    const auto m = std::make_shared<const Mesh>(gen_channel_cylinder(16, 8, 16));
    const FESpace s(m, Family::P2, 2);
    const auto f = assemble_load(s, [](double, double, double) { return Vec2{1.0, -2.0}; }, 0.0);
    double fx = 0.0, fy = 0.0;
    for (std::size_t i = 0; i < f.size(); i += 2) {
        fx += f[i];
        fy += f[i + 1];
    }
    EXPECT_NEAR(fx, m->total_area(), 1e-13);
    EXPECT_NEAR(fy, -2 * m->total_area(), 1e-13);
}

TEST(PressureMean, SumsToArea) {
    const auto m = square(3);
    for (Family f : {Family::P1, Family::P1disc}) {
        double s = 0.0;
        for (double v : pressure_mean_vector(FESpace(m, f, 1))) s += v;
        EXPECT_NEAR(s, 1.0, 1e-14);
    }
}

TEST(DenseOracle, AssemblersAgreeOnSmallMesh) {
    const auto m = square(2);
    const FESpace v(m, Family::P2, 2), p(m, Family::P1, 1);
    EXPECT_LT(o::max_diff(o::mass(v), assemble_mass(v)), 1e-13);
    EXPECT_LT(o::max_diff(o::stiffness(v), assemble_stiffness(v)), 1e-12);
    EXPECT_LT(o::max_diff(o::graddiv(v), assemble_graddiv(v)), 1e-12);
    EXPECT_LT(o::max_diff(o::div(v, p), assemble_div(v, p)), 1e-13);
    std::vector<double> w(static_cast<std::size_t>(v.n_dofs()));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(1.7 * static_cast<double>(i));
    EXPECT_LT(o::max_diff(o::convection(v, w), assemble_convection(v, w)), 1e-12);
}

TEST(DenseOracle, ScottVogeliusDivergence) {
    const auto m = std::make_shared<const Mesh>(barycentric_refine(gen_unit_square(1)));
    const FESpace v(m, Family::P2, 2), p(m, Family::P1disc, 1);
    EXPECT_LT(o::max_diff(o::div(v, p), assemble_div(v, p)), 1e-13);
}

TEST(Profile, PeakAtMidline) {
    const VectorFunction g = parabolic_profile(1.5, 0.41);
    EXPECT_NEAR(g(0.0, 0.205, 0.0)[0], 1.5, 1e-15);
    EXPECT_NEAR(g(0.0, 0.2, 0.0)[0], 1.5 * 4 * 0.2 * 0.21 / (0.41 * 0.41), 1e-15);
    EXPECT_EQ(g(0.0, 0.0, 0.0)[0], 0.0);
    EXPECT_EQ(g(0.0, 0.2, 0.0)[1], 0.0);
}

TEST(DirichletElimination, IdempotentAndExact) {
    const auto m = square(3);
    const FESpace v(m, Family::P2, 2);
    SparseMatrix a = add(assemble_mass(v), assemble_stiffness(v));
    const VectorFunction g = [](double x, double y, double) { return Vec2{x + y, x * x}; };
    const DirichletBC bc{{BoundaryTag::wall}, g};
    std::vector<double> rhs(static_cast<std::size_t>(v.n_dofs()), 1.0);
    apply_dirichlet(a, rhs, v, bc, 0.0);
    SparseMatrix a2 = a;
    std::vector<double> rhs2 = rhs;
    apply_dirichlet(a2, rhs2, v, bc, 0.0);
    EXPECT_EQ(a2.values(), a.values());
    EXPECT_EQ(rhs2, rhs);
    EXPECT_LT(asymmetry(a), 1e-15);

    const auto x = lu_factor(a).solve(rhs);
    const std::array tags{BoundaryTag::wall};
    const DirichletDofs d = v.dirichlet_dofs(tags);
    const auto expect = boundary_values(d, g, 0.0);
    for (std::size_t k = 0; k < d.dofs.size(); ++k) EXPECT_NEAR(x[static_cast<std::size_t>(d.dofs[k])], expect[k], 1e-13);
}

TEST(DirichletElimination, UnknownTagRejected) {
    const FESpace v(square(2), Family::P2, 2);
    SparseMatrix a = assemble_mass(v);
    std::vector<double> rhs(static_cast<std::size_t>(v.n_dofs()), 0.0);
    EXPECT_THROW(apply_dirichlet(a, rhs, v, DirichletBC{{BoundaryTag::cylinder}, {}}, 0.0), UnknownTagError);
}
