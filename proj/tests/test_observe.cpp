#include "nudged_ns/dense_oracle.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/observe.hpp"
#include "nudged_ns/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

using namespace nudged_ns;

namespace {

std::shared_ptr<const Mesh> mesh(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

std::shared_ptr<const Mesh> unit_triangle() {
    return mesh(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
                     {{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall}, {{2, 0}, BoundaryTag::wall}}));
}

} // namespace

TEST(Observer, MeanOfXOnTriangle) {
    const auto m = unit_triangle();
    const FESpace v(m, Family::P2, 2);
    const Observer obs(ObserverKind::coarse_p0_mean, v, m);
    const auto c = interpolate_function(v, VectorFunction([](double x, double y, double) { return Vec2{x, y * y}; }), 0.0);
    const auto z = obs.observe(c);
    ASSERT_EQ(z.size(), 2u);
    EXPECT_NEAR(z[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(z[1], 1.0 / 6.0, 1e-15);
}

TEST(Observer, ReproducesConstants) {
    const auto coarse = mesh(gen_unit_square(3));
    const auto fine = mesh(barycentric_refine(gen_unit_square(3)));
    const FESpace v(fine, Family::P2, 2);
    const auto c = interpolate_function(v, VectorFunction([](double, double, double) { return Vec2{2.5, -1.0}; }), 0.0);
    for (ObserverKind k : {ObserverKind::coarse_p0_mean, ObserverKind::coarse_p0_centroid}) {
        const Observer obs(k, v, coarse);
        EXPECT_EQ(obs.n_coarse(), coarse->num_cells());
        const auto z = obs.observe(c);
        ASSERT_EQ(z.size(), static_cast<std::size_t>(2 * coarse->num_cells()));
        for (std::size_t i = 0; i < z.size(); i += 2) {
            EXPECT_NEAR(z[i], 2.5, 1e-14);
            EXPECT_NEAR(z[i + 1], -1.0, 1e-14);
        }
    }
}

TEST(Observer, IdentityIsBitExact) {
    const auto m = mesh(gen_unit_square(2));
    const FESpace v(m, Family::P2, 2);
    const Observer obs(ObserverKind::identity, v, nullptr);
    std::vector<double> c(static_cast<std::size_t>(v.n_dofs()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::exp(0.37 * static_cast<double>(i)) / 3.0;
    EXPECT_EQ(obs.observe(c), c);
    EXPECT_EQ(obs.n_coarse(), 0);
}

TEST(Observer, CentroidSamplesLinearField) {
    const auto coarse = mesh(gen_unit_square(2));
    const auto fine = mesh(barycentric_refine(gen_unit_square(2)));
    const FESpace v(fine, Family::P2, 1);
    const Observer obs(ObserverKind::coarse_p0_centroid, v, coarse);
    const auto c = interpolate_function(v, ScalarFunction([](double x, double y, double) { return x - 2 * y; }), 0.0);
    const auto z = obs.observe(c);
    for (int k = 0; k < coarse->num_cells(); ++k) {
        const Point g = coarse->centroid(k);
        EXPECT_NEAR(z[static_cast<std::size_t>(k)], g.x - 2 * g.y, 1e-14);
    }
}

TEST(Observer, MeanIsProjectionOntoCellConstants) {
    const auto coarse = mesh(gen_unit_square(2));
    const auto fine = mesh(gen_unit_square(4));
    const FESpace v(fine, Family::P2, 1);
    const Observer obs(ObserverKind::coarse_p0_mean, v, coarse);
    // Residual u - I_H u is orthogonal to every coarse indicator.
    const auto c = interpolate_function(v, ScalarFunction([](double x, double y, double) { return x * x + y; }), 0.0);
    const auto z = obs.observe(c);
    const auto mass_c = matvec(assemble_mass(v), c);
    for (int k = 0; k < coarse->num_cells(); ++k) {
        double integral = 0.0;
        const auto& r = obs.averaging();
        for (int p = r.row_ptr()[static_cast<std::size_t>(k)]; p < r.row_ptr()[static_cast<std::size_t>(k) + 1]; ++p)
            integral += r.values()[static_cast<std::size_t>(p)] * c[static_cast<std::size_t>(r.col_idx()[static_cast<std::size_t>(p)])];
        EXPECT_NEAR(z[static_cast<std::size_t>(k)], integral, 1e-15);
    }
    // Sum of cell means times area equals the total integral.
    double total = 0.0;
    for (int k = 0; k < coarse->num_cells(); ++k) total += z[static_cast<std::size_t>(k)] * coarse->cell_area(k);
    double ref = 0.0;
    for (double v2 : mass_c) ref += v2;
    EXPECT_NEAR(total, ref, 1e-14);
    EXPECT_NEAR(total, 1.0 / 3.0 + 0.5, 1e-14);
}

TEST(Observer, NudgingMatchesDenseOracle) {
    const auto coarse = mesh(gen_unit_square(1));
    const auto fine = mesh(gen_unit_square(2));
    const FESpace v(fine, Family::P2, 2);
    for (bool centroid : {false, true}) {
        const Observer obs(centroid ? ObserverKind::coarse_p0_centroid : ObserverKind::coarse_p0_mean, v, coarse);
        EXPECT_LT(oracle::max_diff(oracle::nudging(v, *coarse, centroid), assemble_nudging(v, obs)), 1e-13);
    }
    const Observer id(ObserverKind::identity, v, nullptr);
    EXPECT_LT(oracle::max_diff(oracle::mass(v), assemble_nudging(v, id)), 1e-13);
}

TEST(Nesting, RejectsNonNestedMeshes) {
    const auto coarse = mesh(gen_unit_square(3));
    const FESpace v(mesh(gen_unit_square(2)), Family::P2, 2);
    EXPECT_THROW(Observer(ObserverKind::coarse_p0_mean, v, coarse), NestingError);
    EXPECT_THROW(nest(gen_unit_square(2), gen_unit_square(3)), NestingError);
}

TEST(Nesting, ParentsOfRefinement) {
    const auto p = nest(barycentric_refine(gen_unit_square(2)), gen_unit_square(2));
    for (std::size_t c = 0; c < p.size(); ++c) EXPECT_EQ(p[c], static_cast<int>(c / 3));
}

TEST(ObserverKindName, ParseAndPrint) {
    for (ObserverKind k : {ObserverKind::coarse_p0_mean, ObserverKind::coarse_p0_centroid, ObserverKind::identity})
        EXPECT_EQ(parse_observer_kind(to_string(k)), k);
    EXPECT_THROW(parse_observer_kind("nearest"), ConfigError);
}

TEST(InterpConstant, RatioBoundedUnderRefinement) {
    const std::vector<int> ns{2, 4, 8};
    const auto rows = measure_interp_constant(ObserverKind::coarse_p0_mean,
                                              [](double x, double y, double) { return std::sin(3 * x) * std::cos(2 * y); }, ns);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& r : rows) {
        EXPECT_GT(r.ratio, 0.0);
        EXPECT_LT(r.ratio, 1.0);
    }
    // First-order: error halves with H.
    EXPECT_NEAR(rows[1].error / rows[2].error, 2.0, 0.2);
}
