#include "nudged_ns/diagnostics.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/operators.hpp"
#include "nudged_ns/problems.hpp"
#include "nudged_ns/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

using namespace nudged_ns;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(gen_unit_square(n)); }

// Independent 1D Gauss-Legendre integral over [0, 1].
template <class F>
double integrate_1d(F f) {
    std::vector<double> x, w;
    gauss_legendre(20, x, w);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
}

std::vector<double> random_coeffs(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(n);
    for (auto& v : c) v = u(rng);
    return c;
}

} // namespace

TEST(L2Error, ZeroForExactField) {
    const FESpace s(square(3), Family::P2, 2);
    const VectorFunction u = [](double x, double y, double) { return Vec2{x * x + y, x * y}; };
    EXPECT_LT(l2_error(s, interpolate_function(s, u, 0.0), u, 0.0), 1e-13);
}

TEST(L2Error, ZeroFieldAgainstManufacturedSolution) {
    const FESpace s(square(4), Family::P2, 2);
    const std::vector<double> zero(static_cast<std::size_t>(s.n_dofs()), 0.0);
    // The squared norm separates into one-dimensional integrals.
    const double expect = std::sqrt(integrate_1d([](double y) { return std::cos(y) * std::cos(y); }) +
                                    integrate_1d([](double x) { return std::sin(x) * std::sin(x); }));
    EXPECT_NEAR(expect, 1.0, 1e-14);
    EXPECT_NEAR(l2_error(s, zero, problems::mms_velocity, 0.0), expect, 1e-12);
    const double at_t = std::sqrt(integrate_1d([](double y) { return std::pow(std::cos(y + 0.7), 2); }) +
                                  integrate_1d([](double x) { return std::pow(std::sin(x - 0.7), 2); }));
    EXPECT_NEAR(l2_error(s, zero, problems::mms_velocity, 0.7), at_t, 1e-12);
}

TEST(L2Error, MassPathMatchesQuadraturePath) {
    const FESpace s(square(3), Family::P2, 2);
    const SparseMatrix m = assemble_mass(s);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_coeffs(static_cast<std::size_t>(s.n_dofs()), rng);
        const auto b = random_coeffs(a.size(), rng);
        const VectorFunction field_b = [&](double x, double y, double) { return eval_field(s, b, {x, y}); };
        const double mass_path = l2_error(m, a, b);
        EXPECT_NEAR(l2_error(s, a, field_b, 0.0), mass_path, 1e-11 * mass_path);
    }
}

TEST(L2Error, NormAxioms) {
    const FESpace s(square(2), Family::P2, 2);
    const SparseMatrix m = assemble_mass(s);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_coeffs(static_cast<std::size_t>(s.n_dofs()), rng);
        const auto b = random_coeffs(a.size(), rng);
        const auto c = random_coeffs(a.size(), rng);
        EXPECT_GE(l2_error(m, a, b), 0.0);
        EXPECT_EQ(l2_error(m, a, a), 0.0);
        EXPECT_LE(l2_error(m, a, c), l2_error(m, a, b) + l2_error(m, b, c) + 1e-11);
        EXPECT_NEAR(l2_norm(m, lincomb(2.0, a, 0.0, a)), 2.0 * l2_norm(m, a), 1e-13);
    }
}

TEST(H1Error, PathsAgreeAndVanishOnQuadratics) {
    const FESpace s(square(3), Family::P2, 2);
    const VectorFunction u = [](double x, double y, double) { return Vec2{x * y, y * y - x}; };
    const GradientFunction du = [](double x, double y, double) {
        return std::array<Vec2, 2>{Vec2{y, x}, Vec2{-1.0, 2 * y}};
    };
    const auto c = interpolate_function(s, u, 0.0);
    EXPECT_LT(h1_error(s, c, du, 0.0), 1e-12);
    const std::vector<double> zero(c.size(), 0.0);
    // integral of y^2 + x^2 + 1 + 4 y^2 = 1/3 + 1/3 + 1 + 4/3
    EXPECT_NEAR(h1_error(s, zero, du, 0.0), std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(h1_error(assemble_stiffness(s), c, zero), std::sqrt(3.0), 1e-12);
}

TEST(DivL2, LinearFields) {
    const FESpace s(square(3), Family::P2, 2);
    EXPECT_LT(div_l2(s, interpolate_function(s, VectorFunction([](double x, double y, double) { return Vec2{x, -y}; }), 0.0)), 1e-12);
    EXPECT_NEAR(div_l2(s, interpolate_function(s, VectorFunction([](double x, double, double) { return Vec2{x, 0.0}; }), 0.0)), 1.0, 1e-13);
}

TEST(Rates, ExactArithmetic) {
    const std::vector<double> e{4.0, 1.0}, h{2.0, 1.0};
    const auto rows = convergence_rates(e, h);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_FALSE(rows[0].rate.has_value());
    EXPECT_DOUBLE_EQ(*rows[1].rate, 2.0);
}

TEST(Rates, PublishedSpatialRow) {
    const std::vector<double> e{4.12e-3, 5.16e-4}, h{0.25, 0.125};
    const double r = *convergence_rates(e, h)[1].rate;
    EXPECT_NEAR(r, 3.00, 0.005);
}

TEST(Rates, SyntheticCubic) {
    std::vector<double> h, e;
    for (int k = 0; k < 6; ++k) {
        h.push_back(std::pow(0.5, k + 1));
        e.push_back(7.3 * std::pow(h.back(), 3));
    }
    const auto rows = convergence_rates(e, h);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(*rows[k].rate, 3.0, 1e-12);
}

TEST(Rates, RejectsNonpositive) {
    const std::vector<double> e{1.0, 0.0}, h{1.0, 0.5};
    EXPECT_THROW(convergence_rates(e, h), Error);
}

TEST(Decay, ConstantSeries) {
    const std::vector<double> t{0, 1, 2, 3}, v{0.5, 0.5, 0.5, 0.5};
    const auto d = decay_metrics(t, v);
    EXPECT_EQ(d.plateau, 0.5);
    EXPECT_EQ(d.rate, 0.0);
    ASSERT_TRUE(d.time_to_threshold.has_value());
    EXPECT_EQ(*d.time_to_threshold, 0.0);
}

TEST(Decay, ExponentialRate) {
    std::vector<double> t, v;
    for (int k = 0; k <= 500; ++k) {
        t.push_back(0.01 * k);
        v.push_back(std::exp(-2.0 * t.back()));
    }
    const auto d = decay_metrics(t, v);
    EXPECT_NEAR(d.rate, -2.0, 1e-6);
    EXPECT_GT(d.plateau, 0.0);
    ASSERT_TRUE(d.time_to_threshold.has_value());
    EXPECT_GT(*d.time_to_threshold, 4.0);
}

TEST(Decay, PlateauIsTailMedian) {
    std::vector<double> t, v;
    for (int k = 0; k < 20; ++k) {
        t.push_back(k);
        v.push_back(k < 18 ? 10.0 - k * 0.1 : (k == 18 ? 1.0 : 3.0));
    }
    EXPECT_DOUBLE_EQ(decay_metrics(t, v).plateau, 2.0);
    EXPECT_THROW(decay_metrics(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Series, CsvLayout) {
    TimeSeries ts;
    SeriesRow a;
    a.time = 0.0;
    a.l2_error = 0.1;
    a.l2_norm = 1.0 / 3.0;
    ts.push(a);
    SeriesRow b;
    b.time = 0.5;
    b.lift = -2.5;
    ts.push(b);
    EXPECT_EQ(std::string(kCsvHeader), "time,l2_error,h1_error,div_l2,lift,drag,l2_norm");
    std::istringstream in(ts.to_csv());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kCsvHeader);
    std::getline(in, line);
    EXPECT_EQ(line, "0,0.10000000000000001,,,,,0.33333333333333331");
    std::getline(in, line);
    EXPECT_EQ(line, "0.5,,,,-2.5,,");
    EXPECT_EQ(ts.to_csv().find('\r'), std::string::npos);
    EXPECT_THROW(ts.push(b), Error);
}

TEST(Series, FormatRoundTrips) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng) * std::pow(10.0, k % 40 - 20);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Series, ChannelSelection) {
    TimeSeries ts;
    for (int k = 0; k < 4; ++k) {
        SeriesRow r;
        r.time = k;
        if (k % 2) r.drag = k * 1.5;
        ts.push(r);
    }
    std::vector<double> t;
    EXPECT_EQ(ts.channel("drag", &t), (std::vector<double>{1.5, 4.5}));
    EXPECT_EQ(t, (std::vector<double>{1.0, 3.0}));
    EXPECT_THROW(ts.channel("vorticity"), Error);
}

TEST(LiftDrag, ZeroStateGivesZero) {
    const auto mesh = std::make_shared<const Mesh>(gen_channel_cylinder(16, 8, 16));
    RunConfig r;
    r.bc = {{BoundaryTag::wall, BoundaryTag::inflow, BoundaryTag::outflow, BoundaryTag::cylinder}, {}};
    FlowSolver s(mesh, r);
    const std::vector<double> zero(static_cast<std::size_t>(s.velocity_space().n_dofs()), 0.0);
    const StepState st = s.make_state(0.0, zero, zero);
    const auto ld = lift_drag(s, st, st, Scheme::BDF2);
    EXPECT_EQ(ld.drag, 0.0);
    EXPECT_EQ(ld.lift, 0.0);
}

TEST(LiftDrag, MissingCylinderRejected) {
    RunConfig r;
    FlowSolver s(square(2), r);
    const std::vector<double> zero(static_cast<std::size_t>(s.velocity_space().n_dofs()), 0.0);
    const StepState st = s.make_state(0.0, zero, zero);
    EXPECT_THROW(lift_drag(s, st, st, Scheme::BE), UnknownTagError);
}
