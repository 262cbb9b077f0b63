#include "nudged_ns/props.hpp"

#include "nudged_ns/dense_oracle.hpp"
#include "nudged_ns/diagnostics.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/experiments.hpp"
#include "nudged_ns/mesh.hpp"
#include "nudged_ns/problems.hpp"
#include "nudged_ns/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace nudged_ns {

namespace {

using Rng = std::mt19937_64;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Outcome bound(double value, double tol, const std::string& what) {
    return {value <= tol, what + " = " + sci(value) + " (tol " + sci(tol) + ")"};
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(gen_unit_square(n)); }

std::shared_ptr<const Mesh> small_channel() {
    static const auto m = std::make_shared<const Mesh>(gen_channel_cylinder(16, 8, 16));
    return m;
}

// Copy of M with one off-diagonal entry perturbed when the mass fault is on.
SparseMatrix faulty_mass(const FESpace& s, Fault fault) {
    SparseMatrix m = assemble_mass(s);
    if (fault == Fault::mass) {
        for (int k = m.row_ptr()[0]; k < m.row_ptr()[1]; ++k) {
            if (m.col_idx()[k] != 0) {
                m.values()[k] += 1e-3;
                break;
            }
        }
    }
    return m;
}

RunConfig mms_config(const std::shared_ptr<const Mesh>& mesh, Scheme scheme, double dt) {
    RunConfig r;
    r.nu = 0.01;
    r.gamma = 1.0;
    r.mu = 10.0;
    r.dt = dt;
    r.scheme = scheme;
    r.observer = ObserverKind::coarse_p0_mean;
    r.coarse_mesh = mesh;
    r.forcing = problems::mms_forcing(r.nu);
    r.bc = {{BoundaryTag::wall}, problems::mms_velocity};
    return r;
}

StepState zeros(const FlowSolver& s) {
    const std::vector<double> z(static_cast<std::size_t>(s.velocity_space().n_dofs()), 0.0);
    return s.make_state(0.0, z, z);
}

std::vector<Point> boundary_vertex_set(const Mesh& m) {
    std::vector<Point> pts;
    for (const auto& e : m.boundary_edges())
        for (int v : e.v) pts.push_back(m.vertices()[static_cast<std::size_t>(v)]);
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double segment_distance(const Point& a, const Point& b, const Point& p) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    return std::hypot(a.x + t * dx - p.x, a.y + t * dy - p.y);
}

// --- mesh -----------------------------------------------------------------

Outcome mesh_validate() {
    std::vector<Mesh> meshes = {gen_unit_square(1), gen_unit_square(2), gen_unit_square(8), *small_channel()};
    meshes.push_back(barycentric_refine(meshes[2]));
    meshes.push_back(barycentric_refine(meshes[3]));
    for (const auto& m : meshes) m.validate();
    return {true, std::to_string(meshes.size()) + " meshes validated"};
}

Outcome mesh_unit_square_hmax() {
    double worst = 0.0;
    for (int n = 1; n <= 64; n *= 2) worst = std::max(worst, std::abs(gen_unit_square(n).h_max() * n - std::sqrt(2.0)));
    return bound(worst, 1e-14, "max |h_max n - sqrt 2|");
}

Outcome mesh_refine_area_boundary() {
    double worst = 0.0;
    bool same_boundary = true;
    for (const Mesh& m : {gen_unit_square(4), *small_channel()}) {
        const Mesh r = barycentric_refine(m);
        worst = std::max(worst, std::abs(r.total_area() - m.total_area()));
        same_boundary = same_boundary && boundary_vertex_set(r) == boundary_vertex_set(m);
    }
    Outcome o = bound(worst, 1e-13, "area change");
    o.passed = o.passed && same_boundary;
    if (!same_boundary) o.detail += "; boundary vertex set changed";
    return o;
}

Outcome mesh_format_round_trip() {
    for (const Mesh& m : {gen_unit_square(3), *small_channel(), barycentric_refine(*small_channel())}) {
        const std::string text = format_mesh(m);
        const Mesh back = parse_mesh(text);
        if (!(back == m) || format_mesh(back) != text) return {false, "round trip differs"};
    }
    return {true, "square, channel and refined channel identical after round trip"};
}

Outcome trajectory_round_trip(Rng& rng) {
    const auto path = std::filesystem::temp_directory_path() / ("nudged_ns_props_" + std::to_string(rng()) + ".bin");
    std::vector<TrajectoryRecord> recs;
    {
        TrajectoryWriter w(path, 7, 3, 0.125, 1.5);
        for (int k = 0; k < 4; ++k) {
            TrajectoryRecord r{1.5 + 0.125 * k, random_vector(rng, 7), random_vector(rng, 3)};
            w.append(r.t, r.v, r.q);
            recs.push_back(r);
        }
    }
    bool ok = true;
    {
        TrajectoryReader rd(path);
        ok = rd.header().n_records == 4 && rd.header().n_v == 7 && rd.header().n_p == 3 && rd.header().dt == 0.125 &&
             rd.header().t0 == 1.5;
        for (std::uint32_t k = 0; ok && k < 4; ++k) {
            const auto r = rd.read(k);
            ok = r.t == recs[k].t && r.v == recs[k].v && r.q == recs[k].q;
        }
    }
    std::filesystem::remove(path);
    return {ok, ok ? "4 records bit-identical" : "records differ"};
}

// --- quadrature and spaces ------------------------------------------------

Outcome quadrature_exactness() {
    double worst = 0.0;
    auto fact = [](int n) { return std::tgamma(n + 1.0); };
    for (const Quadrature* q : {&assembly_rule(), &accurate_rule()}) {
        for (int i = 0; i <= q->degree; ++i) {
            for (int j = 0; i + j <= q->degree; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < q->size(); ++k)
                    s += q->weights[k] * std::pow(q->points[k][1], i) * std::pow(q->points[k][2], j);
                s *= 0.5;
                worst = std::max(worst, std::abs(s - fact(i) * fact(j) / fact(i + j + 2)));
            }
        }
    }
    return bound(worst, 1e-14, "max monomial error");
}

Outcome partition_of_unity(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        double a = u(rng), b = u(rng);
        if (a + b > 1.0) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        for (Family f : {Family::P1, Family::P2}) {
            const auto bv = eval_basis(f, {1.0 - a - b, a, b});
            double s = 0.0, gx = 0.0, gy = 0.0;
            for (int i = 0; i < bv.size; ++i) {
                s += bv.value[static_cast<std::size_t>(i)];
                gx += bv.grad[static_cast<std::size_t>(i)][0];
                gy += bv.grad[static_cast<std::size_t>(i)][1];
            }
            worst = std::max({worst, std::abs(s - 1.0), std::abs(gx), std::abs(gy)});
        }
    }
    return bound(worst, 1e-13, "max |sum phi - 1|, |sum grad phi|");
}

Outcome dirichlet_on_tagged_edges() {
    const auto mesh = small_channel();
    FESpace v(mesh, Family::P2, 2);
    double worst = 0.0;
    for (BoundaryTag tag : {BoundaryTag::wall, BoundaryTag::inflow, BoundaryTag::outflow, BoundaryTag::cylinder}) {
        const BoundaryTag tags[] = {tag};
        const auto d = v.dirichlet_dofs(tags);
        for (const auto& p : d.coords) {
            double best = 1e300;
            for (const auto& e : mesh->boundary_edges()) {
                if (e.tag != tag) continue;
                best = std::min(best, segment_distance(mesh->vertices()[static_cast<std::size_t>(e.v[0])],
                                                       mesh->vertices()[static_cast<std::size_t>(e.v[1])], p));
            }
            worst = std::max(worst, best);
        }
    }
    return bound(worst, 1e-12, "max distance to a tagged edge");
}

// --- operators --------------------------------------------------------------

Outcome operator_symmetry(Fault fault) {
    auto mesh = square(4);
    FESpace v(mesh, Family::P2, 2);
    const Observer obs(ObserverKind::coarse_p0_mean, v, square(2));
    const SparseMatrix m = faulty_mass(v, fault);
    const double worst = std::max({asymmetry(m), asymmetry(assemble_stiffness(v)), asymmetry(assemble_graddiv(v)),
                                   asymmetry(assemble_nudging(v, obs))});
    Outcome o = bound(worst, 1e-13, "max asymmetry of M, K, G, N");
    if (!oracle::is_spd(oracle::to_dense(m), 1e-13)) {
        o.passed = false;
        o.detail += "; mass matrix not SPD";
    }
    return o;
}

Outcome operator_skew(Rng& rng) {
    auto mesh = square(4);
    FESpace v(mesh, Family::P2, 2);
    const BoundaryTag tags[] = {BoundaryTag::wall};
    const auto bd = v.dirichlet_dofs(tags);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto w = random_vector(rng, static_cast<std::size_t>(v.n_dofs()));
        auto x = random_vector(rng, static_cast<std::size_t>(v.n_dofs()));
        for (int d : bd.dofs) x[static_cast<std::size_t>(d)] = 0.0;
        const auto c = assemble_convection(v, w);
        worst = std::max(worst, std::abs(dot(x, matvec(c, x))) / dot(x, x));
    }
    return bound(worst, 1e-11, "max |v^T C(w) v| / |v|^2");
}

Outcome operator_dense_oracle(Rng& rng, Fault fault) {
    std::ostringstream detail;
    double worst = 0.0;
    auto track = [&](const char* name, double d) {
        worst = std::max(worst, d);
        if (d > 1e-13) detail << name << " " << sci(d) << "; ";
    };
    {
        auto mesh = square(1);
        FESpace v(mesh, Family::P2, 2);
        FESpace p(mesh, Family::P1, 1);
        const auto w = random_vector(rng, static_cast<std::size_t>(v.n_dofs()));
        track("M", oracle::max_diff(oracle::mass(v), faulty_mass(v, fault)));
        track("K", oracle::max_diff(oracle::stiffness(v), assemble_stiffness(v)));
        track("G", oracle::max_diff(oracle::graddiv(v), assemble_graddiv(v)));
        track("B", oracle::max_diff(oracle::div(v, p), assemble_div(v, p)));
        track("C", oracle::max_diff(oracle::convection(v, w), assemble_convection(v, w)));
        // Cubic data keeps f . phi within the exactness of the assembly rule.
        const VectorFunction f = [](double x, double y, double t) {
            return Vec2{x * x * y - y * y * y + t, 1.0 + x * y * y - 2.0 * x * x * x};
        };
        const auto fa = assemble_load(v, f, 0.3);
        const auto fo = oracle::load(v, f, 0.3);
        double lf = 0.0;
        for (std::size_t i = 0; i < fa.size(); ++i) lf = std::max(lf, std::abs(fa[i] - fo[i]));
        track("F", lf);
    }
    {
        auto mesh = std::make_shared<const Mesh>(barycentric_refine(gen_unit_square(1)));
        FESpace v(mesh, Family::P2, 2);
        FESpace p(mesh, Family::P1disc, 1);
        track("B_sv", oracle::max_diff(oracle::div(v, p), assemble_div(v, p)));
    }
    {
        auto fine = square(2);
        auto coarse = square(1);
        FESpace v(fine, Family::P2, 2);
        track("N_mean", oracle::max_diff(oracle::nudging(v, *coarse, false),
                                         assemble_nudging(v, Observer(ObserverKind::coarse_p0_mean, v, coarse))));
        track("N_centroid", oracle::max_diff(oracle::nudging(v, *coarse, true),
                                             assemble_nudging(v, Observer(ObserverKind::coarse_p0_centroid, v, coarse))));
        track("N_identity", oracle::max_diff(oracle::mass(v), assemble_nudging(v, Observer(ObserverKind::identity, v, nullptr))));
    }
    Outcome o = bound(worst, 1e-13, "max entrywise difference");
    if (!o.passed) o.detail += " [" + detail.str() + "]";
    return o;
}

// --- observation ----------------------------------------------------------

Outcome observe_projection(Rng& rng) {
    auto fine = square(8);
    auto coarse = square(4);
    FESpace v(fine, Family::P2, 2);
    const Observer obs(ObserverKind::coarse_p0_mean, v, coarse);
    const auto x = random_vector(rng, static_cast<std::size_t>(v.n_dofs()));
    const auto px = obs.observe(x);
    // (v - P v, chi_H) = 0 for every coarse constant chi_H.
    std::vector<double> integral(px.size(), 0.0);
    const auto& q = accurate_rule();
    for (int c = 0; c < fine->num_cells(); ++c) {
        const auto g = CellGeometry::of(*fine, c);
        const int k = obs.parent()[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Vec2 val = eval_in_cell(v, x, c, q.points[i]);
            for (int comp = 0; comp < 2; ++comp)
                integral[static_cast<std::size_t>(2 * k + comp)] += q.weights[i] * g.area * val[static_cast<std::size_t>(comp)];
        }
    }
    double worst = 0.0;
    for (int k = 0; k < coarse->num_cells(); ++k)
        for (int comp = 0; comp < 2; ++comp) {
            const auto i = static_cast<std::size_t>(2 * k + comp);
            worst = std::max(worst, std::abs(integral[i] - coarse->cell_area(k) * px[i]) / coarse->cell_area(k));
        }
    // Fields that are constant on coarse cells are reproduced.
    const auto one = interpolate_function(v, VectorFunction([](double, double, double) { return Vec2{0.7, -1.3}; }), 0.0);
    const auto p1 = obs.observe(one);
    for (std::size_t i = 0; i < p1.size(); ++i) worst = std::max(worst, std::abs(p1[i] - (i % 2 == 0 ? 0.7 : -1.3)));
    return bound(worst, 1e-13, "projection defect");
}

Outcome observe_interp_bounded() {
    const ScalarFunction phi = [](double x, double y, double) {
        return std::sin(std::numbers::pi * x) * std::cos(2.0 * std::numbers::pi * y) + x * y;
    };
    const int ns[] = {2, 4, 8, 16};
    std::ostringstream detail;
    bool ok = true;
    for (ObserverKind kind : {ObserverKind::coarse_p0_mean, ObserverKind::coarse_p0_centroid}) {
        const auto rows = measure_interp_constant(kind, phi, ns);
        double mx = 0.0;
        for (const auto& r : rows) mx = std::max(mx, r.ratio);
        ok = ok && mx <= 2.0 * rows.front().ratio;
        detail << to_string(kind) << ": max " << sci(mx) << " vs coarsest " << sci(rows.front().ratio) << "; ";
    }
    return {ok, detail.str()};
}

// --- linear algebra -------------------------------------------------------

Outcome linalg_determinism(Rng& rng) {
    auto mesh = square(8);
    RunConfig r = mms_config(mesh, Scheme::BE, 0.05);
    FlowSolver s(mesh, r);
    const auto w = random_vector(rng, static_cast<std::size_t>(s.velocity_space().n_dofs()));
    SparseMatrix a = s.system_matrix(1.0 / r.dt, w);
    auto b = random_vector(rng, static_cast<std::size_t>(a.rows()));
    apply_dirichlet(a, b, s.velocity_space(), r.bc, 0.0);
    const auto x1 = lu_factor(a).solve(b);
    LuFactorization lu;
    lu.factorize(a);
    lu.factorize(a);
    const auto x2 = lu.solve(b);
    const bool same = x1 == x2;
    const bool res = residual_ok(a, x1, b);
    return {same && res, std::string(same ? "bit-identical" : "solutions differ") + (res ? ", residual ok" : ", residual too large")};
}

// --- time loop ------------------------------------------------------------

Outcome one_solve_per_step() {
    auto mesh = square(4);
    std::ostringstream d;
    bool ok = true;
    for (Scheme sc : {Scheme::BE, Scheme::BDF2}) {
        RunConfig r = mms_config(mesh, sc, 0.1);
        r.t_end = 1.0;
        FlowSolver s(mesh, r);
        AnalyticReference ref(s.velocity_space(), problems::mms_velocity);
        const auto res = run(s, zeros(s), &ref);
        ok = ok && res.solves == res.steps && s.solve_count() == res.steps;
        d << to_string(sc) << ": " << res.steps << " steps, " << res.solves << " solves; ";
    }
    return {ok, d.str()};
}

Outcome discrete_divergence() {
    double bv = 0.0, sv = 0.0;
    {
        auto mesh = square(8);
        RunConfig r = mms_config(mesh, Scheme::BDF2, 0.05);
        r.t_end = 0.5;
        FlowSolver s(mesh, r);
        AnalyticReference ref(s.velocity_space(), problems::mms_velocity);
        bv = run(s, zeros(s), &ref).max_discrete_div;
    }
    {
        auto base = square(4);
        auto mesh = std::make_shared<const Mesh>(barycentric_refine(*base));
        RunConfig r = mms_config(mesh, Scheme::BDF2, 0.05);
        r.element = ElementPair::ScottVogelius;
        r.gamma = 0.0;
        r.t_end = 0.5;
        r.coarse_mesh = base;
        FlowSolver s(mesh, r);
        AnalyticReference ref(s.velocity_space(), problems::mms_velocity);
        RunOptions opt;
        opt.on_step = [&sv](const FlowSolver& fs, const Sample& sm) {
            sv = std::max(sv, div_l2(fs.velocity_space(), sm.state->v));
        };
        bv = std::max(bv, run(s, zeros(s), &ref, opt).max_discrete_div);
    }
    Outcome o = bound(std::max(bv, sv), 1e-8, "max(|B v|_inf, SV |div v|_L2)");
    o.detail += " [|Bv| " + sci(bv) + ", SV div " + sci(sv) + "]";
    return o;
}

Outcome zero_fixed_point() {
    auto mesh = square(4);
    double worst = 0.0;
    for (Scheme sc : {Scheme::BE, Scheme::BDF2}) {
        RunConfig r;
        r.nu = 0.01;
        r.mu = 10.0;
        r.gamma = 1.0;
        r.dt = 0.05;
        r.t_end = 1.0;
        r.scheme = sc;
        r.observer = ObserverKind::coarse_p0_mean;
        r.coarse_mesh = mesh;
        FlowSolver s(mesh, r);
        AnalyticReference ref(s.velocity_space(), [](double, double, double) { return Vec2{0.0, 0.0}; });
        RunOptions opt;
        opt.on_step = [&worst](const FlowSolver&, const Sample& sm) {
            worst = std::max({worst, norm_linf(sm.state->v), norm_linf(sm.state->q)});
        };
        run(s, zeros(s), &ref, opt);
    }
    return bound(worst, 1e-10, "max |v|, |q|");
}

Outcome long_time_stability(int steps) {
    auto mesh = square(4);
    RunConfig r = mms_config(mesh, Scheme::BE, 0.05);
    r.t_end = 0.05 * steps;
    FlowSolver s(mesh, r);
    AnalyticReference ref(s.velocity_space(), problems::mms_velocity);
    double early = 0.0, overall = 0.0;
    RunOptions opt;
    opt.on_step = [&](const FlowSolver& fs, const Sample& sm) {
        const double n = l2_norm(fs.mass(), sm.state->v);
        if (sm.state->n <= 100) early = std::max(early, n);
        overall = std::max(overall, n);
    };
    const auto res = run(s, zeros(s), &ref, opt);
    return {overall <= 10.0 * early, std::to_string(res.steps) + " BE steps: max |v| " + sci(overall) +
                                         ", first 100 steps " + sci(early)};
}

Outcome g_identity(Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto gnorm = [](double x, double y) { return 0.5 * x * x - 2.0 * x * y + 2.5 * y * y; };
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const double lhs = 0.5 * (3.0 * c - 4.0 * b + a) * c;
        const double rhs = 0.5 * (gnorm(b, c) - gnorm(a, b)) + 0.25 * (c - 2.0 * b + a) * (c - 2.0 * b + a);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return bound(worst, 1e-12, "max identity defect");
}

Outcome geoseries(Rng& rng) {
    std::uniform_real_distribution<double> ur(1.0001, 3.0), ub(0.0, 1.0), ua(0.0, 10.0);
    double worst = -1e300;
    for (int k = 0; k < 1000; ++k) {
        const double r = ur(rng), bb = ub(rng), a0 = ua(rng);
        double a = a0;
        for (int n = 0; n <= 200; ++n) {
            a = (a + bb) / r;  // r a_{n+1} = a_n + B
            const double limit = a0 * std::pow(r, -(n + 1)) + bb / (r - 1.0);
            worst = std::max(worst, (a - limit) / std::max(1.0, limit));
        }
    }
    return bound(std::max(worst, 0.0), 1e-12, "max relative excess over the bound");
}

// --- diagnostics ----------------------------------------------------------

Outcome norm_axioms(Rng& rng) {
    auto mesh = square(4);
    FESpace v(mesh, Family::P2, 2);
    const auto m = assemble_mass(v);
    const auto n = static_cast<std::size_t>(v.n_dofs());
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
        const auto a = random_vector(rng, n), b = random_vector(rng, n), c = random_vector(rng, n);
        const double ab = l2_error(m, a, b), bc = l2_error(m, b, c), ac = l2_error(m, a, c);
        ok = ok && ab >= 0.0 && l2_error(m, a, a) == 0.0;
        worst = std::max(worst, ac - ab - bc);
    }
    Outcome o = bound(std::max(worst, 0.0), 1e-11, "triangle inequality excess");
    o.passed = o.passed && ok;
    return o;
}

Outcome lift_drag_boundary() {
    const auto mesh = small_channel();
    std::ostringstream d;
    bool ok = true;
    for (int comp = 0; comp < 2; ++comp) {
        RunConfig r;
        r.nu = 0.001;
        r.bc = {{BoundaryTag::wall, BoundaryTag::inflow, BoundaryTag::outflow, BoundaryTag::cylinder}, {}};
        r.forcing = [comp](double, double, double) { return comp == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; };
        FlowSolver s(mesh, r);
        const ScalarFunction p = [comp](double x, double y, double) { return comp == 0 ? x : y; };
        StepState st = zeros(s);
        st.q = interpolate_function(s.pressure_space(), p, 0.0);
        const auto ld = lift_drag(s, st, st, Scheme::BE);
        // -20 * boundary integral of p n_k with n pointing into the fluid.
        double oracle = 0.0;
        for (const auto& e : mesh->boundary_edges()) {
            if (e.tag != BoundaryTag::cylinder) continue;
            const Point& a = mesh->vertices()[static_cast<std::size_t>(e.v[0])];
            const Point& b = mesh->vertices()[static_cast<std::size_t>(e.v[1])];
            const Point mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
            Vec2 nrm{b.y - a.y, a.x - b.x};  // length-weighted normal
            if (nrm[0] * (mid.x - ChannelGeometry::cx) + nrm[1] * (mid.y - ChannelGeometry::cy) < 0.0) {
                nrm[0] = -nrm[0];
                nrm[1] = -nrm[1];
            }
            oracle += p(mid.x, mid.y, 0.0) * nrm[static_cast<std::size_t>(comp)];
        }
        oracle *= -20.0;
        const double got = comp == 0 ? ld.drag : ld.lift;
        const double rel = std::abs(got - oracle) / std::abs(oracle);
        ok = ok && rel <= 1e-6;
        d << (comp == 0 ? "drag " : "lift ") << sci(got) << " vs " << sci(oracle) << " (rel " << sci(rel) << "); ";
    }
    return {ok, d.str()};
}

} // namespace

bool PropsReport::all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed; });
}

const PropertyResult* PropsReport::find(const std::string& name) const {
    for (const auto& r : results)
        if (r.name == name) return &r;
    return nullptr;
}

std::string PropsReport::to_text() const {
    std::ostringstream out;
    for (const auto& r : results) out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    return out.str();
}

Fault parse_fault(const std::string& name) {
    if (name == "none") return Fault::none;
    if (name == "mass") return Fault::mass;
    throw ConfigError("unknown fault '" + name + "' (expected none or mass)");
}

PropsReport run_properties(const PropsOptions& opt, std::ostream* log) {
    Rng rng(opt.seed);
    PropsReport rep;
    auto check = [&](const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        PropertyResult r;
        r.name = name;
        try {
            const Outcome o = fn();
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log) *log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n' << std::flush;
        rep.results.push_back(std::move(r));
    };
    check("mesh.validate", mesh_validate);
    check("mesh.unit_square_hmax", mesh_unit_square_hmax);
    check("mesh.refine_area_boundary", mesh_refine_area_boundary);
    check("mesh.format_round_trip", mesh_format_round_trip);
    check("trajectory.round_trip", [&] { return trajectory_round_trip(rng); });
    check("quadrature.exactness", quadrature_exactness);
    check("fespace.partition_of_unity", [&] { return partition_of_unity(rng); });
    check("fespace.dirichlet_dofs_on_tagged_edges", dirichlet_on_tagged_edges);
    check("operators.symmetry", [&] { return operator_symmetry(opt.fault); });
    check("operators.skew", [&] { return operator_skew(rng); });
    check("operators.dense_oracle", [&] { return operator_dense_oracle(rng, opt.fault); });
    check("observe.projection", [&] { return observe_projection(rng); });
    check("observe.interp_constant_bounded", observe_interp_bounded);
    check("linalg.determinism_residual", [&] { return linalg_determinism(rng); });
    check("timeloop.one_solve_per_step", one_solve_per_step);
    check("timeloop.discrete_divergence", discrete_divergence);
    check("timeloop.zero_fixed_point", zero_fixed_point);
    check("timeloop.long_time_stability", [&] { return long_time_stability(opt.long_steps); });
    check("timeloop.g_identity", [&] { return g_identity(rng); });
    check("timeloop.geoseries", [&] { return geoseries(rng); });
    check("diagnostics.norm_axioms", [&] { return norm_axioms(rng); });
    check("diagnostics.lift_drag_boundary", lift_drag_boundary);
    return rep;
}

PropsReport run_props(const Config& cfg, std::ostream* log) {
    const auto dir = prepare_output(cfg);
    PropsOptions opt;
    opt.seed = static_cast<std::uint64_t>(cfg.get_double("props.seed"));
    opt.fault = parse_fault(cfg.get("props.fault"));
    opt.long_steps = cfg.get_int("props.long_steps");
    if (opt.long_steps < 100) throw ConfigError("props.long_steps must be at least 100");
    auto rep = run_properties(opt, log);
    std::ofstream out(dir / "props_report.txt", std::ios::binary);
    out << rep.to_text();
    return rep;
}

} // namespace nudged_ns
