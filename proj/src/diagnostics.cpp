#include "nudged_ns/diagnostics.hpp"

#include "nudged_ns/error.hpp"
#include "nudged_ns/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace nudged_ns {

const char* const kCsvHeader = "time,l2_error,h1_error,div_l2,lift,drag,l2_norm";

namespace {

double row_dot(const SparseMatrix& a, int i, std::span<const double> x) {
    double s = 0.0;
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) s += a.values()[k] * x[static_cast<std::size_t>(a.col_idx()[k])];
    return s;
}

double quadratic_form(const SparseMatrix& a, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("coefficient vectors differ in size");
    const auto d = lincomb(1.0, x, -1.0, y);
    return std::sqrt(std::max(0.0, dot(d, matvec(a, d))));
}

} // namespace

double l2_error(const FESpace& s, std::span<const double> coeffs, const VectorFunction& exact, double t) {
    if (s.components() != 2) throw DimensionError("l2_error: vector function on scalar space");
    const auto& q = accurate_rule();
    double sum = 0.0;
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        const CellGeometry g = CellGeometry::of(s.mesh(), c);
        double cell = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Point x = g.map(q.points[i]);
            const Vec2 u = exact(x.x, x.y, t);
            const Vec2 v = eval_in_cell(s, coeffs, c, q.points[i]);
            cell += q.weights[i] * ((v[0] - u[0]) * (v[0] - u[0]) + (v[1] - u[1]) * (v[1] - u[1]));
        }
        sum += cell * g.area;
    }
    return std::sqrt(sum);
}

double l2_error(const FESpace& s, std::span<const double> coeffs, const ScalarFunction& exact, double t) {
    if (s.components() != 1) throw DimensionError("l2_error: scalar function on vector space");
    const auto& q = accurate_rule();
    double sum = 0.0;
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        const CellGeometry g = CellGeometry::of(s.mesh(), c);
        double cell = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Point x = g.map(q.points[i]);
            const double e = eval_in_cell(s, coeffs, c, q.points[i])[0] - exact(x.x, x.y, t);
            cell += q.weights[i] * e * e;
        }
        sum += cell * g.area;
    }
    return std::sqrt(sum);
}

double l2_error(const SparseMatrix& mass, std::span<const double> a, std::span<const double> b) {
    return quadratic_form(mass, a, b);
}

double l2_norm(const SparseMatrix& mass, std::span<const double> a) {
    return std::sqrt(std::max(0.0, dot(a, matvec(mass, a))));
}

double h1_error(const FESpace& s, std::span<const double> coeffs, const GradientFunction& exact, double t) {
    if (s.components() != 2) throw DimensionError("h1_error: vector space required");
    const auto& q = accurate_rule();
    double sum = 0.0;
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        const CellGeometry g = CellGeometry::of(s.mesh(), c);
        double cell = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Point x = g.map(q.points[i]);
            const auto gu = exact(x.x, x.y, t);
            const auto gv = grad_in_cell(s, coeffs, c, q.points[i]);
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t l = 0; l < 2; ++l) {
                    const double e = gv[k][l] - gu[k][l];
                    cell += q.weights[i] * e * e;
                }
            }
        }
        sum += cell * g.area;
    }
    return std::sqrt(sum);
}

double h1_error(const SparseMatrix& stiffness, std::span<const double> a, std::span<const double> b) {
    return quadratic_form(stiffness, a, b);
}

double div_l2(const FESpace& s, std::span<const double> coeffs) {
    if (s.components() != 2) throw DimensionError("div_l2: vector space required");
    const auto& q = accurate_rule();
    double sum = 0.0;
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        const CellGeometry g = CellGeometry::of(s.mesh(), c);
        double cell = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto gv = grad_in_cell(s, coeffs, c, q.points[i]);
            const double d = gv[0][0] + gv[1][1];
            cell += q.weights[i] * d * d;
        }
        sum += cell * g.area;
    }
    return std::sqrt(sum);
}

LiftDrag lift_drag(const FlowSolver& solver, const StepState& prev, const StepState& cur, Scheme scheme) {
    const FESpace& vs = solver.velocity_space();
    const Mesh& m = vs.mesh();
    if (!m.has_tag(BoundaryTag::cylinder)) throw UnknownTagError("lift_drag: mesh has no cylinder boundary");
    const RunConfig& cfg = solver.config();
    const int nv = vs.n_dofs();
    if (static_cast<int>(cur.v.size()) != nv || static_cast<int>(prev.v.size()) != nv) {
        throw DimensionError("lift_drag: state has the wrong size");
    }
    const bool bdf2 = scheme == Scheme::BDF2;
    if (bdf2 && static_cast<int>(prev.v_prev.size()) != nv) throw DimensionError("lift_drag: BDF2 needs v^{n-1}");

    const BoundaryTag tags[] = {BoundaryTag::cylinder};
    const DirichletDofs cyl = vs.dirichlet_dofs(tags);
    std::vector<char> on_cyl(static_cast<std::size_t>(vs.n_scalar_dofs()), 0);
    for (int d : cyl.dofs) on_cyl[static_cast<std::size_t>(d / 2)] = 1;

    std::vector<double> dv(static_cast<std::size_t>(nv));
    std::vector<double> w(static_cast<std::size_t>(nv));
    double coef = cfg.c_t / cfg.dt;
    for (std::size_t i = 0; i < dv.size(); ++i) {
        if (bdf2) {
            dv[i] = 3.0 * cur.v[i] - 4.0 * prev.v[i] + prev.v_prev[i];
            w[i] = 2.0 * prev.v[i] - prev.v_prev[i];
        } else {
            dv[i] = cur.v[i] - prev.v[i];
            w[i] = prev.v[i];
        }
    }
    if (bdf2) coef = cfg.c_t / (2.0 * cfg.dt);

    std::vector<double> r(static_cast<std::size_t>(nv), 0.0);
    const auto f = solver.load(cur.t);
    for (int d : cyl.dofs) {
        const auto i = static_cast<std::size_t>(d);
        r[i] = coef * row_dot(solver.mass(), d, dv) + cfg.nu * row_dot(solver.stiffness(), d, cur.v) +
               cfg.gamma * row_dot(solver.graddiv(), d, cur.v) - row_dot(solver.div_transpose(), d, cur.q) - f[i];
    }
    std::array<double, 36> local{};
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto dofs = vs.cell_dofs(c);
        if (std::none_of(dofs.begin(), dofs.end(), [&](int s) { return on_cyl[static_cast<std::size_t>(s)] != 0; })) continue;
        convection_cell_matrix(vs, w, c, local);
        for (std::size_t a = 0; a < 6; ++a) {
            if (!on_cyl[static_cast<std::size_t>(dofs[a])]) continue;
            for (std::size_t b = 0; b < 6; ++b) {
                for (int k = 0; k < 2; ++k) {
                    r[static_cast<std::size_t>(2 * dofs[a] + k)] +=
                        cfg.c_t * local[a * 6 + b] * cur.v[static_cast<std::size_t>(2 * dofs[b] + k)];
                }
            }
        }
    }
    LiftDrag out;
    for (int d : cyl.dofs) {
        if (d % 2 == 0) out.drag += r[static_cast<std::size_t>(d)];
        else out.lift += r[static_cast<std::size_t>(d)];
    }
    out.drag *= -20.0;
    out.lift *= -20.0;
    return out;
}

std::vector<RateRow> convergence_rates(std::span<const double> errors, std::span<const double> steps) {
    if (errors.size() != steps.size()) throw DimensionError("convergence_rates: errors and steps differ in length");
    std::vector<RateRow> rows;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!(errors[k] > 0.0) || !(steps[k] > 0.0)) throw Error("convergence_rates: errors and steps must be positive");
        RateRow r{steps[k], errors[k], std::nullopt};
        if (k > 0) r.rate = std::log(errors[k - 1] / errors[k]) / std::log(steps[k - 1] / steps[k]);
        rows.push_back(r);
    }
    return rows;
}

DecayMetrics decay_metrics(std::span<const double> times, std::span<const double> values) {
    if (values.empty()) throw Error("decay_metrics: empty series");
    if (times.size() != values.size()) throw DimensionError("decay_metrics: times and values differ in length");
    const std::size_t n = values.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    std::vector<double> last(values.end() - static_cast<std::ptrdiff_t>(tail), values.end());
    std::sort(last.begin(), last.end());
    DecayMetrics out;
    out.plateau = last.size() % 2 ? last[last.size() / 2] : 0.5 * (last[last.size() / 2 - 1] + last[last.size() / 2]);
    const double threshold = 3.0 * out.plateau;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] <= threshold) {
            out.time_to_threshold = times[i];
            break;
        }
    }
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(values[i] > threshold) || !(values[i] > 0.0)) continue;
        const double y = std::log(values[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++count;
    }
    if (count >= 2) {
        const double c = static_cast<double>(count);
        const double den = c * stt - st * st;
        if (den > 0.0) out.rate = (c * sty - st * sy) / den;
    }
    return out;
}

void TimeSeries::push(const SeriesRow& r) {
    if (!rows_.empty() && !(r.time > rows_.back().time)) throw Error("TimeSeries: times must be strictly increasing");
    rows_.push_back(r);
}

std::vector<double> TimeSeries::times() const {
    std::vector<double> t;
    for (const auto& r : rows_) t.push_back(r.time);
    return t;
}

std::vector<double> TimeSeries::channel(const std::string& name, std::vector<double>* times) const {
    std::optional<double> SeriesRow::*field = nullptr;
    if (name == "l2_error") field = &SeriesRow::l2_error;
    else if (name == "h1_error") field = &SeriesRow::h1_error;
    else if (name == "div_l2") field = &SeriesRow::div_l2;
    else if (name == "lift") field = &SeriesRow::lift;
    else if (name == "drag") field = &SeriesRow::drag;
    else if (name == "l2_norm") field = &SeriesRow::l2_norm;
    else throw Error("TimeSeries: unknown channel '" + name + "'");
    std::vector<double> out;
    if (times) times->clear();
    for (const auto& r : rows_) {
        if (!(r.*field)) continue;
        out.push_back(*(r.*field));
        if (times) times->push_back(r.time);
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string TimeSeries::to_csv() const {
    std::string out = kCsvHeader;
    out += '\n';
    auto cell = [&](const std::optional<double>& v) {
        out += ',';
        if (v) out += format_double(*v);
    };
    for (const auto& r : rows_) {
        out += format_double(r.time);
        cell(r.l2_error);
        cell(r.h1_error);
        cell(r.div_l2);
        cell(r.lift);
        cell(r.drag);
        cell(r.l2_norm);
        out += '\n';
    }
    return out;
}

void TimeSeries::write_csv(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << to_csv();
}

} // namespace nudged_ns
