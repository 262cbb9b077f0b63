#include "nudged_ns/observe.hpp"

#include "nudged_ns/error.hpp"
#include "nudged_ns/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nudged_ns {

const char* to_string(ObserverKind k) {
    switch (k) {
    case ObserverKind::coarse_p0_mean: return "coarse_p0_mean";
    case ObserverKind::coarse_p0_centroid: return "coarse_p0_centroid";
    case ObserverKind::identity: return "identity";
    }
    return "?";
}

ObserverKind parse_observer_kind(std::string_view name) {
    for (auto k : {ObserverKind::coarse_p0_mean, ObserverKind::coarse_p0_centroid, ObserverKind::identity}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown observer kind '" + std::string(name) + "'");
}

namespace {

bool inside(const std::array<Point, 3>& t, const Point& p, double tol) {
    const auto b = barycentric(t[0], t[1], t[2], p);
    return b[0] >= -tol && b[1] >= -tol && b[2] >= -tol;
}

} // namespace

std::vector<int> nest(const Mesh& fine, const Mesh& coarse) {
    std::vector<int> parent(static_cast<std::size_t>(fine.num_cells()));
    int guess = 0;
    for (int c = 0; c < fine.num_cells(); ++c) {
        const Point g = fine.centroid(c);
        int k = -1;
        // Fine cells usually arrive in coarse-cell order, so try the last parent first.
        if (guess < coarse.num_cells() && inside(coarse.cell_points(guess), g, 1e-12)) {
            k = guess;
        } else {
            try {
                k = locate(coarse, g);
            } catch (const NotFoundError&) {
                throw NestingError("fine cell " + std::to_string(c) + " lies outside the coarse mesh");
            }
        }
        const auto tri = coarse.cell_points(k);
        for (const Point& p : fine.cell_points(c)) {
            if (!inside(tri, p, 1e-10)) {
                throw NestingError("fine cell " + std::to_string(c) + " straddles coarse cell " + std::to_string(k));
            }
        }
        parent[static_cast<std::size_t>(c)] = k;
        guess = k;
    }
    return parent;
}

Observer::Observer(ObserverKind kind, const FESpace& fine, std::shared_ptr<const Mesh> coarse)
    : kind_(kind), components_(fine.components()), n_fine_(fine.n_dofs()) {
    if (kind_ == ObserverKind::identity) return;
    if (!coarse) throw ConfigError(std::string(to_string(kind_)) + " observer needs a coarse mesh");
    coarse_ = std::move(coarse);
    const Mesh& fm = fine.mesh();
    parent_ = nest(fm, *coarse_);

    const int nc = coarse_->num_cells();
    const int ns = fine.n_scalar_dofs();
    const auto& q = assembly_rule();
    // Integral of each local basis function over a cell, divided by its area.
    std::array<double, 6> basis_mean{};
    for (std::size_t i = 0; i < q.size(); ++i) {
        const BasisValues bv = eval_basis(fine.family(), q.points[i]);
        for (int a = 0; a < bv.size; ++a) basis_mean[static_cast<std::size_t>(a)] += q.weights[i] * bv.value[static_cast<std::size_t>(a)];
    }
    std::vector<Triplet> mean;
    for (int c = 0; c < fm.num_cells(); ++c) {
        const int k = parent_[static_cast<std::size_t>(c)];
        const double scale = fm.cell_area(c) / coarse_->cell_area(k);
        const auto dofs = fine.cell_dofs(c);
        for (std::size_t a = 0; a < dofs.size(); ++a) mean.push_back({k, dofs[a], basis_mean[a] * scale});
    }
    mean_ = from_triplets(nc, ns, std::move(mean));

    if (kind_ == ObserverKind::coarse_p0_mean) {
        sample_ = mean_;
        return;
    }
    std::vector<std::vector<int>> children(static_cast<std::size_t>(nc));
    for (int c = 0; c < fm.num_cells(); ++c) children[static_cast<std::size_t>(parent_[static_cast<std::size_t>(c)])].push_back(c);
    std::vector<Triplet> sample;
    for (int k = 0; k < nc; ++k) {
        const Point g = coarse_->centroid(k);
        int hit = -1;
        for (int c : children[static_cast<std::size_t>(k)]) {
            if (inside(fm.cell_points(c), g, 1e-12)) {
                hit = c;
                break;
            }
        }
        if (hit < 0) throw NestingError("no fine cell contains the centroid of coarse cell " + std::to_string(k));
        const auto t = fm.cell_points(hit);
        const BasisValues bv = eval_basis(fine.family(), barycentric(t[0], t[1], t[2], g));
        const auto dofs = fine.cell_dofs(hit);
        for (int a = 0; a < bv.size; ++a) sample.push_back({k, dofs[static_cast<std::size_t>(a)], bv.value[static_cast<std::size_t>(a)]});
    }
    sample_ = from_triplets(nc, ns, std::move(sample));
}

std::vector<double> Observer::observe(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != n_fine_) throw DimensionError("observe: coefficient size mismatch");
    if (kind_ == ObserverKind::identity) return {v.begin(), v.end()};
    const int nc = n_coarse();
    const int d = components_;
    std::vector<double> out(static_cast<std::size_t>(nc * d), 0.0);
    const auto& ptr = sample_.row_ptr();
    const auto& idx = sample_.col_idx();
    const auto& val = sample_.values();
    for (int k = 0; k < nc; ++k) {
        for (int comp = 0; comp < d; ++comp) {
            double s = 0.0;
            for (int e = ptr[k]; e < ptr[k + 1]; ++e) s += val[e] * v[static_cast<std::size_t>(d * idx[e] + comp)];
            out[static_cast<std::size_t>(d * k + comp)] = s;
        }
    }
    return out;
}

std::vector<InterpRatio> measure_interp_constant(ObserverKind kind, const ScalarFunction& phi,
                                                 std::span<const int> coarse_n) {
    std::vector<InterpRatio> rows;
    const auto& q = accurate_rule();
    for (int n : coarse_n) {
        auto coarse = std::make_shared<const Mesh>(gen_unit_square(n));
        auto fine = std::make_shared<const Mesh>(gen_unit_square(2 * n));
        const FESpace s(fine, Family::P2, 1);
        const auto coeffs = interpolate_function(s, phi, 0.0);
        const Observer o(kind, s, kind == ObserverKind::identity ? nullptr : coarse);
        const auto obs = o.observe(coeffs);
        double err2 = 0.0;
        double grad2 = 0.0;
        for (int c = 0; c < fine->num_cells(); ++c) {
            const double area = fine->cell_area(c);
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double v = eval_in_cell(s, coeffs, c, q.points[i])[0];
                const double iv = kind == ObserverKind::identity
                                      ? eval_in_cell(s, obs, c, q.points[i])[0]
                                      : obs[static_cast<std::size_t>(o.parent()[static_cast<std::size_t>(c)])];
                const auto g = grad_in_cell(s, coeffs, c, q.points[i])[0];
                err2 += q.weights[i] * area * (iv - v) * (iv - v);
                grad2 += q.weights[i] * area * (g[0] * g[0] + g[1] * g[1]);
            }
        }
        InterpRatio r;
        r.H = 1.0 / n;
        r.error = std::sqrt(err2);
        r.grad_norm = std::sqrt(grad2);
        r.ratio = r.grad_norm > 0.0 ? r.error / (r.H * r.grad_norm) : 0.0;
        rows.push_back(r);
    }
    return rows;
}

} // namespace nudged_ns
