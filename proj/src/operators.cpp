#include "nudged_ns/operators.hpp"

#include "nudged_ns/error.hpp"
#include "nudged_ns/quadrature.hpp"

#include <algorithm>
#include <string>

namespace nudged_ns {

namespace {

using Block = std::array<double, 36>;

// Visit every cell with its physical basis at the assembly points.
template <class F>
void for_each_cell(const FESpace& s, F&& f) {
    const auto& q = assembly_rule();
    std::vector<BasisValues> bv(q.size());
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        const CellGeometry g = CellGeometry::of(s.mesh(), c);
        for (std::size_t i = 0; i < q.size(); ++i) bv[i] = eval_basis_physical(s.family(), q.points[i], g);
        f(c, g, bv);
    }
}

// Scatter a scalar block onto every component of the space.
void scatter_diagonal(const FESpace& s, int c, const Block& local, std::vector<Triplet>& out) {
    const auto dofs = s.cell_dofs(c);
    const int n = s.local_size();
    const int d = s.components();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double v = local[static_cast<std::size_t>(a * 6 + b)];
            for (int k = 0; k < d; ++k) {
                out.push_back({d * dofs[static_cast<std::size_t>(a)] + k, d * dofs[static_cast<std::size_t>(b)] + k, v});
            }
        }
    }
}

void require_vector(const FESpace& s, const char* what) {
    if (s.components() != 2) throw DimensionError(std::string(what) + ": vector space required");
}

} // namespace

SparseMatrix assemble_mass(const FESpace& s) {
    const auto& q = assembly_rule();
    std::vector<Triplet> t;
    for_each_cell(s, [&](int c, const CellGeometry& g, const std::vector<BasisValues>& bv) {
        Block local{};
        const int n = s.local_size();
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double w = q.weights[i] * g.area;
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    local[static_cast<std::size_t>(a * 6 + b)] += w * bv[i].value[static_cast<std::size_t>(a)] * bv[i].value[static_cast<std::size_t>(b)];
                }
            }
        }
        scatter_diagonal(s, c, local, t);
    });
    return from_triplets(s.n_dofs(), s.n_dofs(), std::move(t));
}

SparseMatrix assemble_stiffness(const FESpace& s) {
    const auto& q = assembly_rule();
    std::vector<Triplet> t;
    for_each_cell(s, [&](int c, const CellGeometry& g, const std::vector<BasisValues>& bv) {
        Block local{};
        const int n = s.local_size();
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double w = q.weights[i] * g.area;
            for (int a = 0; a < n; ++a) {
                const Vec2& ga = bv[i].grad[static_cast<std::size_t>(a)];
                for (int b = 0; b < n; ++b) {
                    const Vec2& gb = bv[i].grad[static_cast<std::size_t>(b)];
                    local[static_cast<std::size_t>(a * 6 + b)] += w * (ga[0] * gb[0] + ga[1] * gb[1]);
                }
            }
        }
        scatter_diagonal(s, c, local, t);
    });
    return from_triplets(s.n_dofs(), s.n_dofs(), std::move(t));
}

SparseMatrix assemble_graddiv(const FESpace& s) {
    require_vector(s, "assemble_graddiv");
    const auto& q = assembly_rule();
    std::vector<Triplet> t;
    for_each_cell(s, [&](int c, const CellGeometry& g, const std::vector<BasisValues>& bv) {
        const auto dofs = s.cell_dofs(c);
        const int n = s.local_size();
        for (int a = 0; a < n; ++a) {
            for (int k = 0; k < 2; ++k) {
                for (int b = 0; b < n; ++b) {
                    for (int l = 0; l < 2; ++l) {
                        double v = 0.0;
                        for (std::size_t i = 0; i < q.size(); ++i) {
                            v += q.weights[i] * bv[i].grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] *
                                 bv[i].grad[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)];
                        }
                        t.push_back({2 * dofs[static_cast<std::size_t>(a)] + k, 2 * dofs[static_cast<std::size_t>(b)] + l, v * g.area});
                    }
                }
            }
        }
    });
    return from_triplets(s.n_dofs(), s.n_dofs(), std::move(t));
}

SparseMatrix assemble_div(const FESpace& v, const FESpace& p) {
    require_vector(v, "assemble_div");
    if (p.components() != 1) throw DimensionError("assemble_div: scalar pressure space required");
    if (&v.mesh() != &p.mesh() && !(v.mesh() == p.mesh())) throw DimensionError("assemble_div: spaces live on different meshes");
    const auto& q = assembly_rule();
    std::vector<BasisValues> pv(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) pv[i] = eval_basis(p.family(), q.points[i]);
    std::vector<Triplet> t;
    for_each_cell(v, [&](int c, const CellGeometry& g, const std::vector<BasisValues>& bv) {
        const auto vd = v.cell_dofs(c);
        const auto pd = p.cell_dofs(c);
        for (int r = 0; r < p.local_size(); ++r) {
            for (int b = 0; b < v.local_size(); ++b) {
                for (int l = 0; l < 2; ++l) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i) {
                        s += q.weights[i] * pv[i].value[static_cast<std::size_t>(r)] *
                             bv[i].grad[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)];
                    }
                    t.push_back({pd[static_cast<std::size_t>(r)], 2 * vd[static_cast<std::size_t>(b)] + l, s * g.area});
                }
            }
        }
    });
    return from_triplets(p.n_dofs(), v.n_dofs(), std::move(t));
}

void convection_cell_matrix(const FESpace& s, std::span<const double> w, int c, std::array<double, 36>& out) {
    const auto& q = assembly_rule();
    const CellGeometry g = CellGeometry::of(s.mesh(), c);
    const auto dofs = s.cell_dofs(c);
    const int n = s.local_size();
    out.fill(0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const BasisValues bv = eval_basis_physical(s.family(), q.points[i], g);
        double w0 = 0.0;
        double w1 = 0.0;
        double divw = 0.0;
        for (int a = 0; a < n; ++a) {
            const std::size_t j = static_cast<std::size_t>(2 * dofs[static_cast<std::size_t>(a)]);
            w0 += bv.value[static_cast<std::size_t>(a)] * w[j];
            w1 += bv.value[static_cast<std::size_t>(a)] * w[j + 1];
            divw += bv.grad[static_cast<std::size_t>(a)][0] * w[j] + bv.grad[static_cast<std::size_t>(a)][1] * w[j + 1];
        }
        const double wt = q.weights[i] * g.area;
        for (int b = 0; b < n; ++b) {
            const Vec2& gb = bv.grad[static_cast<std::size_t>(b)];
            const double trial = w0 * gb[0] + w1 * gb[1] + 0.5 * divw * bv.value[static_cast<std::size_t>(b)];
            for (int a = 0; a < n; ++a) out[static_cast<std::size_t>(a * 6 + b)] += wt * trial * bv.value[static_cast<std::size_t>(a)];
        }
    }
}

SparseMatrix assemble_convection(const FESpace& s, std::span<const double> w) {
    require_vector(s, "assemble_convection");
    if (static_cast<int>(w.size()) != s.n_dofs()) throw DimensionError("assemble_convection: w has the wrong size");
    std::vector<Triplet> t;
    Block local{};
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        convection_cell_matrix(s, w, c, local);
        scatter_diagonal(s, c, local, t);
    }
    return from_triplets(s.n_dofs(), s.n_dofs(), std::move(t));
}

SparseMatrix assemble_nudging(const FESpace& s, const Observer& obs) {
    if (obs.n_fine_dofs() != s.n_dofs() || obs.components() != s.components()) {
        throw DimensionError("assemble_nudging: observer was built on a different space");
    }
    if (obs.kind() == ObserverKind::identity) return assemble_mass(s);
    const SparseMatrix& mean = obs.averaging();
    const SparseMatrix& sample = obs.restriction();
    const Mesh& coarse = *obs.coarse_mesh();
    const int d = s.components();
    std::vector<Triplet> t;
    for (int k = 0; k < coarse.num_cells(); ++k) {
        const double area = coarse.cell_area(k);
        for (int e = mean.row_ptr()[k]; e < mean.row_ptr()[k + 1]; ++e) {
            const int i = mean.col_idx()[e];
            const double mi = mean.values()[e] * area;
            for (int f = sample.row_ptr()[k]; f < sample.row_ptr()[k + 1]; ++f) {
                const int j = sample.col_idx()[f];
                for (int comp = 0; comp < d; ++comp) t.push_back({d * i + comp, d * j + comp, mi * sample.values()[f]});
            }
        }
    }
    return from_triplets(s.n_dofs(), s.n_dofs(), std::move(t));
}

std::vector<double> assemble_load(const FESpace& s, const VectorFunction& f, double t) {
    require_vector(s, "assemble_load");
    const auto& q = assembly_rule();
    std::vector<double> out(static_cast<std::size_t>(s.n_dofs()), 0.0);
    for_each_cell(s, [&](int c, const CellGeometry& g, const std::vector<BasisValues>& bv) {
        const auto dofs = s.cell_dofs(c);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Point x = g.map(q.points[i]);
            const Vec2 fv = f(x.x, x.y, t);
            const double w = q.weights[i] * g.area;
            for (int a = 0; a < s.local_size(); ++a) {
                const std::size_t j = static_cast<std::size_t>(2 * dofs[static_cast<std::size_t>(a)]);
                out[j] += w * fv[0] * bv[i].value[static_cast<std::size_t>(a)];
                out[j + 1] += w * fv[1] * bv[i].value[static_cast<std::size_t>(a)];
            }
        }
    });
    return out;
}

std::vector<double> pressure_mean_vector(const FESpace& p) {
    const auto& q = assembly_rule();
    std::vector<double> out(static_cast<std::size_t>(p.n_dofs()), 0.0);
    for_each_cell(p, [&](int c, const CellGeometry& g, const std::vector<BasisValues>& bv) {
        const auto dofs = p.cell_dofs(c);
        for (std::size_t i = 0; i < q.size(); ++i) {
            for (int a = 0; a < p.local_size(); ++a) {
                out[static_cast<std::size_t>(dofs[static_cast<std::size_t>(a)])] += q.weights[i] * g.area * bv[i].value[static_cast<std::size_t>(a)];
            }
        }
    });
    return out;
}

VectorFunction parabolic_profile(double peak, double height) {
    return [peak, height](double, double y, double) -> Vec2 {
        return {4.0 * peak * y * (height - y) / (height * height), 0.0};
    };
}

std::vector<double> boundary_values(const DirichletDofs& d, const VectorFunction& g, double t) {
    std::vector<double> out(d.dofs.size(), 0.0);
    if (!g) return out;
    for (std::size_t i = 0; i < d.dofs.size(); ++i) {
        const Point& p = d.coords[i];
        out[i] = g(p.x, p.y, t)[static_cast<std::size_t>(d.dofs[i] % 2)];
    }
    return out;
}

DirichletConstraint::DirichletConstraint(const SparseMatrix& pattern, std::vector<int> dofs)
    : n_(pattern.rows()), dofs_(std::move(dofs)) {
    std::vector<int> slot(static_cast<std::size_t>(pattern.cols()), -1);
    for (std::size_t i = 0; i < dofs_.size(); ++i) {
        const int d = dofs_[i];
        if (d < 0 || d >= pattern.rows() || d >= pattern.cols()) throw DimensionError("DirichletConstraint: dof out of range");
        slot[static_cast<std::size_t>(d)] = static_cast<int>(i);
        const auto p = pattern.find(d, d);
        if (p < 0) throw DimensionError("DirichletConstraint: constrained dof " + std::to_string(d) + " has no diagonal entry");
        diag_.push_back(p);
    }
    for (int r = 0; r < pattern.rows(); ++r) {
        for (int k = pattern.row_ptr()[r]; k < pattern.row_ptr()[r + 1]; ++k) {
            const int s = slot[static_cast<std::size_t>(pattern.col_idx()[k])];
            if (s >= 0) columns_.push_back({k, r, s});
        }
    }
    // Rows of constrained dofs are cleared separately; keep only their positions here.
    std::vector<int> is_row(static_cast<std::size_t>(pattern.rows()), 0);
    for (int d : dofs_) is_row[static_cast<std::size_t>(d)] = 1;
    for (auto& e : columns_) {
        if (is_row[static_cast<std::size_t>(e.row)]) e.slot = -1;
    }
}

void DirichletConstraint::apply(SparseMatrix& a, std::span<double> rhs, std::span<const double> values) const {
    if (a.rows() != n_ || static_cast<int>(rhs.size()) != n_ || values.size() != dofs_.size()) {
        throw DimensionError("DirichletConstraint::apply: size mismatch");
    }
    auto& val = a.values();
    for (const auto& e : columns_) {
        if (e.slot >= 0) rhs[static_cast<std::size_t>(e.row)] -= val[static_cast<std::size_t>(e.pos)] * values[static_cast<std::size_t>(e.slot)];
        val[static_cast<std::size_t>(e.pos)] = 0.0;
    }
    for (std::size_t i = 0; i < dofs_.size(); ++i) {
        const int d = dofs_[i];
        for (int k = a.row_ptr()[d]; k < a.row_ptr()[d + 1]; ++k) val[static_cast<std::size_t>(k)] = 0.0;
        val[static_cast<std::size_t>(diag_[i])] = 1.0;
        rhs[static_cast<std::size_t>(d)] = values[i];
    }
}

void apply_dirichlet(SparseMatrix& a, std::vector<double>& rhs, const FESpace& v, const DirichletBC& bc, double t) {
    for (BoundaryTag tag : bc.tags) {
        if (!v.mesh().has_tag(tag)) throw UnknownTagError(std::string("boundary tag '") + to_string(tag) + "' not present on the mesh");
    }
    const DirichletDofs d = v.dirichlet_dofs(bc.tags);
    const DirichletConstraint con(a, d.dofs);
    con.apply(a, rhs, boundary_values(d, bc.value, t));
}

} // namespace nudged_ns
