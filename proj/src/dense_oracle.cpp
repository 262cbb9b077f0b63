#include "nudged_ns/dense_oracle.hpp"

#include "nudged_ns/error.hpp"
#include "nudged_ns/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace nudged_ns::oracle {

namespace {

// Monomials in coordinates relative to the cell centroid.
struct LocalBasis {
    int n = 0;
    Point origin;
    Eigen::MatrixXd coef;  // column a holds the monomial coefficients of phi_a

    static LocalBasis fit(const FESpace& s, int c) {
        LocalBasis b;
        const auto dofs = s.cell_dofs(c);
        b.n = static_cast<int>(dofs.size());
        b.origin = s.mesh().centroid(c);
        Eigen::MatrixXd vand(b.n, b.n);
        for (int a = 0; a < b.n; ++a) {
            const auto m = b.monomials(s.node(dofs[static_cast<std::size_t>(a)]));
            for (int k = 0; k < b.n; ++k) vand(a, k) = m[static_cast<std::size_t>(k)];
        }
        b.coef = vand.inverse();
        return b;
    }

    std::array<double, 6> monomials(const Point& p) const {
        const double x = p.x - origin.x, y = p.y - origin.y;
        return {1.0, x, y, x * x, x * y, y * y};
    }

    double value(int a, const Point& p) const {
        const auto m = monomials(p);
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += coef(k, a) * m[static_cast<std::size_t>(k)];
        return v;
    }

    Vec2 grad(int a, const Point& p) const {
        const double x = p.x - origin.x, y = p.y - origin.y;
        // d/dx and d/dy of 1, x, y, x^2, xy, y^2
        const double dx[6] = {0.0, 1.0, 0.0, 2.0 * x, y, 0.0};
        const double dy[6] = {0.0, 0.0, 1.0, 0.0, x, 2.0 * y};
        Vec2 g{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            g[0] += coef(k, a) * dx[k];
            g[1] += coef(k, a) * dy[k];
        }
        return g;
    }
};

struct QPoint {
    Point x;
    double w;  // physical weight
};

std::vector<QPoint> cell_rule(const Mesh& m, int c) {
    static const Quadrature q = collapsed_gauss(6);
    const auto p = m.cell_points(c);
    const double area = m.cell_area(c);
    std::vector<QPoint> out;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& l = q.points[i];
        out.push_back({{l[0] * p[0].x + l[1] * p[1].x + l[2] * p[2].x, l[0] * p[0].y + l[1] * p[1].y + l[2] * p[2].y},
                       q.weights[i] * area});
    }
    return out;
}

void require_vector(const FESpace& v) {
    if (v.components() != 2) throw DimensionError("oracle: vector space required");
}

Vec2 field(const FESpace& v, const LocalBasis& b, int c, std::span<const double> w, const Point& x) {
    const auto dofs = v.cell_dofs(c);
    Vec2 out{0.0, 0.0};
    for (int a = 0; a < b.n; ++a) {
        const double phi = b.value(a, x);
        for (int k = 0; k < 2; ++k) out[static_cast<std::size_t>(k)] += phi * w[static_cast<std::size_t>(2 * dofs[static_cast<std::size_t>(a)] + k)];
    }
    return out;
}

double field_div(const FESpace& v, const LocalBasis& b, int c, std::span<const double> w, const Point& x) {
    const auto dofs = v.cell_dofs(c);
    double d = 0.0;
    for (int a = 0; a < b.n; ++a) {
        const Vec2 g = b.grad(a, x);
        d += g[0] * w[static_cast<std::size_t>(2 * dofs[static_cast<std::size_t>(a)])] +
             g[1] * w[static_cast<std::size_t>(2 * dofs[static_cast<std::size_t>(a)] + 1)];
    }
    return d;
}

bool inside(const std::array<Point, 3>& t, const Point& p) {
    const auto l = barycentric(t[0], t[1], t[2], p);
    return l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12;
}

} // namespace

Dense to_dense(const SparseMatrix& m) {
    Dense d(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
        for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) d(i, m.col_idx()[k]) += m.values()[k];
    }
    return d;
}

double max_diff(const Dense& a, const Dense& b) {
    if (a.rows != b.rows || a.cols != b.cols) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

double max_diff(const Dense& a, const SparseMatrix& b) { return max_diff(a, to_dense(b)); }

Dense mass(const FESpace& v) {
    require_vector(v);
    Dense d(v.n_dofs(), v.n_dofs());
    for (int c = 0; c < v.mesh().num_cells(); ++c) {
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        for (const auto& q : cell_rule(v.mesh(), c)) {
            for (int i = 0; i < b.n; ++i) {
                for (int j = 0; j < b.n; ++j) {
                    const double val = q.w * b.value(i, q.x) * b.value(j, q.x);
                    for (int k = 0; k < 2; ++k) d(2 * dofs[static_cast<std::size_t>(i)] + k, 2 * dofs[static_cast<std::size_t>(j)] + k) += val;
                }
            }
        }
    }
    return d;
}

Dense stiffness(const FESpace& v) {
    require_vector(v);
    Dense d(v.n_dofs(), v.n_dofs());
    for (int c = 0; c < v.mesh().num_cells(); ++c) {
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        for (const auto& q : cell_rule(v.mesh(), c)) {
            for (int i = 0; i < b.n; ++i) {
                for (int j = 0; j < b.n; ++j) {
                    const Vec2 gi = b.grad(i, q.x), gj = b.grad(j, q.x);
                    const double val = q.w * (gi[0] * gj[0] + gi[1] * gj[1]);
                    for (int k = 0; k < 2; ++k) d(2 * dofs[static_cast<std::size_t>(i)] + k, 2 * dofs[static_cast<std::size_t>(j)] + k) += val;
                }
            }
        }
    }
    return d;
}

Dense graddiv(const FESpace& v) {
    require_vector(v);
    Dense d(v.n_dofs(), v.n_dofs());
    for (int c = 0; c < v.mesh().num_cells(); ++c) {
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        for (const auto& q : cell_rule(v.mesh(), c)) {
            for (int i = 0; i < b.n; ++i) {
                for (int j = 0; j < b.n; ++j) {
                    const Vec2 gi = b.grad(i, q.x), gj = b.grad(j, q.x);
                    for (int k = 0; k < 2; ++k) {
                        for (int l = 0; l < 2; ++l) {
                            d(2 * dofs[static_cast<std::size_t>(i)] + k, 2 * dofs[static_cast<std::size_t>(j)] + l) +=
                                q.w * gi[static_cast<std::size_t>(k)] * gj[static_cast<std::size_t>(l)];
                        }
                    }
                }
            }
        }
    }
    return d;
}

Dense div(const FESpace& v, const FESpace& p) {
    require_vector(v);
    Dense d(p.n_dofs(), v.n_dofs());
    for (int c = 0; c < v.mesh().num_cells(); ++c) {
        const auto bv = LocalBasis::fit(v, c);
        const auto bp = LocalBasis::fit(p, c);
        const auto vd = v.cell_dofs(c);
        const auto pd = p.cell_dofs(c);
        for (const auto& q : cell_rule(v.mesh(), c)) {
            for (int i = 0; i < bp.n; ++i) {
                const double r = bp.value(i, q.x);
                for (int j = 0; j < bv.n; ++j) {
                    const Vec2 g = bv.grad(j, q.x);
                    for (int l = 0; l < 2; ++l) {
                        d(pd[static_cast<std::size_t>(i)], 2 * vd[static_cast<std::size_t>(j)] + l) += q.w * r * g[static_cast<std::size_t>(l)];
                    }
                }
            }
        }
    }
    return d;
}

Dense convection(const FESpace& v, std::span<const double> w) {
    require_vector(v);
    if (static_cast<int>(w.size()) != v.n_dofs()) throw DimensionError("oracle::convection: w has the wrong size");
    Dense d(v.n_dofs(), v.n_dofs());
    for (int c = 0; c < v.mesh().num_cells(); ++c) {
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        for (const auto& q : cell_rule(v.mesh(), c)) {
            const Vec2 wq = field(v, b, c, w, q.x);
            const double dw = field_div(v, b, c, w, q.x);
            for (int i = 0; i < b.n; ++i) {
                const double pi = b.value(i, q.x);
                for (int j = 0; j < b.n; ++j) {
                    const Vec2 gj = b.grad(j, q.x);
                    const double val = q.w * ((wq[0] * gj[0] + wq[1] * gj[1]) * pi + 0.5 * dw * b.value(j, q.x) * pi);
                    for (int k = 0; k < 2; ++k) d(2 * dofs[static_cast<std::size_t>(i)] + k, 2 * dofs[static_cast<std::size_t>(j)] + k) += val;
                }
            }
        }
    }
    return d;
}

Dense nudging(const FESpace& v, const Mesh& coarse, bool centroid) {
    require_vector(v);
    const Mesh& fine = v.mesh();
    const int ns = v.n_scalar_dofs();
    // Scalar observation of each basis function on each coarse cell.
    Dense obs(coarse.num_cells(), ns);
    std::vector<int> parent(static_cast<std::size_t>(fine.num_cells()), -1);
    for (int c = 0; c < fine.num_cells(); ++c) {
        for (int k = 0; k < coarse.num_cells(); ++k) {
            if (inside(coarse.cell_points(k), fine.centroid(c))) {
                parent[static_cast<std::size_t>(c)] = k;
                break;
            }
        }
        if (parent[static_cast<std::size_t>(c)] < 0) throw NestingError("oracle: fine cell outside the coarse mesh");
    }
    for (int c = 0; c < fine.num_cells(); ++c) {
        const int k = parent[static_cast<std::size_t>(c)];
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        if (centroid) {
            const Point x = coarse.centroid(k);
            if (!inside(fine.cell_points(c), x)) continue;
            for (int a = 0; a < b.n; ++a) obs(k, dofs[static_cast<std::size_t>(a)]) = b.value(a, x);
        } else {
            for (const auto& q : cell_rule(fine, c)) {
                for (int a = 0; a < b.n; ++a) obs(k, dofs[static_cast<std::size_t>(a)]) += q.w * b.value(a, q.x) / coarse.cell_area(k);
            }
        }
    }
    // N_ij = sum over coarse K of obs_K(phi_j) * integral over K of phi_i.
    Dense integral(coarse.num_cells(), ns);
    for (int c = 0; c < fine.num_cells(); ++c) {
        const int k = parent[static_cast<std::size_t>(c)];
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        for (const auto& q : cell_rule(fine, c)) {
            for (int a = 0; a < b.n; ++a) integral(k, dofs[static_cast<std::size_t>(a)]) += q.w * b.value(a, q.x);
        }
    }
    Dense d(v.n_dofs(), v.n_dofs());
    for (int k = 0; k < coarse.num_cells(); ++k) {
        for (int i = 0; i < ns; ++i) {
            if (integral(k, i) == 0.0) continue;
            for (int j = 0; j < ns; ++j) {
                const double val = integral(k, i) * obs(k, j);
                for (int comp = 0; comp < 2; ++comp) d(2 * i + comp, 2 * j + comp) += val;
            }
        }
    }
    return d;
}

std::vector<double> load(const FESpace& v, const VectorFunction& f, double t) {
    require_vector(v);
    std::vector<double> out(static_cast<std::size_t>(v.n_dofs()), 0.0);
    for (int c = 0; c < v.mesh().num_cells(); ++c) {
        const auto b = LocalBasis::fit(v, c);
        const auto dofs = v.cell_dofs(c);
        for (const auto& q : cell_rule(v.mesh(), c)) {
            const Vec2 fq = f(q.x.x, q.x.y, t);
            for (int i = 0; i < b.n; ++i) {
                const double phi = b.value(i, q.x);
                for (int k = 0; k < 2; ++k) out[static_cast<std::size_t>(2 * dofs[static_cast<std::size_t>(i)] + k)] += q.w * fq[static_cast<std::size_t>(k)] * phi;
            }
        }
    }
    return out;
}

std::vector<double> solve(Dense a, std::vector<double> b) {
    if (a.rows != a.cols || static_cast<int>(b.size()) != a.rows) throw DimensionError("oracle::solve: shape mismatch");
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.a.data(), a.rows, a.cols);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw SingularMatrixError("oracle::solve: singular matrix");
    Eigen::Map<Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd x = lu.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

bool is_spd(const Dense& a, double tol) {
    if (a.rows != a.cols) return false;
    Eigen::MatrixXd m(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) m(i, j) = a(i, j);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (m + m.transpose()));
    return llt.info() == Eigen::Success;
}

} // namespace nudged_ns::oracle
