#include "nudged_ns/linalg.hpp"

#include "nudged_ns/error.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace nudged_ns {

SparseMatrix::SparseMatrix(int n_rows, int n_cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (static_cast<int>(row_ptr_.size()) != n_rows_ + 1 || col_idx_.size() != values_.size() ||
        row_ptr_.back() != static_cast<int>(values_.size())) {
        throw DimensionError("SparseMatrix: inconsistent CSR arrays");
    }
}

std::ptrdiff_t SparseMatrix::find(int i, int j) const {
    const auto first = col_idx_.begin() + row_ptr_[i];
    const auto last = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return -1;
    return it - col_idx_.begin();
}

double SparseMatrix::at(int i, int j) const {
    const auto k = find(i, j);
    return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<int> ptr(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (int j : col_idx_) ++ptr[j + 1];
    for (int j = 0; j < n_cols_; ++j) ptr[j + 1] += ptr[j];
    std::vector<int> idx(col_idx_.size());
    std::vector<double> val(values_.size());
    std::vector<int> next(ptr.begin(), ptr.end() - 1);
    for (int i = 0; i < n_rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const int pos = next[col_idx_[k]]++;
            idx[pos] = i;
            val[pos] = values_[k];
        }
    }
    return SparseMatrix(n_cols_, n_rows_, std::move(ptr), std::move(idx), std::move(val));
}

SparseMatrix SparseMatrix::zeros_like() const {
    return SparseMatrix(n_rows_, n_cols_, row_ptr_, col_idx_, std::vector<double>(values_.size(), 0.0));
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
    return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && row_ptr_ == other.row_ptr_ &&
           col_idx_ == other.col_idx_;
}

SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
            throw DimensionError("from_triplets: index (" + std::to_string(t.row) + "," +
                                 std::to_string(t.col) + ") out of range");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.value < b.value;
    });
    std::vector<int> ptr(static_cast<std::size_t>(n_rows) + 1, 0);
    std::vector<int> idx;
    std::vector<double> val;
    idx.reserve(triplets.size());
    val.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size();) {
        const int r = triplets[k].row;
        const int c = triplets[k].col;
        double sum = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) sum += triplets[k++].value;
        idx.push_back(c);
        val.push_back(sum);
        ++ptr[r + 1];
    }
    for (int i = 0; i < n_rows; ++i) ptr[i + 1] += ptr[i];
    return SparseMatrix(n_rows, n_cols, std::move(ptr), std::move(idx), std::move(val));
}

void matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) != a.cols() || static_cast<int>(y.size()) != a.rows()) {
        throw DimensionError("matvec: dimension mismatch");
    }
    const auto& ptr = a.row_ptr();
    const auto& idx = a.col_idx();
    const auto& val = a.values();
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
        y[i] = s;
    }
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(a.rows()));
    matvec(a, x, y);
    return y;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("add: shape mismatch");
    std::vector<int> ptr(static_cast<std::size_t>(a.rows()) + 1, 0);
    std::vector<int> idx;
    std::vector<double> val;
    idx.reserve(a.nnz() + b.nnz());
    val.reserve(a.nnz() + b.nnz());
    for (int i = 0; i < a.rows(); ++i) {
        int ka = a.row_ptr()[i];
        int kb = b.row_ptr()[i];
        const int ea = a.row_ptr()[i + 1];
        const int eb = b.row_ptr()[i + 1];
        while (ka < ea || kb < eb) {
            const int ca = ka < ea ? a.col_idx()[ka] : a.cols();
            const int cb = kb < eb ? b.col_idx()[kb] : b.cols();
            if (ca == cb) {
                idx.push_back(ca);
                val.push_back(alpha * a.values()[ka++] + beta * b.values()[kb++]);
            } else if (ca < cb) {
                idx.push_back(ca);
                val.push_back(alpha * a.values()[ka++]);
            } else {
                idx.push_back(cb);
                val.push_back(beta * b.values()[kb++]);
            }
        }
        ptr[i + 1] = static_cast<int>(idx.size());
    }
    return SparseMatrix(a.rows(), a.cols(), std::move(ptr), std::move(idx), std::move(val));
}

double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

double asymmetry(const SparseMatrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
            m = std::max(m, std::abs(a.values()[k] - a.at(a.col_idx()[k], i)));
        }
    }
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_l2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_linf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw DimensionError("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

std::vector<double> lincomb(double a, std::span<const double> x, double b, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("lincomb: size mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

// UMFPACK works on compressed columns. The CSR arrays of A are the CSC arrays
// of A^T, so we factor A^T and solve with the transposed system flag.
struct LuFactorization::Impl {
    int n = 0;
    std::vector<int> ptr;
    std::vector<int> idx;
    std::vector<double> val;
    void* symbolic = nullptr;
    void* numeric = nullptr;
    double control[UMFPACK_CONTROL];

    Impl() {
        umfpack_di_defaults(control);
        control[UMFPACK_PIVOT_TOLERANCE] = 0.1;
        control[UMFPACK_SYM_PIVOT_TOLERANCE] = 0.1;
        control[UMFPACK_SCALE] = UMFPACK_SCALE_NONE;
        // Saddle systems: symmetric pivoting on a nested-dissection order of A+A^T
        // factors several times cheaper than the default column ordering.
        control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
        control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    }

    ~Impl() { release(); }

    void release_numeric() {
        if (numeric) umfpack_di_free_numeric(&numeric);
        numeric = nullptr;
    }

    void release() {
        release_numeric();
        if (symbolic) umfpack_di_free_symbolic(&symbolic);
        symbolic = nullptr;
    }
};

LuFactorization::LuFactorization() : impl_(std::make_unique<Impl>()) {}
LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

bool LuFactorization::analyzed() const { return impl_ && impl_->symbolic; }
bool LuFactorization::factorized() const { return impl_ && impl_->numeric; }

void LuFactorization::analyze(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("lu_factor: matrix is not square");
    auto& s = *impl_;
    s.release();
    s.n = a.rows();
    s.ptr = a.row_ptr();
    s.idx = a.col_idx();
    double info[UMFPACK_INFO];
    const int status = umfpack_di_symbolic(s.n, s.n, s.ptr.data(), s.idx.data(), a.values().data(),
                                           &s.symbolic, s.control, info);
    if (status == UMFPACK_WARNING_singular_matrix) {
        s.release();
        throw SingularMatrixError("lu_factor: structurally singular matrix");
    }
    if (status != UMFPACK_OK) {
        s.release();
        throw Error("lu_factor: symbolic analysis failed with status " + std::to_string(status));
    }
}

void LuFactorization::factorize(const SparseMatrix& a) {
    auto& s = *impl_;
    if (!s.symbolic || a.rows() != s.n || a.row_ptr() != s.ptr || a.col_idx() != s.idx) analyze(a);
    s.release_numeric();
    s.val = a.values();
    double info[UMFPACK_INFO];
    const int status = umfpack_di_numeric(s.ptr.data(), s.idx.data(), s.val.data(), s.symbolic, &s.numeric,
                                          s.control, info);
    const double amax = max_abs(a);
    if (status == UMFPACK_WARNING_singular_matrix || amax == 0.0 || info[UMFPACK_UMIN] < 1e-14 * amax) {
        s.release_numeric();
        throw SingularMatrixError("lu_factor: pivot " + std::to_string(info[UMFPACK_UMIN]) +
                                  " below 1e-14 * max|a_ij|");
    }
    if (status != UMFPACK_OK) {
        s.release_numeric();
        throw Error("lu_factor: numeric factorization failed with status " + std::to_string(status));
    }
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
    const auto& s = *impl_;
    if (!s.numeric) throw Error("LuFactorization::solve: not factorized");
    if (static_cast<int>(b.size()) != s.n) throw DimensionError("LuFactorization::solve: size mismatch");
    std::vector<double> x(b.size());
    double info[UMFPACK_INFO];
    const int status = umfpack_di_solve(UMFPACK_At, s.ptr.data(), s.idx.data(), s.val.data(), x.data(), b.data(),
                                        s.numeric, s.control, info);
    if (status != UMFPACK_OK) throw SingularMatrixError("LuFactorization::solve failed with status " + std::to_string(status));
    return x;
}

LuFactorization lu_factor(const SparseMatrix& a) {
    LuFactorization f;
    f.analyze(a);
    f.factorize(a);
    return f;
}

bool residual_ok(const SparseMatrix& a, std::span<const double> x, std::span<const double> b, double tol) {
    const auto ax = matvec(a, x);
    double r = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) r = std::max(r, std::abs(ax[i] - b[i]));
    return r <= tol * (max_abs(a) * norm_linf(x) + norm_linf(b));
}

} // namespace nudged_ns
