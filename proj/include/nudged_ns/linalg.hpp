#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nudged_ns {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse rows; column indices strictly increasing within a row.
/// Entries produced by assembly are kept even when their value is zero so the
/// pattern is a function of the mesh connectivity only.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int n_rows, int n_cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                 std::vector<double> values);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Position of entry (i, j) in values(), or -1 if structurally absent.
    std::ptrdiff_t find(int i, int j) const;
    double at(int i, int j) const;

    SparseMatrix transpose() const;

    /// Same pattern with all values zero.
    SparseMatrix zeros_like() const;

    bool same_pattern(const SparseMatrix& other) const;

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Duplicates are summed. The result does not depend on triplet order:
/// duplicates are combined after sorting by (row, col, value).
SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);
void matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

/// Sum of sparse matrices of equal shape; the pattern is the union.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);

double max_abs(const SparseMatrix& a);
/// max |a_ij - a_ji|
double asymmetry(const SparseMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm_l2(std::span<const double> a);
double norm_linf(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
std::vector<double> lincomb(double a, std::span<const double> x, double b, std::span<const double> y);

/// Sparse LU with fill-reducing ordering and threshold partial pivoting
/// (tolerance 0.1).
///
/// The symbolic analysis is computed by analyze() and reused by every
/// factorize() call on a matrix with the same pattern.
class LuFactorization {
public:
    LuFactorization();
    ~LuFactorization();
    LuFactorization(LuFactorization&&) noexcept;
    LuFactorization& operator=(LuFactorization&&) noexcept;
    LuFactorization(const LuFactorization&) = delete;
    LuFactorization& operator=(const LuFactorization&) = delete;

    void analyze(const SparseMatrix& a);
    /// Numeric factorization; throws SingularMatrixError when a pivot falls
    /// below 1e-14 * max|a_ij|.
    void factorize(const SparseMatrix& a);
    std::vector<double> solve(std::span<const double> b) const;

    bool analyzed() const;
    bool factorized() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot analyze + factorize.
LuFactorization lu_factor(const SparseMatrix& a);

/// ||Ax - b||_inf <= 1e-9 (max|a_ij| ||x||_inf + ||b||_inf)
bool residual_ok(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
                 double tol = 1e-9);

} // namespace nudged_ns
