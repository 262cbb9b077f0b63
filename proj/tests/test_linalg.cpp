#include "nudged_ns/dense_oracle.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/linalg.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace nudged_ns;

namespace {

SparseMatrix random_system(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> col(0, n - 1);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 4.0 + u(rng)});
        for (int k = 0; k < 3; ++k) t.push_back({i, col(rng), u(rng)});
    }
    return from_triplets(n, n, t);
}

} // namespace

TEST(Triplets, DuplicatesAreSummed) {
    const SparseMatrix a = from_triplets(2, 3, {{0, 1, 1.5}, {1, 2, 2.0}, {0, 1, -0.5}, {1, 0, 3.0}});
    EXPECT_EQ(a.nnz(), 3u);
    EXPECT_DOUBLE_EQ(a.at(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(a.at(1, 0), 3.0);
    EXPECT_EQ(a.at(0, 0), 0.0);
    EXPECT_EQ(a.find(0, 0), -1);
}

TEST(Triplets, OrderIndependent) {
    std::vector<Triplet> t = {{0, 0, 0.1}, {0, 0, 0.2}, {0, 0, 0.3}, {1, 1, 1e16}, {1, 1, 1.0}, {1, 1, -1e16}};
    const SparseMatrix a = from_triplets(2, 2, t);
    std::mt19937 rng(3);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(t.begin(), t.end(), rng);
        EXPECT_EQ(from_triplets(2, 2, t).values(), a.values());
    }
}

TEST(Triplets, OutOfRangeRejected) { EXPECT_THROW(from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError); }

TEST(Sparse, MatvecTransposeAdd) {
    const SparseMatrix a = from_triplets(2, 3, {{0, 0, 1}, {0, 2, 2}, {1, 1, 3}});
    EXPECT_EQ(matvec(a, std::vector<double>{1, 1, 1}), (std::vector<double>{3, 3}));
    const SparseMatrix at = a.transpose();
    EXPECT_EQ(at.rows(), 3);
    EXPECT_DOUBLE_EQ(at.at(2, 0), 2.0);
    const SparseMatrix s = add(a, from_triplets(2, 3, {{1, 0, 5}}), 2.0, -1.0);
    EXPECT_DOUBLE_EQ(s.at(0, 2), 4.0);
    EXPECT_DOUBLE_EQ(s.at(1, 0), -5.0);
    EXPECT_THROW(matvec(a, std::vector<double>{1, 1}), DimensionError);
}

TEST(Vectors, Kernels) {
    const std::vector<double> a{3, -4}, b{1, 2};
    EXPECT_DOUBLE_EQ(dot(a, b), -5.0);
    EXPECT_DOUBLE_EQ(norm_l2(a), 5.0);
    EXPECT_DOUBLE_EQ(norm_linf(a), 4.0);
    std::vector<double> y = b;
    axpy(2.0, a, y);
    EXPECT_EQ(y, (std::vector<double>{7, -6}));
    EXPECT_EQ(lincomb(1.0, a, -1.0, b), (std::vector<double>{2, -6}));
}

TEST(Lu, NeedsPivoting) {
    const SparseMatrix a = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const auto x = lu_factor(a).solve(std::vector<double>{2.0, 3.0});
    EXPECT_DOUBLE_EQ(x[0], 3.0);
    EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(Lu, SingularRejected) {
    const SparseMatrix a = from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}});
    EXPECT_THROW(lu_factor(a), SingularMatrixError);
}

TEST(Lu, MatchesDenseSolve) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const SparseMatrix a = random_system(40, rng);
        std::vector<double> b(40);
        for (auto& v : b) v = std::uniform_real_distribution<double>(-1, 1)(rng);
        const auto x = lu_factor(a).solve(b);
        const auto y = oracle::solve(oracle::to_dense(a), b);
        for (int i = 0; i < 40; ++i) EXPECT_NEAR(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)], 1e-12);
        EXPECT_TRUE(residual_ok(a, x, b));
    }
}

TEST(Lu, ReusesAnalysisAcrossValues) {
    std::mt19937_64 rng(5);
    SparseMatrix a = random_system(30, rng);
    LuFactorization lu;
    EXPECT_FALSE(lu.analyzed());
    lu.analyze(a);
    lu.factorize(a);
    EXPECT_TRUE(lu.factorized());
    for (auto& v : a.values()) v *= 1.5;
    lu.factorize(a);
    const std::vector<double> b(30, 1.0);
    EXPECT_TRUE(residual_ok(a, lu.solve(b), b));
}

TEST(Lu, DeterministicAcrossRuns) {
    std::mt19937_64 rng(9);
    const SparseMatrix a = random_system(60, rng);
    const std::vector<double> b(60, 0.25);
    EXPECT_EQ(lu_factor(a).solve(b), lu_factor(a).solve(b));
}

TEST(Residual, DetectsWrongSolution) {
    const SparseMatrix a = from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 2.0}});
    EXPECT_TRUE(residual_ok(a, std::vector<double>{1, 1}, std::vector<double>{2, 2}));
    EXPECT_FALSE(residual_ok(a, std::vector<double>{1, 1.01}, std::vector<double>{2, 2}));
}
