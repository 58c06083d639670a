#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ibplane/jacobi.hpp"
#include "ibplane/random.hpp"

using namespace ibplane;

TEST(Jacobi, TwoByTwoClosedForm) {
    // [[0.68, 0.32], [0.32, 0.68]] has eigenvalues 1 and 0.36.
    auto e = jacobi_eigen(Matrix::from_rows({{0.68, 0.32}, {0.32, 0.68}}));
    EXPECT_NEAR(e.values[0], 1.0, 1e-14);
    EXPECT_NEAR(e.values[1], 0.36, 1e-14);
}

TEST(Jacobi, DiagonalAndEmpty) {
    auto e = jacobi_eigen(Matrix::from_rows({{1, 0, 0}, {0, 3, 0}, {0, 0, 2}}));
    EXPECT_EQ(e.values, (std::vector<double>{3, 2, 1}));
    EXPECT_TRUE(jacobi_eigen(Matrix()).values.empty());
    EXPECT_THROW(jacobi_eigen(Matrix(2, 3)), DimensionError);
}

TEST(Jacobi, MatchesEigenSolverOnRandomSymmetricMatrices) {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 8;
        Matrix a(n, n);
        Eigen::MatrixXd ref(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const double v = rng.uniform(-1, 1);
                a(i, j) = a(j, i) = v;
                ref(i, j) = ref(j, i) = v;
            }
        auto ours = jacobi_eigen(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ref);
        auto theirs = es.eigenvalues();  // ascending
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(ours.values[k], theirs(n - 1 - k), 1e-12);

        // A v = lambda v and V orthonormal.
        for (std::size_t k = 0; k < n; ++k) {
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0;
                for (std::size_t j = 0; j < n; ++j) av += a(i, j) * ours.vectors(j, k);
                EXPECT_NEAR(av, ours.values[k] * ours.vectors(i, k), 1e-12);
                dot += ours.vectors(i, k) * ours.vectors(i, k);
            }
            EXPECT_NEAR(dot, 1.0, 1e-12);
        }
    }
}
