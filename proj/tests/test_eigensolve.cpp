#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curvres/eigensolve.hpp"
#include "curvres/operators.hpp"

using namespace curvres;

namespace {
using Sparse = Eigen::SparseMatrix<double>;

// 1D Dirichlet Laplacian on (0, pi) with P1 elements: -u'' = lambda u.
std::pair<Sparse, Sparse> laplace1d(int n)
{
    const double h = std::numbers::pi / (n + 1);
    std::vector<Eigen::Triplet<double>> k, m;
    for (int i = 0; i < n; ++i) {
        k.emplace_back(i, i, 2 / h);
        m.emplace_back(i, i, 4 * h / 6);
        if (i + 1 < n) {
            k.emplace_back(i, i + 1, -1 / h);
            k.emplace_back(i + 1, i, -1 / h);
            m.emplace_back(i, i + 1, h / 6);
            m.emplace_back(i + 1, i, h / 6);
        }
    }
    Sparse K(n, n), M(n, n);
    K.setFromTriplets(k.begin(), k.end());
    M.setFromTriplets(m.begin(), m.end());
    return {K, M};
}
}  // namespace

TEST(Eigensolve, OneByOne)
{
    Sparse K(1, 1), M(1, 1);
    K.insert(0, 0) = 2.0;
    M.insert(0, 0) = 1.0;
    const auto r = solve_lowest(K, M, 1);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_DOUBLE_EQ(r.eigenvalues[0], 2.0);
    EXPECT_DOUBLE_EQ(std::abs(r.vectors(0, 0)), 1.0);
}

TEST(Eigensolve, ZeroRequestedIsEmpty)
{
    const auto [K, M] = laplace1d(10);
    EXPECT_EQ(solve_lowest(K, M, 0).size(), 0u);
}

TEST(Eigensolve, DenseAndShiftInvertAgree)
{
    const auto [K, M] = laplace1d(500);
    SolverOptions dense;
    dense.dense_threshold = 1000;
    SolverOptions sparse;
    sparse.dense_threshold = 0;
    const auto a = solve_lowest(K, M, 6, 0.0, dense);
    const auto b = solve_lowest(K, M, 6, 0.0, sparse);
    for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-9 * a.eigenvalues[i]);
        EXPECT_NEAR(a.eigenvalues[i], (i + 1.0) * (i + 1.0), 1e-3 * (i + 1) * (i + 1));
        EXPECT_LE(b.residuals[i], 1e-9);
    }
    const Eigen::MatrixXd G = b.vectors.transpose() * (M * b.vectors);
    EXPECT_LE((G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    // Rayleigh quotients
    for (int i = 0; i < 6; ++i) {
        const Eigen::VectorXd x = b.vectors.col(i);
        EXPECT_NEAR(x.dot(K * x) / x.dot(M * x), b.eigenvalues[i], 1e-10 * b.eigenvalues[i]);
    }
}

TEST(Eigensolve, InteriorShiftReturnsValuesAbove)
{
    const auto [K, M] = laplace1d(800);
    SolverOptions o;
    o.dense_threshold = 0;
    const auto r = solve_lowest(K, M, 3, 10.0, o);
    EXPECT_NEAR(r.eigenvalues[0], 16.0, 0.05);
    EXPECT_NEAR(r.eigenvalues[1], 25.0, 0.05);
    EXPECT_NEAR(r.eigenvalues[2], 36.0, 0.1);
}

TEST(Eigensolve, LowerBoundIsBelowSpectrum)
{
    const auto [K, M] = laplace1d(50);
    EXPECT_LE(spectrum_lower_bound(K, M), 1.0);
}

TEST(Eigensolve, MatchingIdentityAndSwappedCluster)
{
    SpectralResult a;
    a.eigenvalues = {1.0, 2.0, 2.0};
    a.vectors = Eigen::MatrixXd::Identity(3, 3);
    Sparse M(3, 3);
    M.setIdentity();
    auto p = match_eigenpairs(a, a, M);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(p.match[i], i);
        EXPECT_NEAR(p.overlap[i], 1.0, 1e-14);
    }
    SpectralResult b = a;
    const double c = std::cos(0.7), s = std::sin(0.7);
    b.vectors.col(1) = Eigen::Vector3d(0, c, s);
    b.vectors.col(2) = Eigen::Vector3d(0, -s, c);
    p = match_eigenpairs(a, b, M);
    EXPECT_NEAR(p.overlap[1], 1.0, 1e-12);
    EXPECT_NEAR(p.overlap[2], 1.0, 1e-12);
    ASSERT_EQ(p.clusters.size(), 2u);
    for (double ang : p.clusters[1].principal_angles) EXPECT_NEAR(ang, 0.0, 1e-6);
}

// A degenerate level in `a` with an arbitrary basis, split in `b`: both b
// levels belong to the subspace and are assigned in ascending order.
TEST(Eigensolve, MatchingDegenerateLevelAgainstSplitPair)
{
    SpectralResult a, b;
    a.eigenvalues = {1.0, 6.0, 6.0};
    a.vectors = Eigen::MatrixXd::Identity(3, 3);
    const double c = std::cos(0.6), s = std::sin(0.6);
    a.vectors.col(1) = Eigen::Vector3d(0, c, s);
    a.vectors.col(2) = Eigen::Vector3d(0, -s, c);
    b.eigenvalues = {1.0, 5.5, 6.3};
    b.vectors = Eigen::MatrixXd::Identity(3, 3);
    Sparse M(3, 3);
    M.setIdentity();
    const auto p = match_eigenpairs(a, b, M);
    EXPECT_EQ(p.match, (std::vector<int>{0, 1, 2}));
    for (double o : p.overlap) EXPECT_NEAR(o, 1.0, 1e-12);
    EXPECT_NEAR(p.gap[1], 0.5, 1e-14);
    EXPECT_NEAR(p.gap[2], 0.3, 1e-14);
}

TEST(Eigensolve, MatchingNeedsMapForDifferentSizes)
{
    SpectralResult a, b;
    a.eigenvalues = {1.0};
    a.vectors = Eigen::MatrixXd::Identity(3, 1);
    b.eigenvalues = {1.0};
    b.vectors = Eigen::MatrixXd::Identity(4, 1);
    Sparse M(3, 3);
    M.setIdentity();
    EXPECT_THROW(match_eigenpairs(a, b, M), ContractError);
}
