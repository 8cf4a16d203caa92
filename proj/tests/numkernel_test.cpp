#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "homspace/numkernel.hpp"
#include "test_support.hpp"

using namespace homspace;

TEST(SymEigen, DiagonalInputSortsAscending) {
  Matrix s = Eigen::Vector3d(3, 1, 2).asDiagonal();
  auto eig = num::sym_eigendecompose(s);
  EXPECT_DOUBLE_EQ(eig.values(0), 1.0);
  EXPECT_DOUBLE_EQ(eig.values(1), 2.0);
  EXPECT_DOUBLE_EQ(eig.values(2), 3.0);
  // columns are the permuted identity columns (up to sign)
  EXPECT_NEAR(std::abs(eig.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(eig.vectors(2, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(eig.vectors(0, 2)), 1.0, 1e-15);
}

TEST(SymEigen, IdentityHasUnitSpectrum) {
  auto eig = num::sym_eigendecompose(Matrix::Identity(4, 4));
  EXPECT_LT((eig.values - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(num::max_abs(eig.vectors.transpose() * eig.vectors - Matrix::Identity(4, 4)), 1e-15);
}

TEST(SymEigen, SwapMatrix) {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  auto eig = num::sym_eigendecompose(s);
  EXPECT_NEAR(eig.values(0), -1.0, 1e-15);
  EXPECT_NEAR(eig.values(1), 1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(eig.vectors(0, 0)), r, 1e-15);
  EXPECT_NEAR(eig.vectors(0, 0) * eig.vectors(1, 0), -0.5, 1e-15);
  EXPECT_NEAR(eig.vectors(0, 1) * eig.vectors(1, 1), 0.5, 1e-15);
}

TEST(SymEigen, RejectsBadInput) {
  EXPECT_THROW(num::sym_eigendecompose(Matrix::Zero(2, 3)), DimensionError);
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(num::sym_eigendecompose(a), SymmetryError);
}

TEST(SymEigen, RandomReconstruction) {
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 5, 13, 40}) {
    Matrix a = hs_test::random_matrix(rng, n, n);
    Matrix s = a + a.transpose();
    auto eig = num::sym_eigendecompose(s);
    const Matrix back = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    EXPECT_LT(num::max_abs(back - s), 1e-10 * std::max(1.0, num::max_abs(s))) << n;
    EXPECT_LT(num::max_abs(eig.vectors.transpose() * eig.vectors - Matrix::Identity(n, n)), 1e-12);
    EXPECT_LE(num::max_abs(s * eig.vectors - eig.vectors * eig.values.asDiagonal()), 1e-9 * num::max_abs(s));
    for (int k = 1; k < n; ++k) EXPECT_LE(eig.values(k - 1), eig.values(k));
    // matches Eigen's own solver
    Eigen::SelfAdjointEigenSolver<Matrix> ref(s);
    EXPECT_LT((ref.eigenvalues() - eig.values).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, num::max_abs(s)));
  }
}

TEST(Kernel, ZeroMatrixHasFullKernel) {
  Matrix k = num::kernel_basis(Matrix::Zero(3, 3));
  EXPECT_EQ(k.cols(), 3);
  EXPECT_LT(num::max_abs(k.transpose() * k - Matrix::Identity(3, 3)), 1e-15);
}

TEST(Kernel, IdentityHasTrivialKernel) { EXPECT_EQ(num::kernel_basis(Matrix::Identity(3, 3)).cols(), 0); }

TEST(Kernel, RankOneTwoByTwo) {
  Matrix m(2, 2);
  m << 1, 1, 1, 1;
  Matrix k = num::kernel_basis(m);
  ASSERT_EQ(k.cols(), 1);
  EXPECT_NEAR(k(0, 0), -k(1, 0), 1e-15);
  EXPECT_NEAR(k.col(0).norm(), 1.0, 1e-15);
}

TEST(Kernel, RandomLowRank) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 5 + trial % 7, cols = 8 + trial % 5, rank = 1 + trial % 4;
    Matrix m = hs_test::random_matrix(rng, rows, rank) * hs_test::random_matrix(rng, rank, cols);
    Matrix k = num::kernel_basis(m);
    ASSERT_EQ(k.cols(), cols - rank);
    EXPECT_EQ(num::numerical_rank(m), rank);
    EXPECT_LT(num::max_abs(k.transpose() * k - Matrix::Identity(k.cols(), k.cols())), 1e-12);
    for (Eigen::Index c = 0; c < k.cols(); ++c) EXPECT_LE((m * k.col(c)).norm(), 1e-9 * m.norm());
  }
}

TEST(Kernel, ReferenceScaleTreatsNoiseAsZero) {
  Matrix m = Matrix::Constant(4, 3, 1e-17);
  EXPECT_EQ(num::kernel_basis(m, {}, 1.0).cols(), 3);
}

TEST(MatrixExp, ZeroGeneratorAndZeroTime) {
  EXPECT_EQ(num::matrix_exp(Matrix::Zero(3, 3), 0.7), Matrix::Identity(3, 3));
  std::mt19937_64 rng(3);
  EXPECT_EQ(num::matrix_exp(hs_test::random_matrix(rng, 4, 4), 0.0), Matrix::Identity(4, 4));
}

TEST(MatrixExp, RotationGenerator) {
  const Matrix x = hs_test::e(2, 0, 1);
  for (double t : {0.3, 1.0, 2.0, -5.5}) {
    Matrix expect(2, 2);
    expect << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    EXPECT_LT(num::max_abs(num::matrix_exp(x, t) - expect), 1e-14) << t;
  }
}

TEST(MatrixExp, NilpotentTruncates) {
  Matrix x(2, 2);
  x << 0, 1, 0, 0;
  Matrix expect(2, 2);
  expect << 1, 1, 0, 1;
  EXPECT_LT(num::max_abs(num::matrix_exp(x, 1.0) - expect), 1e-15);
}

TEST(MatrixExp, OneParameterGroupLaw) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x = hs_test::random_matrix(rng, 6, 6);
    x /= x.norm();
    const double s = u(rng), t = u(rng);
    EXPECT_LT(num::max_abs(num::matrix_exp(x, s + t) - num::matrix_exp(x, s) * num::matrix_exp(x, t)), 1e-10);
  }
}

TEST(MatrixExp, SatisfiesDefiningOde) {
  std::mt19937_64 rng(9);
  Matrix x = hs_test::random_matrix(rng, 5, 5);
  x /= x.norm();
  const double t = 0.8, h = 1e-5;
  const Matrix deriv = (num::matrix_exp(x, t + h) - num::matrix_exp(x, t - h)) / (2 * h);
  EXPECT_LT(num::max_abs(deriv - x * num::matrix_exp(x, t)), 1e-8);
}

TEST(Tolerance, RejectsNonPositive) {
  EXPECT_THROW((Tolerance{0.0, 1e-9}.validate()), ParameterError);
  EXPECT_THROW((Tolerance{1e-9, -1.0}.validate()), ParameterError);
  EXPECT_NO_THROW(Tolerance{}.validate());
}
