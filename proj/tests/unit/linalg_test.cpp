#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hardattn/error.hpp"
#include "hardattn/linalg.hpp"

using namespace hardattn;

TEST(Matrix, ZeroSizedIsRejected) {
  EXPECT_THROW(Matrix(0, 3), InvalidArgument);
  EXPECT_THROW(Matrix(3, 0), InvalidArgument);
}

TEST(Matrix, FromRowsAndIdentity) {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_EQ(m(2, 1), 6.0);
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), DimensionError);
  const Matrix id = Matrix::identity(3);
  EXPECT_EQ(matvec(id, Vector{1, -2, 3}), (Vector{1, -2, 3}));
}

TEST(Linalg, MatvecAndTranspose) {
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(matvec(m, Vector{1, 0, -1}), (Vector{-2, -2}));
  Vector out{1, 1, 1};
  matvec_transposed_add(m, Vector{1, 2}, out);
  EXPECT_EQ(out, (Vector{10, 13, 16}));
  EXPECT_THROW(matvec(m, Vector{1, 2}), DimensionError);
}

TEST(Linalg, AddOuter) {
  Matrix m(2, 2);
  add_outer(m, Vector{1, 2}, Vector{3, 4}, 0.5);
  EXPECT_EQ(m, Matrix::from_rows({{1.5, 2}, {3, 4}}));
}

TEST(Linalg, SoftmaxIsShiftInvariantAndStable) {
  const Vector a = softmax_stable(Vector{1, 2, 3});
  const Vector b = softmax_stable(Vector{1001, 1002, 1003});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
  EXPECT_NEAR(a[0] + a[1] + a[2], 1.0, 1e-15);
  const Vector big = softmax_stable(Vector{-1e300, 0.0});
  EXPECT_EQ(big[0], 0.0);
  EXPECT_EQ(big[1], 1.0);
  EXPECT_THROW(softmax_stable(Vector{}), InvalidArgument);
}

TEST(Linalg, SigmoidAndSoftplusExtremes) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_GT(sigmoid(-745.0), 0.0);
  EXPECT_EQ(sigmoid(800.0), 1.0);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-16);
  EXPECT_EQ(softplus(1000.0), 1000.0);
  EXPECT_NEAR(softplus(-50.0), std::exp(-50.0), 1e-30);
}

TEST(Linalg, MeanVarIsPopulation) {
  const auto [mean, var] = mean_var(Vector{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(mean, 2.5);
  EXPECT_DOUBLE_EQ(var, 1.25);
  EXPECT_THROW(mean_var(Vector{}), InvalidArgument);
}

TEST(Linalg, AllFinite) {
  EXPECT_TRUE(all_finite(Vector{1, 2}));
  EXPECT_FALSE(all_finite(Vector{1, std::numeric_limits<double>::quiet_NaN()}));
  EXPECT_FALSE(all_finite(Vector{std::numeric_limits<double>::infinity()}));
}
