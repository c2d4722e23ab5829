#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "klnmf/error.hpp"
#include "klnmf/matrix.hpp"
#include "oracles.hpp"

using klnmf::Matrix;

TEST(MatrixStorage, RowMajorLayout) {
  const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a.data()[4], 5.0);
  EXPECT_EQ(a.column_copy(2), (std::vector<double>{3, 6}));
}

TEST(MatrixStorage, RejectsBadShapes) {
  EXPECT_THROW(Matrix(0, 3), klnmf::Error);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), klnmf::Error);
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), klnmf::Error);
}

TEST(MatrixStorage, NonNegativeCheckNamesCell) {
  Matrix a(2, 2, 1.0);
  a(1, 0) = -0.5;
  try {
    klnmf::require_nonnegative(a, "V");
    FAIL() << "expected throw";
  } catch (const klnmf::Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1"), std::string::npos);
    EXPECT_NE(msg.find("V"), std::string::npos);
  }
  Matrix dual(1, 1, -2.0, klnmf::Role::dual);
  EXPECT_EQ(dual.role(), klnmf::Role::dual);
}

TEST(MatrixProducts, MatchNaiveLoops) {
  std::mt19937_64 g(11);
  const Matrix a = oracle::random_positive(7, 5, g);
  const Matrix b = oracle::random_positive(5, 9, g);
  const Matrix c = oracle::random_positive(7, 9, g);
  EXPECT_LE(klnmf::max_abs_diff(klnmf::multiply(a, b), oracle::naive_product(a, b)), 1e-14);
  EXPECT_LE(klnmf::max_abs_diff(klnmf::multiply_tn(a, c),
                                oracle::naive_product(klnmf::transpose(a), c)), 1e-14);
  EXPECT_LE(klnmf::max_abs_diff(klnmf::multiply_nt(c, b),
                                oracle::naive_product(c, klnmf::transpose(b))), 1e-14);
  EXPECT_THROW(klnmf::multiply(a, c), klnmf::Error);
}

TEST(MatrixReductions, Sums) {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(klnmf::column_sums(a), (std::vector<double>{9, 12}));
  EXPECT_EQ(klnmf::row_sums(a), (std::vector<double>{3, 7, 11}));
  EXPECT_EQ(klnmf::total_sum(a), 21.0);
  EXPECT_DOUBLE_EQ(klnmf::frobenius_norm(a), std::sqrt(91.0));
}

TEST(SpectralNorm, AllOnes) {
  EXPECT_NEAR(klnmf::spectral_norm(Matrix(3, 4, 1.0)), std::sqrt(12.0), 1e-9 * std::sqrt(12.0));
}

TEST(SpectralNorm, Diagonal) {
  EXPECT_NEAR(klnmf::spectral_norm(Matrix::from_rows({{2, 0}, {0, 1}})), 2.0, 2e-9);
}

TEST(SpectralNorm, MatchesJacobiOracle) {
  std::mt19937_64 g(7);
  const Matrix k = oracle::random_positive(6, 5, g, 0.0, 1.0);
  const double expect = oracle::spectral_norm(k);
  EXPECT_NEAR(klnmf::spectral_norm(k, 1e-13), expect, 1e-8 * expect);
}

TEST(SpectralNorm, FuzzAgainstJacobi) {
  std::mt19937_64 g(99);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int t = 0; t < 100; ++t) {
    const Matrix k = oracle::random_positive(dim(g), dim(g), g, 0.0, 2.0);
    const double expect = oracle::spectral_norm(k);
    EXPECT_NEAR(klnmf::spectral_norm(k, 1e-13), expect, 1e-8 * expect) << "trial " << t;
  }
}

TEST(SpectralNorm, ScalesAndTransposes) {
  std::mt19937_64 g(3);
  const Matrix k = oracle::random_positive(9, 4, g);
  const double base = klnmf::spectral_norm(k, 1e-13);
  Matrix scaled = k;
  for (double& x : scaled.values()) x *= 3.5;
  EXPECT_NEAR(klnmf::spectral_norm(scaled, 1e-13), 3.5 * base, 1e-10 * 3.5 * base);
  EXPECT_NEAR(klnmf::spectral_norm(klnmf::transpose(k), 1e-13), base, 1e-10 * base);
}

TEST(SpectralNorm, BoundsUnitVectorImages) {
  std::mt19937_64 g(5);
  const Matrix k = oracle::random_positive(8, 6, g);
  const double tol = 1e-9;
  const double norm = klnmf::spectral_norm(k, tol);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Matrix x(6, 1);
    for (double& v : x.values()) v = n(g);
    const double len = klnmf::frobenius_norm(x);
    for (double& v : x.values()) v /= len;
    EXPECT_LE(klnmf::frobenius_norm(klnmf::multiply(k, x)), norm * (1 + tol));
  }
}

TEST(SpectralNorm, Errors) {
  try {
    klnmf::spectral_norm(Matrix(2, 3, 0.0));
    FAIL();
  } catch (const klnmf::Error& e) {
    EXPECT_STREQ(e.what(), "zero matrix has no usable spectral norm for step sizes");
  }
  // unreachable tolerance, two iterations allowed
  std::mt19937_64 g(1);
  const Matrix k = oracle::random_positive(10, 10, g);
  try {
    klnmf::spectral_norm(k, 1e-300, 2);
    FAIL();
  } catch (const klnmf::ConvergenceError& e) {
    EXPECT_GT(e.best_estimate(), 0.0);
  }
  EXPECT_THROW(klnmf::spectral_norm(k, 0.0), klnmf::Error);
}

TEST(RandomInit, ShapesAndFloor) {
  const auto [w, h] = klnmf::random_init(2, 3, 1, 0.1, klnmf::RandomSeed{42});
  EXPECT_EQ(w.rows(), 2u);
  EXPECT_EQ(w.cols(), 1u);
  EXPECT_EQ(h.rows(), 1u);
  EXPECT_EQ(h.cols(), 3u);
  for (double x : w.values()) EXPECT_GE(x, 0.1);
  for (double x : h.values()) EXPECT_GE(x, 0.1);
}

TEST(RandomInit, Deterministic) {
  const auto a = klnmf::random_init(5, 6, 2, 0.01, klnmf::RandomSeed{9});
  const auto b = klnmf::random_init(5, 6, 2, 0.01, klnmf::RandomSeed{9});
  EXPECT_TRUE(a.first == b.first);
  EXPECT_TRUE(a.second == b.second);
  const auto c = klnmf::random_init(5, 6, 2, 0.01, klnmf::RandomSeed{10});
  EXPECT_FALSE(a.first == c.first);
}

TEST(RandomInit, FoldedNormalMean) {
  const auto [w, h] = klnmf::random_init(100, 100, 10, 1e-3, klnmf::RandomSeed{1});
  const double mean = (klnmf::total_sum(w) + klnmf::total_sum(h)) / (w.size() + h.size());
  EXPECT_NEAR(mean, std::sqrt(2.0 / M_PI) + 1e-3, 0.03);
}

TEST(RandomInit, RejectsNonPositiveOffset) {
  EXPECT_THROW(klnmf::random_init(2, 2, 1, 0.0, klnmf::RandomSeed{1}), klnmf::Error);
  EXPECT_THROW(klnmf::random_init(2, 2, 1, -1.0, klnmf::RandomSeed{1}), klnmf::Error);
}
