#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "klnmf/error.hpp"
#include "klnmf/prox.hpp"
#include "oracles.hpp"

using klnmf::Matrix;

namespace {

struct Instance {
  double y, sigma, a;
};

std::vector<Instance> fuzz_set(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> y(-10.0, 10.0), s(0.0, 10.0), a(0.0, 10.0);
  std::vector<Instance> out;
  while (out.size() < count) {
    const double sigma = s(g);
    if (sigma == 0.0) continue;
    out.push_back({y(g), sigma, a(g)});
  }
  return out;
}

}  // namespace

TEST(ProxFStar, Examples) {
  EXPECT_DOUBLE_EQ(klnmf::prox_f_star_scalar(0.0, 1.0, 1.0), -1.0);
  EXPECT_EQ(klnmf::prox_f_star_scalar(2.5, 1.0, 0.0), 0.0);
  EXPECT_EQ(klnmf::prox_f_star_scalar(-2.5, 1.0, 0.0), -2.5);
  EXPECT_NEAR(klnmf::prox_f_star_scalar(3.0, 1.0, 1.0), 0.5 * (3.0 - std::sqrt(13.0)), 1e-15);
  EXPECT_NEAR(oracle::prox_f_star(3.0, 1.0, 1.0), -0.302776, 1e-6);
}

TEST(ProxFStar, MatchesBisectionOracle) {
  for (const auto& in : fuzz_set(2000, 17)) {
    const double got = klnmf::prox_f_star_scalar(in.y, in.sigma, in.a);
    const double want = oracle::prox_f_star(in.y, in.sigma, in.a);
    EXPECT_NEAR(got, want, 1e-8 * std::max(1.0, std::abs(want)))
        << "y=" << in.y << " sigma=" << in.sigma << " a=" << in.a;
  }
}

TEST(ProxFStar, StrictlyNegativeWhereDataPositive) {
  for (const auto& in : fuzz_set(2000, 18)) {
    const double got = klnmf::prox_f_star_scalar(in.y * 1e6, in.sigma, in.a + 1e-12);
    EXPECT_LT(got, 0.0);
  }
}

TEST(ProxFStar, MoreauIdentity) {
  for (const auto& in : fuzz_set(2000, 19)) {
    if (in.a == 0.0) continue;
    const double lhs = klnmf::prox_f_star_scalar(in.y, in.sigma, in.a) +
                       in.sigma * oracle::prox_f_scaled(in.y / in.sigma, in.sigma, in.a);
    EXPECT_NEAR(lhs, in.y, 1e-8 * std::max(1.0, std::abs(in.y)))
        << "y=" << in.y << " sigma=" << in.sigma << " a=" << in.a;
  }
}

TEST(ProxFStar, MatrixFormUsesColumnSteps) {
  const Matrix y = Matrix::from_rows({{0.0, 1.0}, {-1.0, 2.0}}, klnmf::Role::dual);
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 0.5}});
  const std::vector<double> sigma{0.5, 2.0};
  const Matrix out = klnmf::prox_f_star(y, sigma, a);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_EQ(out(i, j), klnmf::prox_f_star_scalar(y(i, j), sigma[j], a(i, j)));
  const Matrix flat = klnmf::prox_f_star(y, 0.5, a);
  EXPECT_EQ(flat(1, 1), klnmf::prox_f_star_scalar(2.0, 0.5, 0.5));
  EXPECT_THROW(klnmf::prox_f_star(y, std::vector<double>{1, 2, 3}, a), klnmf::Error);
}

TEST(ProxG, Examples) {
  const std::vector<double> cs{0.5, 0.5};
  const Matrix x = Matrix::column(std::vector<double>{1.0, 0.1});
  const Matrix out = klnmf::prox_g(x, 1.0, cs);
  EXPECT_DOUBLE_EQ(out(0, 0), 0.5);
  EXPECT_EQ(out(1, 0), 0.0);
  EXPECT_TRUE(klnmf::prox_g(Matrix(2, 1, 0.0), 1.0, cs) == Matrix(2, 1, 0.0));
  const Matrix big = Matrix::column(std::vector<double>{3.0, 4.0});
  const Matrix inactive = klnmf::prox_g(big, 0.1, cs);
  EXPECT_DOUBLE_EQ(inactive(0, 0), 3.0 - 0.05);
  EXPECT_DOUBLE_EQ(inactive(1, 0), 4.0 - 0.05);
}

TEST(ProxG, MatchesCoordinateMinimizer) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> x(-10.0, 10.0), t(1e-6, 10.0), c(0.0, 10.0);
  for (int k = 0; k < 2000; ++k) {
    const double xv = x(g), tv = t(g), cv = c(g);
    const double got = klnmf::prox_g_scalar(xv, tv, cv);
    EXPECT_NEAR(got, oracle::prox_g(xv, tv, cv), 1e-10);
  }
}

TEST(ProxG, IsNonExpansive) {
  std::mt19937_64 g(24);
  const std::vector<double> cs{0.3, 1.2, 0.8};
  for (int k = 0; k < 500; ++k) {
    const Matrix a = oracle::random_positive(3, 4, g, -3.0, 3.0);
    const Matrix b = oracle::random_positive(3, 4, g, -3.0, 3.0);
    const Matrix pa = klnmf::prox_g(a, 0.7, cs), pb = klnmf::prox_g(b, 0.7, cs);
    Matrix da(3, 4), db(3, 4);
    for (std::size_t i = 0; i < 12; ++i) {
      da.data()[i] = pa.data()[i] - pb.data()[i];
      db.data()[i] = a.data()[i] - b.data()[i];
    }
    EXPECT_LE(klnmf::frobenius_norm(da), klnmf::frobenius_norm(db) + 1e-15);
  }
}

TEST(ProxG, LinearTermFoldedIntoGradientStep) {
  // (x - tau K^T(y + 1))_+ == prox_g(x - tau K^T y)
  std::mt19937_64 g(25);
  for (int k = 0; k < 200; ++k) {
    const Matrix kmat = oracle::random_positive(6, 3, g);
    Matrix y = oracle::random_positive(6, 2, g, -2.0, 0.0);
    y.set_role(klnmf::Role::dual);
    const Matrix x = oracle::random_positive(3, 2, g);
    const auto cs = klnmf::column_sums(kmat);
    const Matrix kty = klnmf::multiply_tn(kmat, y);
    const double tau = 0.3;
    Matrix shifted(3, 2, 0.0, klnmf::Role::dual), folded(3, 2);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        shifted(i, j) = x(i, j) - tau * kty(i, j);
        folded(i, j) = std::max(x(i, j) - tau * (kty(i, j) + cs[i]), 0.0);
      }
    EXPECT_LE(klnmf::max_abs_diff(klnmf::prox_g(shifted, tau, cs), folded), 1e-14);
  }
}

TEST(Simplex, Examples) {
  const std::vector<double> on{0.2, 0.3, 0.5};
  const auto same = klnmf::project_simplex(on);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(same[i], on[i], 1e-15);
  EXPECT_EQ(klnmf::project_simplex(std::vector<double>{2, 0}), (std::vector<double>{1, 0}));
  const auto third = klnmf::project_simplex(std::vector<double>{0.5, 0.5, 1.0});
  EXPECT_NEAR(third[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(third[1], 1.0 / 6, 1e-15);
  EXPECT_NEAR(third[2], 2.0 / 3, 1e-15);
  const auto brute = oracle::simplex_brute({0.5, 0.5, 1.0});
  EXPECT_NEAR(brute[2], 2.0 / 3, 1e-15);
  EXPECT_THROW(klnmf::project_simplex(std::vector<double>{}), klnmf::Error);
}

TEST(Simplex, MatchesBruteForce) {
  std::mt19937_64 g(26);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> v(len(g));
    for (double& x : v) x = u(g);
    const auto got = klnmf::project_simplex(v);
    const auto want = oracle::simplex_brute(v);
    ASSERT_EQ(got.size(), want.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-10);
      EXPECT_GE(got[i], 0.0);
      sum += got[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ProxGSimplex, Examples) {
  const std::vector<double> cs{1.0, 1.0};
  const Matrix on = Matrix::column(std::vector<double>{0.25, 0.75});
  EXPECT_TRUE(klnmf::prox_g_simplex(on, 0.0, cs) == on);
  const Matrix out = klnmf::prox_g_simplex(Matrix::column(std::vector<double>{1.0, 0.0}), 1.0, cs);
  EXPECT_EQ(out(0, 0), 1.0);
  EXPECT_EQ(out(1, 0), 0.0);
}

TEST(ProxGSimplex, ColumnsOnSimplex) {
  std::mt19937_64 g(27);
  for (int k = 0; k < 300; ++k) {
    const Matrix x = oracle::random_positive(5, 4, g, -2.0, 2.0);
    const std::vector<double> cs{0.1, 0.4, 1.0, 2.0, 0.7};
    const std::vector<double> tau{0.2, 1.0, 0.0, 3.0};
    const Matrix out = klnmf::prox_g_simplex(x, tau, cs);
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> shifted(5);
      for (std::size_t i = 0; i < 5; ++i) shifted[i] = x(i, j) - tau[j] * cs[i];
      const auto want = oracle::simplex_brute(shifted);
      double sum = 0.0;
      for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(out(i, j), want[i], 1e-10);
        sum += out(i, j);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}
