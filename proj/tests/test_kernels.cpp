#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "klnmf/fpa.hpp"
#include "klnmf/kernels.hpp"
#include "oracles.hpp"

using klnmf::Matrix;
namespace kn = klnmf::kernels;

namespace {

struct Shape {
  std::size_t p, q, m;
};

class KernelsAgree : public testing::TestWithParam<int> {
 protected:
  void SetUp() override { kn::set_num_threads(GetParam()); }
  void TearDown() override { kn::set_num_threads(1); }
};

}  // namespace

TEST_P(KernelsAgree, Gemm) {
  std::mt19937_64 g(21);
  for (Shape s : {Shape{1, 1, 1}, Shape{7, 3, 5}, Shape{33, 10, 70}}) {
    const Matrix a = oracle::random_positive(s.p, s.q, g);
    const Matrix b = oracle::random_positive(s.q, s.m, g);
    const Matrix c = oracle::random_positive(s.p, s.m, g);
    Matrix x(s.p, s.m), y(s.p, s.m);
    kn::serial::gemm(a, b, x);
    kn::omp::gemm(a, b, y);
    EXPECT_TRUE(x == y);
    Matrix xt(s.q, s.m), yt(s.q, s.m);
    kn::serial::gemm_tn(a, c, xt);
    kn::omp::gemm_tn(a, c, yt);
    EXPECT_TRUE(xt == yt);
    Matrix xn(s.p, s.q), yn(s.p, s.q);
    kn::serial::gemm_nt(c, b, xn);
    kn::omp::gemm_nt(c, b, yn);
    EXPECT_TRUE(xn == yn);
    EXPECT_LE(klnmf::max_abs_diff(x, oracle::naive_product(a, b)), 1e-12);
  }
}

TEST_P(KernelsAgree, KlRowSums) {
  std::mt19937_64 g(4);
  Matrix v = oracle::random_positive(40, 17, g);
  v(3, 4) = 0.0;
  const Matrix p = oracle::random_positive(40, 17, g);
  std::vector<double> a(40), b(40);
  EXPECT_TRUE(kn::serial::kl_row_sums(v, p, a));
  EXPECT_TRUE(kn::omp::kl_row_sums(v, p, b));
  EXPECT_EQ(a, b);
  double total = 0.0;
  for (double x : a) total += x;
  EXPECT_NEAR(total, oracle::kl(v, p), 1e-12 * (1 + std::abs(total)));

  Matrix bad = p;
  bad(5, 2) = 0.0;
  EXPECT_FALSE(kn::serial::kl_row_sums(v, bad, a));
  EXPECT_FALSE(kn::omp::kl_row_sums(v, bad, b));
}

TEST_P(KernelsAgree, Steps) {
  std::mt19937_64 g(8);
  const std::size_t p = 25, q = 6, m = 13;
  const Matrix a = oracle::random_positive(p, m, g);
  const Matrix kx = oracle::random_positive(p, m, g);
  Matrix y1 = oracle::random_positive(p, m, g, -1.0, 1.0);
  y1.set_role(klnmf::Role::dual);
  Matrix y2 = y1;
  std::vector<double> sigma(m), tau(m), cs(q);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (auto& s : sigma) s = u(g);
  for (auto& t : tau) t = u(g);
  for (auto& c : cs) c = u(g);
  kn::serial::dual_step(y1, kx, sigma, a);
  kn::omp::dual_step(y2, kx, sigma, a);
  EXPECT_TRUE(y1 == y2);

  Matrix x1 = oracle::random_positive(q, m, g), xb1(q, m), xo1 = x1;
  Matrix x2 = x1, xb2(q, m), xo2 = x1;
  Matrix kty = oracle::random_positive(q, m, g, -2.0, 0.0);
  kn::serial::primal_step(x1, xb1, xo1, kty, tau, cs);
  kn::omp::primal_step(x2, xb2, xo2, kty, tau, cs);
  EXPECT_TRUE(x1 == x2);
  EXPECT_TRUE(xb1 == xb2);
  EXPECT_TRUE(xo1 == xo2);

  Matrix r1(p, m), r2(p, m);
  kn::serial::ratio(a, kx, 1e-16, r1);
  kn::omp::ratio(a, kx, 1e-16, r2);
  EXPECT_TRUE(r1 == r2);
}

TEST_P(KernelsAgree, WholeSolverRun) {
  std::mt19937_64 g(31);
  const klnmf::NdProblem prob(oracle::random_positive(30, 12, g),
                              oracle::random_positive(30, 5, g));
  const Matrix x0(5, 12, 0.5);
  const auto steps = klnmf::heuristic_step_sizes(prob);
  klnmf::NdOptions o;
  o.n_iter = 200;
  o.backend = kn::Backend::serial;
  const auto a = klnmf::fpa_nd(prob, x0, klnmf::initial_dual(prob, x0), steps, o);
  o.backend = kn::Backend::omp;
  const auto b = klnmf::fpa_nd(prob, x0, klnmf::initial_dual(prob, x0), steps, o);
  EXPECT_TRUE(a.x == b.x);
  EXPECT_TRUE(a.y == b.y);
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelsAgree, testing::Values(1, 2, 3, 8));

TEST(KernelPrimalStep, MatchesFormula) {
  Matrix x = Matrix::from_rows({{1.0, 0.2}, {0.5, 3.0}});
  Matrix xo = Matrix::from_rows({{0.9, 0.1}, {0.5, 2.0}});
  Matrix xb(2, 2);
  const Matrix kty = Matrix::from_rows({{-0.5, 0.0}, {0.0, -1.0}}, klnmf::Role::dual);
  const std::vector<double> tau{0.5, 0.1}, cs{1.0, 2.0};
  kn::serial::primal_step(x, xb, xo, kty, tau, cs);
  // x(0,0) = 1 - 0.5*(-0.5+1) = 0.75;  x(0,1) = max(0.2 - 0.1*1, 0) = 0.1
  // x(1,0) = max(0.5 - 0.5*2, 0) = 0;  x(1,1) = 3 - 0.1*(-1+2) = 2.9
  EXPECT_DOUBLE_EQ(x(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(x(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(x(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(x(1, 1), 2.9);
  EXPECT_DOUBLE_EQ(xb(0, 0), 2 * 0.75 - 0.9);
  EXPECT_DOUBLE_EQ(xb(1, 1), 2 * 2.9 - 2.0);
  EXPECT_TRUE(xo == x);
}
