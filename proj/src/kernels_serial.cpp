#include <algorithm>
#include <cmath>

#include "klnmf/kernels.hpp"
#include "klnmf/prox_scalar.hpp"

namespace klnmf::kernels::serial {

void gemm(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t n = a.rows(), inner = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.data() + i * m;
    std::fill(ci, ci + m, 0.0);
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a(i, k);
      const double* bk = b.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t inner = a.rows(), n = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.data() + i * m;
    std::fill(ci, ci + m, 0.0);
    for (std::size_t k = 0; k < inner; ++k) {
      const double aki = a(k, i);
      const double* bk = b.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aki * bk[j];
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t n = a.rows(), inner = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data() + i * inner;
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b.data() + j * inner;
      double acc = 0.0;
      for (std::size_t k = 0; k < inner; ++k) acc += ai[k] * bj[k];
      c(i, j) = acc;
    }
  }
}

bool kl_row_sums(const Matrix& v, const Matrix& p, std::span<double> out) {
  bool ok = true;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < v.cols(); ++j) acc += kl_term(v(i, j), p(i, j));
    if (std::isnan(acc)) ok = false;
    out[i] = acc;
  }
  return ok;
}

void dual_step(Matrix& y, const Matrix& kx, std::span<const double> sigma,
               const Matrix& a) {
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      y(i, j) = prox_f_star_scalar(y(i, j) + sigma[j] * kx(i, j), sigma[j],
                                   a(i, j));
    }
  }
}

void primal_step(Matrix& x, Matrix& x_bar, Matrix& x_old, const Matrix& kty,
                 std::span<const double> tau,
                 std::span<const double> col_sums) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double next =
          std::max(x(i, j) - tau[j] * (kty(i, j) + col_sums[i]), 0.0);
      x(i, j) = next;
      x_bar(i, j) = 2.0 * next - x_old(i, j);
      x_old(i, j) = next;
    }
  }
}

void ratio(const Matrix& v, const Matrix& p, double eps, Matrix& out) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.data()[k] = v.data()[k] / std::max(p.data()[k], eps);
  }
}

}  // namespace klnmf::kernels::serial
