#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "klnmf/kernels.hpp"
#include "klnmf/prox_scalar.hpp"

namespace klnmf::kernels {

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

const KernelTable& kernel_table(Backend backend) {
  static const KernelTable serial_table{
      serial::gemm,      serial::gemm_tn,   serial::gemm_nt, serial::kl_row_sums,
      serial::dual_step, serial::primal_step, serial::ratio};
  static const KernelTable omp_table{
      omp::gemm,      omp::gemm_tn,     omp::gemm_nt, omp::kl_row_sums,
      omp::dual_step, omp::primal_step, omp::ratio};
  return backend == Backend::serial ? serial_table : omp_table;
}

namespace omp {

// Loop indices are signed for OpenMP; each output row is owned by one thread.

void gemm(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::int64_t n = static_cast<std::int64_t>(a.rows());
  const std::size_t inner = a.cols(), m = b.cols();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
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
  const std::size_t inner = a.rows(), m = b.cols();
  const std::int64_t n = static_cast<std::int64_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
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
  const std::int64_t n = static_cast<std::int64_t>(a.rows());
  const std::size_t inner = a.cols(), m = b.rows();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
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
  const std::int64_t n = static_cast<std::int64_t>(v.rows());
  const std::size_t m = v.cols();
  int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
  for (std::int64_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += kl_term(v(i, j), p(i, j));
    if (std::isnan(acc)) bad |= 1;
    out[i] = acc;
  }
  return bad == 0;
}

void dual_step(Matrix& y, const Matrix& kx, std::span<const double> sigma,
               const Matrix& a) {
  const std::int64_t n = static_cast<std::int64_t>(y.rows());
  const std::size_t m = y.cols();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      y(i, j) = prox_f_star_scalar(y(i, j) + sigma[j] * kx(i, j), sigma[j],
                                   a(i, j));
    }
  }
}

void primal_step(Matrix& x, Matrix& x_bar, Matrix& x_old, const Matrix& kty,
                 std::span<const double> tau,
                 std::span<const double> col_sums) {
  const std::int64_t n = static_cast<std::int64_t>(x.rows());
  const std::size_t m = x.cols();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double next =
          std::max(x(i, j) - tau[j] * (kty(i, j) + col_sums[i]), 0.0);
      x(i, j) = next;
      x_bar(i, j) = 2.0 * next - x_old(i, j);
      x_old(i, j) = next;
    }
  }
}

void ratio(const Matrix& v, const Matrix& p, double eps, Matrix& out) {
  const std::int64_t n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    out.data()[k] = v.data()[k] / std::max(p.data()[k], eps);
  }
}

}  // namespace omp
}  // namespace klnmf::kernels
