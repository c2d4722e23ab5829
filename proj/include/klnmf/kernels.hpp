#pragma once

// Dense kernels behind every solver. `serial` is the reference; `omp`
// parallelizes over output rows with the same per-element arithmetic, so the
// two agree bit-for-bit for any thread count. Outputs must be pre-sized.

#include <cstddef>
#include <span>

#include "klnmf/matrix.hpp"

namespace klnmf::kernels {

#define KLNMF_KERNEL_DECLS                                                    \
  /* c = a * b */                                                             \
  void gemm(const Matrix& a, const Matrix& b, Matrix& c);                     \
  /* c = a^T * b */                                                           \
  void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);                  \
  /* c = a * b^T */                                                           \
  void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);                  \
  /* Per-row generalized KL sums; false if any term is undefined. */          \
  bool kl_row_sums(const Matrix& v, const Matrix& p, std::span<double> out);  \
  /* y <- prox_{sigma F*}(y + sigma o kx), sigma indexed by column. */        \
  void dual_step(Matrix& y, const Matrix& kx, std::span<const double> sigma,  \
                 const Matrix& a);                                            \
  /* x <- (x - tau o (kty + col_sums))_+, x_bar <- 2x - x_old, x_old <- x. */ \
  void primal_step(Matrix& x, Matrix& x_bar, Matrix& x_old, const Matrix& kty,\
                   std::span<const double> tau,                               \
                   std::span<const double> col_sums);                         \
  /* out = v / max(p, eps) */                                                 \
  void ratio(const Matrix& v, const Matrix& p, double eps, Matrix& out);

namespace serial {
KLNMF_KERNEL_DECLS
}  // namespace serial

namespace omp {
KLNMF_KERNEL_DECLS
}  // namespace omp

#undef KLNMF_KERNEL_DECLS

enum class Backend { serial, omp };

/// Function table for one backend, so solvers can be run on either.
struct KernelTable {
  void (*gemm)(const Matrix&, const Matrix&, Matrix&);
  void (*gemm_tn)(const Matrix&, const Matrix&, Matrix&);
  void (*gemm_nt)(const Matrix&, const Matrix&, Matrix&);
  bool (*kl_row_sums)(const Matrix&, const Matrix&, std::span<double>);
  void (*dual_step)(Matrix&, const Matrix&, std::span<const double>,
                    const Matrix&);
  void (*primal_step)(Matrix&, Matrix&, Matrix&, const Matrix&,
                      std::span<const double>, std::span<const double>);
  void (*ratio)(const Matrix&, const Matrix&, double, Matrix&);
};

const KernelTable& kernel_table(Backend backend);

/// Threads used by the omp kernels; 0 leaves the OpenMP default.
void set_num_threads(int n);
int max_threads();

}  // namespace klnmf::kernels
