// Serial reference kernels vs their OpenMP counterparts, at the shapes one
// primal-dual block sees (K: p x r, x: r x m).

#include <benchmark/benchmark.h>

#include "klnmf/fpa.hpp"
#include "klnmf/io.hpp"
#include "klnmf/kernels.hpp"
#include "klnmf/kl_model.hpp"

namespace {

using klnmf::Matrix;
using klnmf::kernels::Backend;

struct Instance {
  Matrix v, w, h;
  explicit Instance(std::size_t n, std::size_t m, std::size_t r)
      : v(klnmf::synth_matrix(n, m, 0.0, 750.0, {11})) {
    std::tie(w, h) = klnmf::random_init(n, m, r, 1e-2, {12});
  }
};

void args(benchmark::internal::Benchmark* b) {
  b->Args({250, 2000, 50})->Args({361, 2429, 49})->Unit(benchmark::kMillisecond);
}

template <Backend B>
void BM_gemm(benchmark::State& state) {
  Instance in(state.range(0), state.range(1), state.range(2));
  Matrix c(in.v.rows(), in.v.cols());
  const auto& k = klnmf::kernels::kernel_table(B);
  for (auto _ : state) {
    k.gemm(in.w, in.h, c);
    benchmark::DoNotOptimize(c.data());
  }
}

template <Backend B>
void BM_gemm_tn(benchmark::State& state) {
  Instance in(state.range(0), state.range(1), state.range(2));
  Matrix c(in.w.cols(), in.v.cols());
  const auto& k = klnmf::kernels::kernel_table(B);
  for (auto _ : state) {
    k.gemm_tn(in.w, in.v, c);
    benchmark::DoNotOptimize(c.data());
  }
}

template <Backend B>
void BM_kl(benchmark::State& state) {
  Instance in(state.range(0), state.range(1), state.range(2));
  const Matrix p = klnmf::multiply(in.w, in.h);
  std::vector<double> rows(in.v.rows());
  const auto& k = klnmf::kernels::kernel_table(B);
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.kl_row_sums(in.v, p, rows));
  }
}

template <Backend B>
void BM_fpa_iteration(benchmark::State& state) {
  Instance in(state.range(0), state.range(1), state.range(2));
  const klnmf::NdProblem prob(in.v, in.w);
  const auto steps = klnmf::heuristic_step_sizes(prob);
  auto st = klnmf::FpaState::start(in.h, klnmf::initial_dual(prob, in.h));
  klnmf::FpaWorkspace ws(prob);
  for (auto _ : state) {
    klnmf::fpa_iteration(prob, st, steps, ws, klnmf::PrimalConstraint::nonnegative, B);
    benchmark::DoNotOptimize(st.x.data());
  }
}

BENCHMARK(BM_gemm<Backend::serial>)->Apply(args);
BENCHMARK(BM_gemm<Backend::omp>)->Apply(args);
BENCHMARK(BM_gemm_tn<Backend::serial>)->Apply(args);
BENCHMARK(BM_gemm_tn<Backend::omp>)->Apply(args);
BENCHMARK(BM_kl<Backend::serial>)->Apply(args);
BENCHMARK(BM_kl<Backend::omp>)->Apply(args);
BENCHMARK(BM_fpa_iteration<Backend::serial>)->Apply(args);
BENCHMARK(BM_fpa_iteration<Backend::omp>)->Apply(args);

}  // namespace

BENCHMARK_MAIN();
