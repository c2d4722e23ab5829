#include "klnmf/fpa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "klnmf/error.hpp"
#include "klnmf/prox.hpp"

namespace klnmf {

namespace {

bool all_finite(const Matrix& m) {
  for (double v : m.values()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void simplex_primal_step(FpaState& st, const Matrix& kty,
                         std::span<const double> tau,
                         std::span<const double> col_sums) {
  std::vector<double> shifted(st.x.rows());
  for (std::size_t j = 0; j < st.x.cols(); ++j) {
    for (std::size_t i = 0; i < st.x.rows(); ++i) {
      shifted[i] = st.x(i, j) - tau[j] * (kty(i, j) + col_sums[i]);
    }
    const auto projected = project_simplex(shifted);
    for (std::size_t i = 0; i < st.x.rows(); ++i) {
      st.x(i, j) = projected[i];
      st.x_bar(i, j) = 2.0 * projected[i] - st.x_old(i, j);
      st.x_old(i, j) = projected[i];
    }
  }
}

// Scales each nonzero column of W to unit sum and the matching row of H by
// the inverse. Returns the number of zero columns left untouched.
std::size_t normalize_in_place(Matrix& w, Matrix& h) {
  const auto sums = column_sums(w);
  std::size_t zeros = 0;
  for (std::size_t j = 0; j < sums.size(); ++j) {
    const double s = sums[j];
    if (!(s > 0.0)) {
      ++zeros;
      continue;
    }
    for (std::size_t i = 0; i < w.rows(); ++i) w(i, j) /= s;
    for (double& v : h.row(j)) v *= s;
  }
  return zeros;
}

std::size_t repair_zero_columns(Matrix& w, double value) {
  const auto sums = column_sums(w);
  std::size_t repaired = 0;
  for (std::size_t j = 0; j < sums.size(); ++j) {
    if (sums[j] > 0.0) continue;
    for (std::size_t i = 0; i < w.rows(); ++i) w(i, j) = value;
    ++repaired;
  }
  return repaired;
}

std::size_t repair_zero_rows(Matrix& h, double value) {
  std::size_t repaired = 0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    auto row = h.row(i);
    if (std::any_of(row.begin(), row.end(), [](double v) { return v > 0.0; })) {
      continue;
    }
    std::fill(row.begin(), row.end(), value);
    ++repaired;
  }
  return repaired;
}

// Trace value of x: +inf when K x vanishes on positive data.
double model_objective(const NdProblem& prob, const Matrix& x) {
  return kl_divergence_extended(prob.data(), multiply(prob.factor(), x));
}

// Runs `count` iterations of one convex block in place.
void run_block(const NdProblem& prob, Matrix& x, Matrix& y, std::size_t count,
               kernels::Backend backend, std::size_t first_access) {
  const StepSizes steps = heuristic_step_sizes(prob);
  FpaState st = FpaState::start(x, y);
  FpaWorkspace ws(prob);
  for (std::size_t it = 0; it < count; ++it) {
    fpa_iteration(prob, st, steps, ws, PrimalConstraint::nonnegative, backend);
  }
  if (!all_finite(st.x) || !all_finite(st.y)) {
    throw NumericalError("nmf_fpa: non-finite iterate", first_access + count);
  }
  x = std::move(st.x);
  y = std::move(st.y);
}

}  // namespace

StepSizes heuristic_step_sizes(const NdProblem& prob, double norm_k) {
  if (!(norm_k > 0.0)) throw Error("heuristic_step_sizes: norm_k must be positive");
  double k_total = 0.0;
  for (double c : prob.col_sums()) k_total += c;
  const double sqrt_p = std::sqrt(static_cast<double>(prob.p()));
  const double sqrt_q = std::sqrt(static_cast<double>(prob.q()));
  const auto a_sums = column_sums(prob.data());

  StepSizes steps;
  steps.norm_k = norm_k;
  steps.sigma.resize(a_sums.size());
  steps.tau.resize(a_sums.size());
  for (std::size_t j = 0; j < a_sums.size(); ++j) {
    if (!(a_sums[j] > 0.0)) {
      std::ostringstream msg;
      msg << "empty data column " << j << ": step sizes undefined";
      throw Error(msg.str());
    }
    steps.sigma[j] = sqrt_p * k_total / (sqrt_q * norm_k * a_sums[j]);
    steps.tau[j] = sqrt_q * a_sums[j] / (sqrt_p * norm_k * k_total);
  }
  return steps;
}

StepSizes heuristic_step_sizes(const NdProblem& prob) {
  return heuristic_step_sizes(prob, spectral_norm(prob.factor()));
}

FpaState FpaState::start(const Matrix& x0, const Matrix& y0) {
  FpaState st{x0, x0, x0, y0};
  st.y.set_role(Role::dual);
  return st;
}

Matrix initial_dual(const NdProblem& prob, const Matrix& x0) {
  Matrix y = multiply(prob.factor(), x0);
  y.set_role(Role::dual);
  return y;
}

FpaWorkspace::FpaWorkspace(const NdProblem& prob)
    : kx(prob.p(), prob.batch(), 0.0, Role::dual),
      kty(prob.q(), prob.batch(), 0.0, Role::dual) {}

void fpa_iteration(const NdProblem& prob, FpaState& state,
                   const StepSizes& steps, FpaWorkspace& ws,
                   PrimalConstraint constraint, kernels::Backend backend) {
  const auto& k = kernels::kernel_table(backend);
  k.gemm(prob.factor(), state.x_bar, ws.kx);
  k.dual_step(state.y, ws.kx, steps.sigma, prob.data());
  k.gemm_tn(prob.factor(), state.y, ws.kty);
  if (constraint == PrimalConstraint::nonnegative) {
    k.primal_step(state.x, state.x_bar, state.x_old, ws.kty, steps.tau,
                  prob.col_sums());
  } else {
    simplex_primal_step(state, ws.kty, steps.tau, prob.col_sums());
  }
}

bool gap_stopping_enabled(double gap_tol) {
  return gap_tol > 0.0 && std::isfinite(gap_tol);
}

NdResult fpa_nd(const NdProblem& prob, const Matrix& x0, const Matrix& y0,
                const StepSizes& steps, const NdOptions& options) {
  if (x0.rows() != prob.q() || x0.cols() != prob.batch()) {
    throw Error("fpa_nd: x0 has the wrong shape");
  }
  if (y0.rows() != prob.p() || y0.cols() != prob.batch()) {
    throw Error("fpa_nd: y0 has the wrong shape");
  }
  if (steps.sigma.size() != prob.batch() || steps.tau.size() != prob.batch()) {
    throw Error("fpa_nd: one step size per data column required");
  }
  if (options.n_iter == 0) throw Error("fpa_nd: n_iter must be at least 1");
  if (options.trace_stride == 0) throw Error("fpa_nd: trace_stride must be at least 1");
  require_nonnegative(x0, "fpa_nd x0");

  const bool certify = options.constraint == PrimalConstraint::nonnegative;
  const bool stop_on_gap = certify && gap_stopping_enabled(options.gap_tol);
  Stopwatch clock;
  NdResult result;
  FpaState st = FpaState::start(x0, y0);
  FpaWorkspace ws(prob);

  result.trace.push_back({.data_access = 0,
                          .primal = model_objective(prob, x0),
                          .wall_seconds = clock.seconds()});

  for (std::size_t it = 1; it <= options.n_iter; ++it) {
    fpa_iteration(prob, st, steps, ws, options.constraint, options.backend);
    if (!all_finite(st.x)) throw NumericalError("fpa_nd: non-finite iterate", it);
    result.iterations = it;
    if (it % options.trace_stride != 0 && it != options.n_iter) continue;

    TraceRecord rec{.data_access = it};
    if (certify) {
      const Certificate cert = certificate_extended(prob, st.x, st.y);
      rec.primal = cert.primal_value;
      rec.dual = cert.dual_value;
      rec.gap = cert.gap;
    } else {
      rec.primal = model_objective(prob, st.x);
    }
    rec.wall_seconds = clock.seconds();
    result.trace.push_back(rec);
    if (stop_on_gap && *rec.gap <= options.gap_tol * std::abs(rec.primal)) {
      result.reached_gap_tol = true;
      break;
    }
  }
  result.x = std::move(st.x);
  result.y = std::move(st.y);
  return result;
}

NdResult fpa_nd(const NdProblem& prob, const Matrix& x0, const Matrix& y0,
                const StepSizes& steps, std::size_t n_iter, double gap_tol) {
  NdOptions options;
  options.n_iter = n_iter;
  options.gap_tol = gap_tol;
  return fpa_nd(prob, x0, y0, steps, options);
}

std::pair<Matrix, Matrix> normalize_factors(const Matrix& w, const Matrix& h) {
  if (w.cols() != h.rows()) throw Error("normalize_factors: rank mismatch");
  const auto sums = column_sums(w);
  for (double s : sums) {
    if (!(s > 0.0)) throw Error("degenerate factor column");
  }
  Matrix wn = w;
  Matrix hn = h;
  normalize_in_place(wn, hn);
  return {std::move(wn), std::move(hn)};
}

NmfResult nmf_fpa(const Matrix& v, const Matrix& w0, const Matrix& h0,
                  const SolveConfig& cfg) {
  if (w0.rows() != v.rows() || h0.cols() != v.cols() || w0.cols() != h0.rows()) {
    throw Error("nmf_fpa: factor shapes do not match V");
  }
  if (cfg.iter_nd == 0) throw Error("nmf_fpa: iter_nd must be at least 1");
  if (cfg.trace_stride == 0) throw Error("nmf_fpa: trace_stride must be at least 1");
  if (!(cfg.repair_value > 0.0)) throw Error("nmf_fpa: repair_value must be positive");
  require_nonnegative(v, "nmf_fpa V");
  require_nonnegative(w0, "nmf_fpa W0");
  require_nonnegative(h0, "nmf_fpa H0");

  Stopwatch clock;
  NmfResult res;
  res.w = w0;
  res.h = h0;
  const Matrix vt = transpose(v);
  Matrix chi = multiply(res.w, res.h);
  chi.set_role(Role::dual);

  if (cfg.record_trace) {
    res.trace.push_back({.data_access = 0,
                         .primal = kl_divergence_extended(v, chi),
                         .wall_seconds = clock.seconds()});
  }

  const bool stop_on_gap = gap_stopping_enabled(cfg.gap_tol);
  while (res.data_access < cfg.max_data_access) {
    const std::size_t inner =
        std::min(cfg.iter_nd, cfg.max_data_access - res.data_access);

    // W block: K = H^T, a = rows of V, dual = chi^T.
    res.repairs += repair_zero_rows(res.h, cfg.repair_value);
    normalize_in_place(res.w, res.h);
    {
      const NdProblem prob(vt, transpose(res.h));
      Matrix wt = transpose(res.w);
      Matrix chit = transpose(chi);
      run_block(prob, wt, chit, inner, cfg.backend, res.data_access);
      res.w = transpose(wt);
      chi = transpose(chit);
    }

    // H block: K = W, a = columns of V, dual = chi.
    res.repairs += repair_zero_columns(res.w, cfg.repair_value);
    normalize_in_place(res.w, res.h);
    const NdProblem prob(v, res.w);
    run_block(prob, res.h, chi, inner, cfg.backend, res.data_access);

    res.data_access += inner;
    ++res.outer_iterations;

    const bool last = res.data_access >= cfg.max_data_access;
    const bool due = res.outer_iterations % cfg.trace_stride == 0 || last;
    if ((cfg.record_trace || stop_on_gap) && due) {
      const Certificate cert = certificate_extended(prob, res.h, chi);
      if (cfg.record_trace) {
        res.trace.push_back({.data_access = res.data_access,
                             .primal = cert.primal_value,
                             .dual = cert.dual_value,
                             .gap = cert.gap,
                             .wall_seconds = clock.seconds()});
      }
      if (stop_on_gap && cert.gap <= cfg.gap_tol * std::abs(cert.primal_value)) {
        break;
      }
    }
  }
  if (cfg.record_trace && res.trace.back().data_access != res.data_access) {
    res.trace.push_back({.data_access = res.data_access,
                         .primal = kl_divergence_extended(v, multiply(res.w, res.h)),
                         .wall_seconds = clock.seconds()});
  }
  return res;
}

std::pair<Matrix, Matrix> extend_rank(const Matrix& w, const Matrix& h,
                                      std::size_t r2, double c,
                                      RandomSeed seed, double offset) {
  const std::size_t r = w.cols();
  if (h.rows() != r) throw Error("extend_rank: rank mismatch");
  if (r2 <= r) throw Error("extend_rank: new rank must exceed the current rank");
  if (!(c >= 0.0)) throw Error("extend_rank: pad value must be non-negative");

  Matrix w2(w.rows(), r2, c);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < r; ++j) w2(i, j) = w(i, j);
  }
  Engine engine = make_engine(seed);
  const Matrix nu = abs_normal_matrix(r2 - r, h.cols(), offset, engine);
  Matrix h2(r2, h.cols());
  for (std::size_t i = 0; i < r2; ++i) {
    const auto src = i < r ? h.row(i) : nu.row(i - r);
    std::copy(src.begin(), src.end(), h2.row(i).begin());
  }
  return {std::move(w2), std::move(h2)};
}

NdBatchResult nd_batch(const Matrix& v, const Matrix& fixed,
                       const Matrix& start, Side side, const SolveConfig& cfg) {
  const bool fix_w = side == Side::fix_w;
  const NdProblem prob = fix_w ? NdProblem(v, fixed)
                               : NdProblem(transpose(v), transpose(fixed));
  const Matrix x0 = fix_w ? start : transpose(start);

  NdOptions options;
  options.n_iter = cfg.max_data_access;
  options.gap_tol = cfg.gap_tol;
  options.trace_stride = cfg.trace_stride;
  options.backend = cfg.backend;
  NdResult run = fpa_nd(prob, x0, initial_dual(prob, x0),
                        heuristic_step_sizes(prob), options);

  NdBatchResult out;
  out.factor = fix_w ? std::move(run.x) : transpose(run.x);
  out.dual = fix_w ? std::move(run.y) : transpose(run.y);
  out.trace = std::move(run.trace);
  out.iterations = run.iterations;
  out.reached_gap_tol = run.reached_gap_tol;
  return out;
}

}  // namespace klnmf
