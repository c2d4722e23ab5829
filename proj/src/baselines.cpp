#include "klnmf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <string>
#include <tuple>

#include "klnmf/error.hpp"
#include "klnmf/kernels.hpp"
#include "klnmf/kl_model.hpp"

namespace klnmf {

namespace {

bool all_finite(const Matrix& m) {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return std::isfinite(v); });
}

// In-place lower Cholesky factor of a small SPD matrix.
void cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) throw Error("admm_step: Gram-plus-identity factorization failed");
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
    for (std::size_t k = j + 1; k < n; ++k) a(j, k) = 0.0;
  }
}

// Solves (G + I) X = B for every column of B.
Matrix spd_solve(Matrix gram, const Matrix& b) {
  for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += 1.0;
  cholesky(gram);
  const std::size_t n = gram.rows();
  Matrix x = b;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= gram(i, k) * x(k, c);
      x(i, c) = s / gram(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= gram(k, i) * x(k, c);
      x(i, c) = s / gram(i, i);
    }
  }
  return x;
}

Matrix positive_part(const Matrix& base, const Matrix& alpha, double rho) {
  Matrix out(base.rows(), base.cols());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.data()[k] = std::max(base.data()[k] + alpha.data()[k] / rho, 0.0);
  }
  return out;
}

void dual_ascent(Matrix& alpha, const Matrix& lhs, const Matrix& rhs, double rho) {
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    alpha.data()[k] += rho * (lhs.data()[k] - rhs.data()[k]);
  }
}

double frobenius_diff(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a.data()[k] - b.data()[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::pair<Matrix, Matrix> mu_step(const Matrix& v, const Matrix& w,
                                  const Matrix& h, Fixed fixed) {
  if (w.rows() != v.rows() || h.cols() != v.cols() || w.cols() != h.rows()) {
    throw Error("mu_step: factor shapes do not match V");
  }
  const auto& k = kernels::kernel_table(kernels::Backend::omp);
  Matrix w2 = w;
  Matrix h2 = h;
  Matrix model(v.rows(), v.cols());
  Matrix ratio(v.rows(), v.cols());

  if (fixed != Fixed::w) {
    k.gemm(w2, h2, model);
    k.ratio(v, model, kFloorEps, ratio);
    Matrix num(w.rows(), w.cols());
    k.gemm_nt(ratio, h2, num);
    const auto den = row_sums(h2);
    for (std::size_t i = 0; i < w2.rows(); ++i) {
      for (std::size_t a = 0; a < w2.cols(); ++a) {
        w2(i, a) *= num(i, a) / std::max(den[a], kFloorEps);
      }
    }
  }
  if (fixed != Fixed::h) {
    k.gemm(w2, h2, model);
    k.ratio(v, model, kFloorEps, ratio);
    Matrix num(h.rows(), h.cols());
    k.gemm_tn(w2, ratio, num);
    const auto den = column_sums(w2);
    for (std::size_t a = 0; a < h2.rows(); ++a) {
      const double d = std::max(den[a], kFloorEps);
      for (std::size_t mu = 0; mu < h2.cols(); ++mu) h2(a, mu) *= num(a, mu) / d;
    }
  }
  if (!all_finite(w2) || !all_finite(h2)) throw Error("mu_step: non-finite result");
  return {std::move(w2), std::move(h2)};
}

AdmmState AdmmState::start(const Matrix& w0, const Matrix& h0, double rho) {
  if (!(rho > 0.0)) throw Error("ADMM: rho must be positive");
  AdmmState s;
  s.x = multiply(w0, h0);
  s.y = w0;
  s.z = h0;
  s.w = w0;
  s.h = h0;
  s.alpha_x = Matrix(s.x.rows(), s.x.cols(), 0.0, Role::dual);
  s.alpha_y = Matrix(s.y.rows(), s.y.cols(), 0.0, Role::dual);
  s.alpha_z = Matrix(s.z.rows(), s.z.cols(), 0.0, Role::dual);
  s.x.set_role(Role::dual);
  s.y.set_role(Role::dual);
  s.z.set_role(Role::dual);
  s.rho = rho;
  return s;
}

Matrix admm_x_update(const Matrix& v, const Matrix& yz, const Matrix& alpha_x,
                     double rho) {
  require_same_shape(v, yz, "admm_x_update");
  require_same_shape(v, alpha_x, "admm_x_update");
  Matrix x(v.rows(), v.cols(), 0.0, Role::dual);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double b = rho * yz.data()[k] - alpha_x.data()[k] - 1.0;
    x.data()[k] = (b + std::sqrt(b * b + 4.0 * rho * v.data()[k])) / (2.0 * rho);
  }
  return x;
}

AdmmState admm_step(const Matrix& v, AdmmState s, Fixed fixed) {
  if (!(s.rho > 0.0)) throw Error("admm_step: rho must be positive");
  if (s.x.rows() != v.rows() || s.x.cols() != v.cols() ||
      s.y.rows() != v.rows() || s.z.cols() != v.cols() ||
      s.y.cols() != s.z.rows()) {
    throw Error("admm_step: state shapes do not match V");
  }
  const double rho = s.rho;
  const auto& k = kernels::kernel_table(kernels::Backend::omp);
  const std::size_t n = v.rows(), m = v.cols(), r = s.y.cols();

  if (fixed != Fixed::w) {
    // Y^T <- (Z Z^T + I)^{-1} (Z X^T + W^T + (Z alpha_X^T - alpha_Y^T) / rho)
    Matrix gram(r, r);
    k.gemm_nt(s.z, s.z, gram);
    Matrix zx(r, n), za(r, n);
    k.gemm_nt(s.z, s.x, zx);
    k.gemm_nt(s.z, s.alpha_x, za);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t i = 0; i < n; ++i) {
        zx(a, i) += s.w(i, a) + (za(a, i) - s.alpha_y(i, a)) / rho;
      }
    }
    s.y = transpose(spd_solve(std::move(gram), zx));
    s.y.set_role(Role::dual);
  }
  if (fixed != Fixed::h) {
    // Z <- (Y^T Y + I)^{-1} (Y^T X + H + (Y^T alpha_X - alpha_Z) / rho)
    Matrix gram(r, r);
    k.gemm_tn(s.y, s.y, gram);
    Matrix yx(r, m), ya(r, m);
    k.gemm_tn(s.y, s.x, yx);
    k.gemm_tn(s.y, s.alpha_x, ya);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t j = 0; j < m; ++j) {
        yx(a, j) += s.h(a, j) + (ya(a, j) - s.alpha_z(a, j)) / rho;
      }
    }
    s.z = spd_solve(std::move(gram), yx);
    s.z.set_role(Role::dual);
  }

  Matrix yz(n, m);
  k.gemm(s.y, s.z, yz);
  s.x = admm_x_update(v, yz, s.alpha_x, rho);
  if (fixed != Fixed::w) s.w = positive_part(s.y, s.alpha_y, rho);
  if (fixed != Fixed::h) s.h = positive_part(s.z, s.alpha_z, rho);

  dual_ascent(s.alpha_x, s.x, yz, rho);
  if (fixed != Fixed::w) dual_ascent(s.alpha_y, s.y, s.w, rho);
  if (fixed != Fixed::h) dual_ascent(s.alpha_z, s.z, s.h, rho);

  if (!all_finite(s.x) || !all_finite(s.w) || !all_finite(s.h)) {
    throw Error("admm_step: non-finite iterate");
  }
  return s;
}

double admm_objective(const Matrix& v, const AdmmState& state) {
  return kl_divergence(v, multiply(floored(state.w, kFloorEps),
                                   floored(state.h, kFloorEps)));
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::mu: return "mu";
    case Method::admm: return "admm";
    case Method::fpa: return "fpa";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "mu" || lower == "mua") return Method::mu;
  if (lower == "admm") return Method::admm;
  if (lower == "fpa") return Method::fpa;
  throw Error("unknown method '" + std::string(name) + "' (expected mu, admm or fpa)");
}

RunResult solver_driver(Method method, const Matrix& v, const Matrix& w0,
                        const Matrix& h0, const SolveConfig& cfg,
                        std::optional<double> rho, Fixed fixed) {
  if (method == Method::admm && !rho) {
    throw Error("configuration error: ADMM requires rho");
  }
  if (cfg.iter_nd == 0 || cfg.trace_stride == 0) {
    throw Error("configuration error: iter_nd and trace_stride must be positive");
  }
  const bool nd = fixed != Fixed::none;

  if (method == Method::fpa) {
    RunResult out;
    if (!nd) {
      NmfResult res = nmf_fpa(v, w0, h0, cfg);
      out.w = std::move(res.w);
      out.h = std::move(res.h);
      out.trace = std::move(res.trace);
      out.repairs = res.repairs;
      return out;
    }
    const Side side = fixed == Fixed::w ? Side::fix_w : Side::fix_h;
    NdBatchResult res = fixed == Fixed::w ? nd_batch(v, w0, h0, side, cfg)
                                          : nd_batch(v, h0, w0, side, cfg);
    out.w = fixed == Fixed::w ? w0 : std::move(res.factor);
    out.h = fixed == Fixed::w ? std::move(res.factor) : h0;
    out.trace = std::move(res.trace);
    return out;
  }

  const std::size_t grid = nd ? cfg.trace_stride : cfg.iter_nd * cfg.trace_stride;
  Stopwatch clock;
  RunResult out;
  if (method == Method::mu) {
    out.w = w0;
    out.h = h0;
    out.trace.push_back({.data_access = 0,
                         .primal = kl_divergence_extended(v, multiply(w0, h0)),
                         .wall_seconds = clock.seconds()});
    for (std::size_t it = 1; it <= cfg.max_data_access; ++it) {
      std::tie(out.w, out.h) = mu_step(v, out.w, out.h, fixed);
      if (it % grid != 0 && it != cfg.max_data_access) continue;
      out.trace.push_back({.data_access = it,
                           .primal = kl_divergence_extended(v, multiply(out.w, out.h)),
                           .wall_seconds = clock.seconds()});
    }
    return out;
  }

  AdmmState state = AdmmState::start(w0, h0, *rho);
  auto record = [&](std::size_t access) {
    Matrix yz = multiply(state.y, state.z);
    out.trace.push_back({.data_access = access,
                         .primal = admm_objective(v, state),
                         .res_x_yz = frobenius_diff(state.x, yz),
                         .res_y_w = frobenius_diff(state.y, state.w),
                         .res_z_h = frobenius_diff(state.z, state.h),
                         .wall_seconds = clock.seconds()});
  };
  record(0);
  for (std::size_t it = 1; it <= cfg.max_data_access; ++it) {
    state = admm_step(v, std::move(state), fixed);
    if (it % grid != 0 && it != cfg.max_data_access) continue;
    record(it);
  }
  out.w = std::move(state.w);
  out.h = std::move(state.h);
  return out;
}

}  // namespace klnmf
