#include "klnmf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "klnmf/error.hpp"
#include "klnmf/trace.hpp"

namespace klnmf {

namespace fs = std::filesystem;

namespace {

constexpr const char* kNmfAccounting =
    "one MU or ADMM iteration = 1 data access; one FPA outer iteration "
    "(iter_nd W steps + iter_nd H steps) = iter_nd data accesses";
constexpr const char* kNdAccounting =
    "one iteration of any method = 1 data access";

std::string label_for(Method method, std::optional<double> rho) {
  std::string label(method_name(method));
  if (method == Method::admm && rho) {
    // shortest round-trip form keeps 0.15 as "0.15" in file names
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, *rho);
    label += "_rho" + std::string(buf, res.ptr);
  }
  return label;
}

// Tracks files written so far so a failed experiment can clean up after itself.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    created_dir_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }

  fs::path add(const std::string& file_name) {
    fs::path p = dir_ / file_name;
    files_.push_back(p);
    return p;
  }

  void remove_all() noexcept {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
};

struct Context {
  const ExperimentSpec& spec;
  OutputSet& outputs;
  ExperimentReport& report;
  Matrix v;
  Matrix w0;
  Matrix h0;
};

TraceHeader base_header(const Context& ctx, const std::string& label,
                        const char* accounting) {
  const auto& s = ctx.spec;
  TraceHeader h = {
      {"experiment", s.name},
      {"problem", std::string(problem_name(s.problem))},
      {"run", label},
      {"n", std::to_string(ctx.v.rows())},
      {"m", std::to_string(ctx.v.cols())},
      {"r", std::to_string(ctx.w0.cols())},
      {"seed", std::to_string(s.seed.value)},
      {"iter_nd", std::to_string(s.cfg.iter_nd)},
      {"budget", std::to_string(s.cfg.max_data_access)},
      {"gap_tol", format_real(s.cfg.gap_tol)},
      {"trace_stride", std::to_string(s.cfg.trace_stride)},
      {"init_hash", ctx.report.init_hash},
      {"accounting", accounting},
  };
  if (s.problem == ProblemKind::warm_restart) {
    h.emplace_back("r2", std::to_string(s.r2));
    h.emplace_back("pad_c", format_real(s.pad_c));
  }
  return h;
}

void write_run(Context& ctx, const std::string& label, TraceHeader header,
               const ConvergenceTrace& trace) {
  const fs::path path = ctx.outputs.add(label + ".csv");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_trace(out, header, trace);
  if (!out) throw Error("write failed: " + path.string());
  ctx.report.runs.push_back({.label = label,
                             .final_objective = trace.back().primal,
                             .data_access = trace.back().data_access,
                             .wall_seconds = trace.back().wall_seconds,
                             .trace_file = path});
}

// One row per trace record: primal - p*, and p* - dual where available.
void write_distance(Context& ctx, const std::string& label,
                    const ConvergenceTrace& trace, double p_star) {
  const fs::path path = ctx.outputs.add(label + "_distance.csv");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# run: " << label << '\n'
      << "# reference_optimum: " << format_real(p_star) << '\n'
      << "data_access,primal_distance,dual_distance,wall_seconds\n";
  for (const auto& r : trace.records()) {
    out << r.data_access << ',' << format_real(r.primal - p_star) << ','
        << (r.dual ? format_real(p_star - *r.dual) : std::string()) << ','
        << format_real(r.wall_seconds) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

template <typename Fn>
void for_each_run(const ExperimentSpec& spec, Fn&& fn) {
  for (Method method : spec.methods) {
    if (method == Method::admm) {
      for (double rho : spec.rho) fn(method, std::optional<double>(rho));
    } else {
      fn(method, std::optional<double>());
    }
  }
}

void run_nmf(Context& ctx) {
  for_each_run(ctx.spec, [&](Method method, std::optional<double> rho) {
    const std::string label = label_for(method, rho);
    RunResult run = solver_driver(method, ctx.v, ctx.w0, ctx.h0, ctx.spec.cfg, rho);
    auto header = base_header(ctx, label, kNmfAccounting);
    if (rho) header.emplace_back("rho", format_real(*rho));
    header.emplace_back("repairs", std::to_string(run.repairs));
    write_run(ctx, label, std::move(header), run.trace);
    if (ctx.spec.save_factors) {
      const char* ext = ctx.spec.input_format == MatrixFormat::raw_binary ? ".bin" : ".txt";
      save_matrix(ctx.outputs.add(label + "_W" + ext), run.w, ctx.spec.input_format);
      save_matrix(ctx.outputs.add(label + "_H" + ext), run.h, ctx.spec.input_format);
    }
  });
}

void run_nd(Context& ctx) {
  const auto& spec = ctx.spec;
  const Fixed fixed = spec.problem == ProblemKind::nd_fix_w ? Fixed::w : Fixed::h;

  // Fixed factor from a long MU run on the full problem.
  Matrix w_ref = ctx.w0, h_ref = ctx.h0;
  for (std::size_t it = 0; it < spec.reference_iters; ++it) {
    std::tie(w_ref, h_ref) = mu_step(ctx.v, w_ref, h_ref);
  }
  const Matrix& w_start = fixed == Fixed::w ? w_ref : ctx.w0;
  const Matrix& h_start = fixed == Fixed::w ? ctx.h0 : h_ref;

  SolveConfig ref_cfg = spec.cfg;
  ref_cfg.max_data_access = spec.reference_iters;
  ref_cfg.gap_tol = 0.0;
  const RunResult ref_mu = solver_driver(Method::mu, ctx.v, w_start, h_start,
                                         ref_cfg, std::nullopt, fixed);
  const RunResult ref_fpa = solver_driver(Method::fpa, ctx.v, w_start, h_start,
                                          ref_cfg, std::nullopt, fixed);
  const double p_star =
      std::min(ref_mu.trace.back().primal, ref_fpa.trace.back().primal);
  ctx.report.reference_optimum = p_star;

  for (const auto& [label, run] :
       {std::pair<std::string, const RunResult*>{"reference_mu", &ref_mu},
        std::pair<std::string, const RunResult*>{"reference_fpa", &ref_fpa}}) {
    auto header = base_header(ctx, label, kNdAccounting);
    header.emplace_back("budget_override", std::to_string(spec.reference_iters));
    write_run(ctx, label, std::move(header), run->trace);
  }

  for_each_run(spec, [&](Method method, std::optional<double> rho) {
    const std::string label = label_for(method, rho);
    RunResult run = solver_driver(method, ctx.v, w_start, h_start, spec.cfg,
                                  rho, fixed);
    auto header = base_header(ctx, label, kNdAccounting);
    if (rho) header.emplace_back("rho", format_real(*rho));
    header.emplace_back("reference_optimum", format_real(p_star));
    write_run(ctx, label, std::move(header), run.trace);
    write_distance(ctx, label, run.trace, p_star);
  });
}

void run_warm(Context& ctx) {
  const auto& spec = ctx.spec;
  SolveConfig phase2 = spec.cfg;
  if (spec.restart_budget > 0) phase2.max_data_access = spec.restart_budget;

  for_each_run(spec, [&](Method method, std::optional<double> rho) {
    const std::string label = label_for(method, rho);
    RunResult first = solver_driver(method, ctx.v, ctx.w0, ctx.h0, spec.cfg, rho);
    auto header = base_header(ctx, label + "_phase1", kNmfAccounting);
    if (rho) header.emplace_back("rho", format_real(*rho));
    write_run(ctx, label + "_phase1", header, first.trace);

    auto [w2, h2] = extend_rank(first.w, first.h, spec.r2, spec.pad_c,
                                RandomSeed{spec.seed.value + 2},
                                spec.init_offset);
    if (method == Method::mu) {
      // Exact zeros are absorbing for multiplicative updates.
      w2 = floored(w2, kFloorEps);
      h2 = floored(h2, kFloorEps);
    }
    RunResult second = solver_driver(method, ctx.v, w2, h2, phase2, rho);
    header[2].second = label + "_phase2";
    header.emplace_back("repairs", std::to_string(second.repairs));
    write_run(ctx, label + "_phase2", std::move(header), second.trace);
  });
}

void run_topic(Context& ctx) {
  const auto& spec = ctx.spec;
  // Topics: W0 with unit column sums.
  Matrix k = normalize_factors(ctx.w0, ctx.h0).first;
  const NdProblem prob(ctx.v, std::move(k));
  const Matrix x0(prob.q(), prob.batch(), 1.0 / static_cast<double>(prob.q()));

  NdOptions options;
  options.n_iter = spec.cfg.max_data_access;
  options.trace_stride = spec.cfg.trace_stride;
  options.constraint = PrimalConstraint::simplex;
  options.backend = spec.cfg.backend;
  const NdResult run = fpa_nd(prob, x0, initial_dual(prob, x0),
                              heuristic_step_sizes(prob), options);
  write_run(ctx, "fpa", base_header(ctx, "fpa", kNdAccounting), run.trace);
}

void write_summary(Context& ctx) {
  const fs::path path = ctx.outputs.add("summary.csv");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const auto& s = ctx.spec;
  out << "# experiment: " << s.name << '\n'
      << "# problem: " << problem_name(s.problem) << '\n'
      << "# n: " << ctx.v.rows() << '\n'
      << "# m: " << ctx.v.cols() << '\n'
      << "# r: " << ctx.w0.cols() << '\n'
      << "# seed: " << s.seed.value << '\n'
      << "# init_hash: " << ctx.report.init_hash << '\n'
      << "# accounting: "
      << (s.problem == ProblemKind::nd_fix_w || s.problem == ProblemKind::nd_fix_h ||
                  s.problem == ProblemKind::topic
              ? kNdAccounting
              : kNmfAccounting)
      << '\n';
  if (ctx.report.reference_optimum) {
    out << "# reference_optimum: " << format_real(*ctx.report.reference_optimum)
        << '\n';
  }
  double total = 0.0;
  for (const auto& run : ctx.report.runs) total += run.wall_seconds;
  out << "# total_wall_seconds: " << format_real(total) << '\n';
  out << "label,final_objective,data_access,wall_seconds,trace_file\n";
  for (const auto& run : ctx.report.runs) {
    out << run.label << ',' << format_real(run.final_objective) << ','
        << run.data_access << ',' << format_real(run.wall_seconds) << ','
        << run.trace_file.filename().string() << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
  ctx.report.summary_file = path;
}

}  // namespace

std::string_view problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::nd_fix_w: return "nd_fix_W";
    case ProblemKind::nd_fix_h: return "nd_fix_H";
    case ProblemKind::nmf: return "nmf";
    case ProblemKind::warm_restart: return "warm_restart";
    case ProblemKind::topic: return "topic";
  }
  return "unknown";
}

ProblemKind parse_problem(std::string_view name) {
  if (name == "nd_fix_W" || name == "nd_fix_w" || name == "fix_w") return ProblemKind::nd_fix_w;
  if (name == "nd_fix_H" || name == "nd_fix_h" || name == "fix_h") return ProblemKind::nd_fix_h;
  if (name == "nmf") return ProblemKind::nmf;
  if (name == "warm_restart" || name == "warm") return ProblemKind::warm_restart;
  if (name == "topic") return ProblemKind::topic;
  throw Error("unknown problem '" + std::string(name) + "'");
}

void validate(const ExperimentSpec& spec) {
  if (spec.methods.empty()) throw Error("experiment: no methods requested");
  if (!spec.input && (spec.n == 0 || spec.m == 0)) {
    throw Error("experiment: dimensions must be positive");
  }
  if (spec.r == 0) throw Error("experiment: rank must be positive");
  if (!spec.input && spec.r > std::min(spec.n, spec.m)) {
    throw Error("experiment: rank must not exceed min(n, m)");
  }
  if (spec.problem == ProblemKind::warm_restart && spec.r2 <= spec.r) {
    throw Error("experiment: warm restart needs rank2 > rank");
  }
  if (spec.problem == ProblemKind::topic &&
      std::any_of(spec.methods.begin(), spec.methods.end(),
                  [](Method m) { return m != Method::fpa; })) {
    throw Error("experiment: the topic problem is solved by fpa only");
  }
  const bool wants_admm =
      std::find(spec.methods.begin(), spec.methods.end(), Method::admm) !=
      spec.methods.end();
  if (wants_admm && spec.rho.empty()) {
    throw Error("configuration error: ADMM requires at least one rho");
  }
  for (double rho : spec.rho) {
    if (!(rho > 0.0)) throw Error("experiment: rho values must be positive");
  }
  if (spec.cfg.iter_nd == 0 || spec.cfg.max_data_access == 0 ||
      spec.cfg.trace_stride == 0) {
    throw Error("experiment: iter_nd, budget and trace_stride must be positive");
  }
  if (!(spec.init_offset > 0.0)) throw Error("experiment: init offset must be positive");
  if (!(spec.pad_c >= 0.0)) throw Error("experiment: pad value must be non-negative");
  if (!spec.input && (!(spec.synth_lo >= 0.0) || !(spec.synth_hi > spec.synth_lo))) {
    throw Error("experiment: synthetic bounds must satisfy 0 <= lo < hi");
  }
  if (spec.reference_iters == 0) throw Error("experiment: reference_iters must be positive");
}

std::string matrix_hash(const std::vector<const Matrix*>& matrices) {
  std::uint64_t h = 1469598103934665603ull;
  for (const Matrix* m : matrices) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(m->data());
    for (std::size_t k = 0; k < m->size() * sizeof(double); ++k) {
      h ^= bytes[k];
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentReport report;
  OutputSet outputs(spec.output_dir);
  try {
    Matrix v = spec.input ? load_matrix(*spec.input, spec.input_format)
                          : synth_matrix(spec.n, spec.m, spec.synth_lo,
                                         spec.synth_hi, spec.seed);
    if (spec.r > std::min(v.rows(), v.cols())) {
      throw Error("experiment: rank must not exceed min(n, m)");
    }
    auto [w0, h0] = random_init(v.rows(), v.cols(), spec.r, spec.init_offset,
                                RandomSeed{spec.seed.value + 1});
    if (spec.problem == ProblemKind::topic && !spec.input) {
      // Exact mixtures of the topic matrix with simplex weights.
      Matrix k = normalize_factors(w0, h0).first;
      Engine engine = make_engine(RandomSeed{spec.seed.value + 3});
      Matrix weights = abs_normal_matrix(spec.r, v.cols(), spec.init_offset, engine);
      const auto sums = column_sums(weights);
      for (std::size_t i = 0; i < weights.rows(); ++i) {
        for (std::size_t j = 0; j < weights.cols(); ++j) weights(i, j) /= sums[j];
      }
      v = multiply(k, weights);
    }
    report.init_hash = matrix_hash({&w0, &h0});
    Context ctx{spec, outputs, report, std::move(v), std::move(w0), std::move(h0)};

    switch (spec.problem) {
      case ProblemKind::nmf: run_nmf(ctx); break;
      case ProblemKind::nd_fix_w:
      case ProblemKind::nd_fix_h: run_nd(ctx); break;
      case ProblemKind::warm_restart: run_warm(ctx); break;
      case ProblemKind::topic: run_topic(ctx); break;
    }
    write_summary(ctx);
  } catch (...) {
    outputs.remove_all();
    throw;
  }
  return report;
}

}  // namespace klnmf
