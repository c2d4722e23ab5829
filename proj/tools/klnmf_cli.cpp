// Command-line front end: synthetic data, convex decompositions with
// certificates, full factorizations, warm restarts and method comparisons.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "klnmf/error.hpp"
#include "klnmf/experiment.hpp"
#include "klnmf/io.hpp"
#include "klnmf/kernels.hpp"
#include "klnmf/trace.hpp"

namespace {

constexpr const char* kThreadsEnv = "KLNMF_NUM_THREADS";

struct CommonOptions {
  std::vector<std::string> methods;
  std::vector<double> rho = {1.0};
  std::size_t iter_nd = klnmf::kDefaultIterNd;
  std::size_t budget = 3000;
  double gap_tol = 0.0;
  std::uint64_t seed = 1;
  std::size_t rank = 10;
  std::size_t rows = 50;
  std::size_t cols = 200;
  std::string input;
  std::string format = "text";
  std::string out = "out";
  std::string name;
  std::size_t trace_stride = 1;
  double offset = klnmf::kDefaultInitOffset;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool many_methods) {
  if (many_methods) {
    cmd->add_option("--method", o.methods, "Methods to run: mu, admm, fpa (repeat or comma-separate)")
        ->delimiter(',');
  } else {
    cmd->add_option("--method", o.methods, "Method: mu, admm or fpa")->expected(1);
  }
  cmd->add_option("--rho", o.rho, "ADMM penalty candidates (one run each)")->delimiter(',');
  cmd->add_option("--iter-nd", o.iter_nd, "Inner primal-dual iterations per block")
      ->capture_default_str();
  cmd->add_option("--budget", o.budget, "Data-access budget")->capture_default_str();
  cmd->add_option("--gap-tol", o.gap_tol, "Relative duality-gap tolerance (0 disables)")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--rank", o.rank, "Factorization rank")->capture_default_str();
  cmd->add_option("-n,--rows", o.rows, "Rows of synthetic data")->capture_default_str();
  cmd->add_option("-m,--cols", o.cols, "Columns of synthetic data")->capture_default_str();
  cmd->add_option("--input", o.input, "Data matrix file (synthetic data when absent)");
  cmd->add_option("--format", o.format, "Matrix file format: text or binary")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--name", o.name, "Experiment name");
  cmd->add_option("--trace-stride", o.trace_stride, "Trace every k blocks/iterations")
      ->capture_default_str();
  cmd->add_option("--offset", o.offset, "Initialization offset")->capture_default_str();
}

klnmf::ExperimentSpec to_spec(const CommonOptions& o, klnmf::ProblemKind problem,
                              const std::string& default_name) {
  klnmf::ExperimentSpec spec;
  spec.name = o.name.empty() ? default_name : o.name;
  spec.problem = problem;
  if (!o.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : o.methods) spec.methods.push_back(klnmf::parse_method(m));
  }
  spec.rho = o.rho;
  spec.n = o.rows;
  spec.m = o.cols;
  spec.r = o.rank;
  spec.seed = klnmf::RandomSeed{o.seed};
  spec.cfg.iter_nd = o.iter_nd;
  spec.cfg.max_data_access = o.budget;
  spec.cfg.gap_tol = o.gap_tol;
  spec.cfg.trace_stride = o.trace_stride;
  spec.init_offset = o.offset;
  spec.input_format = klnmf::parse_format(o.format);
  if (!o.input.empty()) spec.input = o.input;
  spec.output_dir = o.out;
  return spec;
}

void print_report(const klnmf::ExperimentReport& report) {
  std::cout << "init_hash " << report.init_hash << '\n';
  if (report.reference_optimum) {
    std::cout << "reference_optimum " << klnmf::format_real(*report.reference_optimum)
              << '\n';
  }
  for (const auto& run : report.runs) {
    std::cout << run.label << "  final=" << klnmf::format_real(run.final_objective)
              << "  accesses=" << run.data_access << "  seconds=" << run.wall_seconds
              << "  trace=" << run.trace_file.string() << '\n';
  }
  std::cout << "summary " << report.summary_file.string() << '\n';
}

void apply_thread_env() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    std::istringstream ss(env);
    int n = 0;
    if (!(ss >> n) || n <= 0) {
      throw klnmf::Error(std::string(kThreadsEnv) + " must be a positive integer");
    }
    klnmf::kernels::set_num_threads(n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KL non-negative matrix factorization with primal-dual solvers"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a uniform random data matrix");
  std::size_t synth_rows = 200, synth_cols = 1000;
  double lo = 0.0, hi = 750.0;
  std::uint64_t synth_seed = 1;
  std::string synth_out, synth_format = "text";
  synth->add_option("-n,--rows", synth_rows, "Rows")->capture_default_str();
  synth->add_option("-m,--cols", synth_cols, "Columns")->capture_default_str();
  synth->add_option("--lo", lo, "Lower bound")->capture_default_str();
  synth->add_option("--hi", hi, "Upper bound")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("--format", synth_format, "text or binary")->capture_default_str();
  synth->add_option("--out", synth_out, "Output file")->required();

  // nd
  CommonOptions nd_opts;
  nd_opts.methods = {"fpa"};
  auto* nd = app.add_subcommand("nd", "Convex decomposition with one factor fixed");
  add_common(nd, nd_opts, true);
  std::string side = "fix_w";
  std::size_t ref_iters = 5000;
  nd->add_option("--side", side, "fix_w (estimate H) or fix_h (estimate W)")
      ->capture_default_str();
  nd->add_option("--ref-iters", ref_iters, "MU iterations for the reference optimum")
      ->capture_default_str();

  // nmf
  CommonOptions nmf_opts;
  nmf_opts.methods = {"fpa"};
  auto* nmf = app.add_subcommand("nmf", "Full factorization with one method");
  add_common(nmf, nmf_opts, false);

  // warm
  CommonOptions warm_opts;
  auto* warm = app.add_subcommand("warm", "Rank-growth warm-restart experiment");
  add_common(warm, warm_opts, true);
  std::size_t rank2 = 0, budget2 = 0;
  double pad_c = 0.0;
  warm->add_option("--rank2", rank2, "Rank after the restart")->required();
  warm->add_option("--pad-c", pad_c, "Value of the new W columns")->capture_default_str();
  warm->add_option("--budget2", budget2, "Budget after the restart (default: --budget)");

  // bench
  CommonOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Compare methods from a shared initialization");
  add_common(bench, bench_opts, true);

  // topic
  CommonOptions topic_opts;
  topic_opts.methods = {"fpa"};
  auto* topic = app.add_subcommand("topic", "Simplex-constrained decomposition");
  add_common(topic, topic_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_env();
    if (*synth) {
      const auto v = klnmf::synth_matrix(synth_rows, synth_cols, lo, hi,
                                         klnmf::RandomSeed{synth_seed});
      const auto parent = std::filesystem::path(synth_out).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      klnmf::save_matrix(synth_out, v, klnmf::parse_format(synth_format));
      std::cout << "wrote " << v.rows() << "x" << v.cols() << " to " << synth_out << '\n';
      return 0;
    }
    klnmf::ExperimentSpec spec;
    if (*nd) {
      const auto problem = klnmf::parse_problem(side);
      if (problem != klnmf::ProblemKind::nd_fix_w && problem != klnmf::ProblemKind::nd_fix_h) {
        throw klnmf::Error("--side must be fix_w or fix_h");
      }
      spec = to_spec(nd_opts, problem, "nd");
      spec.reference_iters = ref_iters;
    } else if (*nmf) {
      spec = to_spec(nmf_opts, klnmf::ProblemKind::nmf, "nmf");
      spec.save_factors = true;
    } else if (*warm) {
      spec = to_spec(warm_opts, klnmf::ProblemKind::warm_restart, "warm");
      spec.r2 = rank2;
      spec.pad_c = pad_c;
      spec.restart_budget = budget2;
    } else if (*bench) {
      spec = to_spec(bench_opts, klnmf::ProblemKind::nmf, "bench");
    } else {
      spec = to_spec(topic_opts, klnmf::ProblemKind::topic, "topic");
    }
    print_report(klnmf::run_experiment(spec));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
