#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "klnmf/baselines.hpp"
#include "klnmf/fpa.hpp"
#include "klnmf/io.hpp"
#include "klnmf/matrix.hpp"

namespace klnmf {

enum class ProblemKind { nd_fix_w, nd_fix_h, nmf, warm_restart, topic };

std::string_view problem_name(ProblemKind kind);
ProblemKind parse_problem(std::string_view name);

struct ExperimentSpec {
  std::string name = "experiment";
  std::vector<Method> methods = {Method::mu, Method::admm, Method::fpa};
  ProblemKind problem = ProblemKind::nmf;
  /// Used when no input file is given; ignored (taken from the file) otherwise.
  std::size_t n = 50;
  std::size_t m = 200;
  std::size_t r = 10;
  /// Target rank for warm_restart.
  std::size_t r2 = 0;
  RandomSeed seed{1};
  SolveConfig cfg;
  /// ADMM candidates; one run per value.
  std::vector<double> rho = {1.0};
  std::optional<std::filesystem::path> input;
  MatrixFormat input_format = MatrixFormat::delimited_text;
  /// Synthetic data bounds.
  double synth_lo = 0.0;
  double synth_hi = 750.0;
  double init_offset = kDefaultInitOffset;
  /// warm_restart: pad value for new W columns and budget after the restart
  /// (0 reuses cfg.max_data_access).
  double pad_c = 0.0;
  std::size_t restart_budget = 0;
  /// nd_*: MU iterations producing the fixed factor and the reference optimum.
  std::size_t reference_iters = 5000;
  /// nmf: also write the final factors (in input_format) next to each trace.
  bool save_factors = false;
  std::filesystem::path output_dir = "out";
};

/// Throws klnmf::Error describing the first invalid field.
void validate(const ExperimentSpec& spec);

struct RunSummary {
  /// Method name, with the rho value for ADMM runs and a phase suffix for
  /// warm restarts.
  std::string label;
  double final_objective = 0.0;
  std::size_t data_access = 0;
  double wall_seconds = 0.0;
  std::filesystem::path trace_file;
};

struct ExperimentReport {
  std::vector<RunSummary> runs;
  /// FNV-1a of the shared W0, H0 bytes.
  std::string init_hash;
  /// nd_*: min of the long MU and FPA reference runs.
  std::optional<double> reference_optimum;
  std::filesystem::path summary_file;
};

/// 64-bit FNV-1a over the raw bytes of the matrices, as 16 hex digits.
std::string matrix_hash(const std::vector<const Matrix*>& matrices);

/// Runs every requested method from one shared initialization and writes one
/// trace per run plus summary.csv into output_dir. Files written by a failed
/// run are removed before the error propagates.
ExperimentReport run_experiment(const ExperimentSpec& spec);

}  // namespace klnmf
