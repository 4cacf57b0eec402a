#pragma once

// Benchmark harness: noisy input, reference solution, one solver run, and the
// CSV / report outputs.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "tvdd/decomposition.hpp"
#include "tvdd/grid.hpp"
#include "tvdd/solvers.hpp"

namespace tvdd {

struct ExperimentSpec {
  std::string input_path;  // clean reference image (PGM)
  double alpha = 10.0;
  int block_rows = 8;
  int block_cols = 8;
  Shape shape = Shape::Window;
  Method method = Method::FastPreRelaxedJacobi;
  double noise_variance = 0.05;
  std::uint64_t seed = 0;
  double outer_tol = 1e-5;
  int outer_max = 1000;
  InnerStopRule inner;
  int oracle_iters = 100000;  // 0 disables the oracle; stopping falls back to energy change
  std::string oracle_cache_dir;
  std::string output_path;     // denoised PGM
  std::string trace_csv_path;
  std::string report_path;     // JSON
  int threads = 1;
  bool trace_timing = true;    // include wall_ms in the trace CSV

  void validate() const;
};

struct Oracle {
  DualField p;
  double energy = 0.0;
  int iterations = 0;
  bool from_cache = false;
};

/// Reference solution by `iterations` full-grid FISTA steps. When cache_dir
/// is non-empty the result is stored there keyed by a hash of the data, alpha
/// and the iteration count, and reused on later calls.
Oracle compute_oracle(const RofProblem& problem, int iterations, const std::string& cache_dir = {});

struct ExperimentReport {
  Method method = Method::FastPreRelaxedJacobi;
  GridSize grid;
  int block_rows = 1;
  int block_cols = 1;
  Shape shape = Shape::Window;
  int color_count = 1;
  double c1 = 0.0;
  long long interface_length = 0;
  double alpha = 0.0;
  double noisy_psnr = 0.0;
  double psnr = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
  double final_energy = 0.0;
  std::optional<double> oracle_energy;
  std::optional<double> final_relative_gap;
  SolverTrace trace;
  DualField p;
  Image noisy;
  Image denoised;
};

/// Runs the protocol on an in-memory clean image: add noise, compute or load
/// the oracle, solve, recover u and measure PSNR. Writes no files.
ExperimentReport run_experiment_on(const Image& clean, const ExperimentSpec& spec);

/// run_experiment_on(read_pgm(spec.input_path)) plus the output files named in
/// the spec.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double value);

/// Columns n,F,relative_gap,wall_ms,inner_iter_total (wall_ms omitted when
/// include_timing is false). Header row, '\n' line endings.
void write_trace_csv(std::ostream& out, const SolverTrace& trace, bool include_timing = true);

struct LabeledTrace {
  std::string label;
  const SolverTrace* trace = nullptr;
  const BoundReport* bounds = nullptr;  // optional
};

/// Long-format decay data: method,n,F,relative_gap,bound_bregman,bound_c1.
/// Bound columns are "nan" when no bound report is attached.
void write_decay_csv(std::ostream& out, std::span<const LabeledTrace> traces, double oracle_energy);

void write_report_json(std::ostream& out, const ExperimentReport& report);

/// Mean absolute jump of u across neighboring pixel pairs that straddle a
/// subdomain interface, and across all other neighboring pairs.
struct JumpStatistics {
  double interface_mean = 0.0;
  double interior_mean = 0.0;
  std::size_t interface_pairs = 0;
  std::size_t interior_pairs = 0;
};
JumpStatistics interface_jumps(const Image& u, const Decomposition& dec);

}  // namespace tvdd
