#pragma once

// Outer iterations for the dual ROF problem on a decomposed grid:
//   relaxed block Jacobi (RJ), pre-relaxed block Jacobi (PJ), its FISTA
//   accelerated variant (FPJ), block Gauss-Seidel over colors (GS), and plain
//   FISTA on the full grid.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvdd/decomposition.hpp"
#include "tvdd/grid.hpp"
#include "tvdd/local_solver.hpp"

namespace tvdd {

enum class Method { RelaxedJacobi, PreRelaxedJacobi, FastPreRelaxedJacobi, GaussSeidel, Fista };

std::string_view method_name(Method method);  // "rj", "pj", "fpj", "gs", "fista"
std::optional<Method> parse_method(std::string_view name);

enum class OuterStop {
  RelativeGap,     // (F - F*) / F* < outer_tol, needs oracle_energy
  EnergyChange,    // |F(p^(n)) - F(p^(n-1))| / F(p^(n-1)) < outer_tol
  IterationLimit,  // run exactly max_outer iterations
};

struct SolverConfig {
  Method method = Method::FastPreRelaxedJacobi;
  OuterStop stop = OuterStop::RelativeGap;
  double outer_tol = 1e-5;
  int max_outer = 1000;
  InnerStopRule inner;
  std::optional<double> oracle_energy;
  int threads = 1;
  // FPJ only: hold t_n = 1, which turns off the momentum term.
  bool zero_momentum = false;
  // Starting point p^(0); zero when absent. Projected onto the unit disks.
  std::optional<DualField> initial;

  void validate() const;
};

struct IterationRecord {
  int n = 0;
  double energy = 0.0;
  double relative_gap = 0.0;  // NaN without an oracle energy
  double wall_ms = 0.0;
  long long inner_iterations = 0;
  std::vector<int> inner_per_subdomain;
  double momentum = 1.0;  // t_n after the step (FPJ); 1 otherwise
};

struct SolverTrace {
  Method method = Method::RelaxedJacobi;
  double initial_energy = 0.0;
  std::vector<IterationRecord> iterations;
  // GS only: energy after each color sweep, in order.
  std::vector<double> substep_energies;
  double total_wall_ms = 0.0;
  bool converged = false;
  std::optional<double> final_psnr;

  int size() const { return static_cast<int>(iterations.size()); }
};

struct SolveResult {
  DualField p;
  SolverTrace trace;
};

SolveResult solve_rj(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config);
SolveResult solve_pj(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config);
SolveResult solve_fpj(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config);
SolveResult solve_gs(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config);
SolveResult solve_fista_full(const RofProblem& problem, const SolverConfig& config);

/// Dispatches on config.method.
SolveResult solve(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config);

/// `iterations` full-grid FISTA steps from p = 0, without bookkeeping. This is
/// the reference solution p* for gaps and bounds.
DualField fista_reference(const RofProblem& problem, int iterations);

/// (F - F*) / F*, or F - F* when F* is not positive.
double relative_gap(double energy, double oracle_energy);

struct BoundRow {
  int n = 0;
  double gap = 0.0;             // F(p^(n)) - F(p*)
  double bound_bregman = 0.0;   // bound in terms of D(p*, p^(0)); NaN if none applies
  double bound_c1 = 0.0;        // same bound with D(p*, p^(0)) <= F(p^(0)) - F* + 2 c1
  bool violated = false;
};

struct BoundReport {
  Method method = Method::RelaxedJacobi;
  int color_count = 1;
  double c1 = 0.0;
  double oracle_energy = 0.0;
  double initial_gap = 0.0;
  double bregman_initial = 0.0;  // D(p*, p^(0))
  std::vector<BoundRow> rows;
  int violations = 0;
};

/// Checks a trace against the convergence bound of its method:
///   RJ:    [N_c D + (N_c - 1)(F(p0) - F*)] / n
///   PJ:    N_c D / n
///   FPJ:   4 N_c D / (n + 1)^2
///   FISTA: 16 ||p0 - p*||^2 / (n + 1)^2
/// GS has no bound here; its rows carry NaN and never count as violations.
BoundReport evaluate_bounds(const SolverTrace& trace, const Decomposition& dec, const RofProblem& problem,
                            const DualField& p0, const DualField& p_star);

}  // namespace tvdd
