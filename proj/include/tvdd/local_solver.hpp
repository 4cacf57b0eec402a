#pragma once

// Per-subdomain dual problems
//
//   min_{|p_s| <= 1}  1/2 || div_s (w p_s - (w - 1) a_s) + g ||^2   on the extended set
//
// with w = 1 for the exact block minimization and w = N_c for the pre-relaxed
// one, a_s the outer iterate on the subdomain and g the frozen contribution of
// everything outside the subdomain. Solved by FISTA with constant step 1/(8 w^2).

#include <span>
#include <vector>

#include "tvdd/decomposition.hpp"
#include "tvdd/grid.hpp"
#include "tvdd/local_ops.hpp"

namespace tvdd {

enum class LocalOperator {
  Exact,       // block minimizer of F over one color
  PreRelaxed,  // same with the block variable replaced by N_c p - (N_c - 1) R_k p
};

/// Stop when ||div_s p^(n+1) - div_s p^(n)|| / ||div_s p^(n+1)|| < rel_tol or
/// after max_iters iterations. A zero denominator counts as converged.
struct InnerStopRule {
  double rel_tol = 1e-4;
  int max_iters = 50;

  void validate() const;
};

struct LocalProblem {
  SubdomainView view;
  Image data;          // g on view.extended_bounds(); the excluded corner is unused
  double weight = 1.0;
  DualField anchor;    // outer iterate restricted to the subdomain
};

LocalProblem build_local_problem(const DualField& q, const RofProblem& problem, const Decomposition& dec,
                                 int subdomain, LocalOperator op);

double local_objective(const LocalProblem& problem, const DualField& p_s);

struct LocalSolution {
  DualField p;
  int iterations = 0;
  double objective = 0.0;
};

/// Runs the inner FISTA from `init` (projected onto the unit disks first).
/// The result is never worse than the feasible starting candidates: if the
/// final objective exceeds that of `init` or of a feasible anchor, the better
/// candidate is returned instead.
LocalSolution solve_local(const LocalProblem& problem, const DualField& init, const InnerStopRule& stop);

/// FISTA with projection onto the unit disks for
///   min 1/2 || div_b (w p - (w - 1) a) + g ||^2
/// on one block. Shared by the local solves and the full-grid solver.
class DualFista {
 public:
  DualFista(LocalShape shape, std::span<const double> data, double weight, const DualField* anchor,
            DualField init);

  /// One proximal-gradient step with momentum.
  void step();

  /// Recomputes div z of the current iterate, z = w x - (w - 1) a being the
  /// argument of the local energy, and returns ||div z_new - div z_old|| /
  /// ||div z_new|| against the previous call (or the initial point). Returns 0
  /// when the denominator vanishes.
  double divergence_change();

  /// Objective at the current iterate.
  double objective();

  const DualField& iterate() const { return x_; }
  DualField take_iterate() { return std::move(x_); }
  int iterations() const { return iterations_; }
  double lipschitz() const { return 8.0 * weight_ * weight_; }

 private:
  void relaxed_divergence(const DualField& p, std::vector<double>& out);
  void residual_of(const DualField& p, std::vector<double>& out);

  LocalShape shape_;
  std::span<const double> data_;
  double weight_;
  const DualField* anchor_;

  DualField x_;
  DualField x_prev_;
  DualField y_;
  double t_ = 1.0;
  int iterations_ = 0;

  std::vector<double> residual_;
  std::vector<double> grad_down_;
  std::vector<double> grad_right_;
  std::vector<double> div_current_;
  std::vector<double> div_scratch_;
};

/// 1/2 sum of r^2 over a block's extended set, skipping the unreachable corner.
double block_half_squared_norm(const LocalShape& shape, std::span<const double> r);

}  // namespace tvdd
