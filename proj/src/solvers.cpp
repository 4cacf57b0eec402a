#include "tvdd/solvers.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <utility>

#include "tvdd/errors.hpp"

namespace tvdd {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

DualField initial_point(const RofProblem& problem, const SolverConfig& config) {
  if (!config.initial) return DualField(problem.size());
  if (!(config.initial->size() == problem.size())) throw InvalidArgument("initial field does not match the data");
  return project_to_unit_disks(*config.initial);
}

double checked_energy(const DualField& p, const RofProblem& problem) {
  const double energy = dual_energy(p, problem);
  if (!std::isfinite(energy)) throw NumericalError("dual energy is not finite");
  return energy;
}

// Appends one outer iteration to the trace and decides whether to stop.
class Recorder {
 public:
  Recorder(Method method, const SolverConfig& config, double initial_energy) : config_(config) {
    trace_.method = method;
    trace_.initial_energy = initial_energy;
    previous_energy_ = initial_energy;
    start_ = Clock::now();
  }

  bool record(double energy, double wall_ms, std::vector<int> inner, double momentum = 1.0) {
    IterationRecord rec;
    rec.n = trace_.size() + 1;
    rec.energy = energy;
    rec.relative_gap = config_.oracle_energy ? relative_gap(energy, *config_.oracle_energy)
                                             : std::numeric_limits<double>::quiet_NaN();
    rec.wall_ms = wall_ms;
    for (int k : inner) rec.inner_iterations += k;
    rec.inner_per_subdomain = std::move(inner);
    rec.momentum = momentum;
    trace_.iterations.push_back(std::move(rec));

    bool stop = false;
    switch (config_.stop) {
      case OuterStop::RelativeGap:
        stop = trace_.iterations.back().relative_gap < config_.outer_tol;
        break;
      case OuterStop::EnergyChange:
        stop = previous_energy_ > 0.0 ? std::abs(energy - previous_energy_) / previous_energy_ < config_.outer_tol
                                      : energy == previous_energy_;
        break;
      case OuterStop::IterationLimit:
        break;
    }
    previous_energy_ = energy;
    if (stop) trace_.converged = true;
    return stop;
  }

  SolverTrace& trace() { return trace_; }

  SolverTrace finish() {
    trace_.total_wall_ms = elapsed_ms(start_);
    return std::move(trace_);
  }

 private:
  const SolverConfig& config_;
  SolverTrace trace_;
  double previous_energy_ = 0.0;
  Clock::time_point start_;
};

// Solves the local problems of `members` around the outer point q. Each task
// writes only its own slot, so the result is independent of the thread count.
std::vector<LocalSolution> solve_subdomains(const RofProblem& problem, const Decomposition& dec, const DualField& q,
                                            LocalOperator op, std::span<const int> members,
                                            const std::vector<DualField>& warm, const SolverConfig& config) {
  std::vector<LocalSolution> out(members.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const int count = static_cast<int>(members.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.threads)
  for (int m = 0; m < count; ++m) {
    try {
      const int s = members[static_cast<std::size_t>(m)];
      const LocalProblem local = build_local_problem(q, problem, dec, s, op);
      out[static_cast<std::size_t>(m)] = solve_local(local, warm[static_cast<std::size_t>(s)], config.inner);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<int> all_subdomains(const Decomposition& dec) {
  std::vector<int> all(static_cast<std::size_t>(dec.subdomain_count()));
  for (int s = 0; s < dec.subdomain_count(); ++s) all[static_cast<std::size_t>(s)] = s;
  return all;
}

std::vector<DualField> initial_warm_starts(const DualField& p, const Decomposition& dec) {
  std::vector<DualField> warm;
  for (const auto& view : dec.subdomains()) warm.push_back(restrict_to_subdomain(p, view));
  return warm;
}

void check_inputs(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config) {
  config.validate();
  if (!(problem.size() == dec.grid())) throw InvalidArgument("decomposition grid does not match the data");
}

enum class JacobiVariant { Relaxed, PreRelaxed, Fast };

SolveResult run_jacobi(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config,
                       JacobiVariant variant, Method method) {
  check_inputs(problem, dec, config);
  const double colors = dec.color_count();
  const LocalOperator op = variant == JacobiVariant::Relaxed ? LocalOperator::Exact : LocalOperator::PreRelaxed;
  const std::vector<int> members = all_subdomains(dec);

  DualField p = initial_point(problem, config);
  DualField q = p;  // extrapolated point (FPJ); equals p otherwise
  std::vector<DualField> warm = initial_warm_starts(p, dec);
  double t = 1.0;

  Recorder recorder(method, config, checked_energy(p, problem));
  for (int n = 0; n < config.max_outer; ++n) {
    const auto step_start = Clock::now();
    const DualField& base = variant == JacobiVariant::Fast ? q : p;
    std::vector<LocalSolution> local = solve_subdomains(problem, dec, base, op, members, warm, config);

    DualField next = variant == JacobiVariant::Relaxed ? p : DualField(dec.grid());
    std::vector<int> inner(local.size());
    for (std::size_t m = 0; m < local.size(); ++m) {
      const SubdomainView& view = dec.subdomain(members[m]);
      const DualField& sol = local[m].p;
      if (variant == JacobiVariant::Relaxed) {
        // (1 - 1/N_c) p + (1/N_c) R^s* S_s(p) on the subdomain.
        const double keep = 1.0 - 1.0 / colors;
        for (int a = 0; a < view.owned.rows; ++a) {
          for (int b = 0; b < view.owned.cols; ++b) {
            const int i = view.owned.row0 + a;
            const int j = view.owned.col0 + b;
            next.down(i, j) = keep * p.down(i, j) + sol.down(a, b) / colors;
            next.right(i, j) = keep * p.right(i, j) + sol.right(a, b) / colors;
          }
        }
      } else {
        write_subdomain(next, view, sol);
      }
      inner[m] = local[m].iterations;
      warm[static_cast<std::size_t>(members[m])] = std::move(local[m].p);
    }

    double momentum = 1.0;
    if (variant == JacobiVariant::Fast) {
      const double t_next = config.zero_momentum ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      q = next;
      auto qd = q.down_values();
      auto qr = q.right_values();
      const auto nd = next.down_values();
      const auto nr = next.right_values();
      const auto pd = p.down_values();
      const auto pr = p.right_values();
      for (std::size_t k = 0; k < qd.size(); ++k) {
        qd[k] = nd[k] + beta * (nd[k] - pd[k]);
        qr[k] = nr[k] + beta * (nr[k] - pr[k]);
      }
      t = t_next;
      momentum = t;
    }
    p = std::move(next);

    const double energy = checked_energy(p, problem);
    if (recorder.record(energy, elapsed_ms(step_start), std::move(inner), momentum)) break;
  }
  return {std::move(p), recorder.finish()};
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::RelaxedJacobi:
      return "rj";
    case Method::PreRelaxedJacobi:
      return "pj";
    case Method::FastPreRelaxedJacobi:
      return "fpj";
    case Method::GaussSeidel:
      return "gs";
    case Method::Fista:
      return "fista";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::RelaxedJacobi, Method::PreRelaxedJacobi, Method::FastPreRelaxedJacobi,
                   Method::GaussSeidel, Method::Fista}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(outer_tol > 0.0)) throw InvalidArgument("outer tolerance must be positive");
  if (max_outer < 0) throw InvalidArgument("outer iteration cap must be nonnegative");
  if (threads < 1) throw InvalidArgument("thread count must be at least 1");
  if (stop == OuterStop::RelativeGap && !oracle_energy) {
    throw InvalidArgument("relative-gap stopping needs an oracle energy");
  }
  inner.validate();
}

double relative_gap(double energy, double oracle_energy) {
  const double gap = energy - oracle_energy;
  return oracle_energy > 0.0 ? gap / oracle_energy : gap;
}

SolveResult solve_rj(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config) {
  return run_jacobi(problem, dec, config, JacobiVariant::Relaxed, Method::RelaxedJacobi);
}

SolveResult solve_pj(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config) {
  return run_jacobi(problem, dec, config, JacobiVariant::PreRelaxed, Method::PreRelaxedJacobi);
}

SolveResult solve_fpj(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config) {
  return run_jacobi(problem, dec, config, JacobiVariant::Fast, Method::FastPreRelaxedJacobi);
}

SolveResult solve_gs(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config) {
  check_inputs(problem, dec, config);
  DualField p = initial_point(problem, config);
  std::vector<DualField> warm = initial_warm_starts(p, dec);

  Recorder recorder(Method::GaussSeidel, config, checked_energy(p, problem));
  for (int n = 0; n < config.max_outer; ++n) {
    const auto step_start = Clock::now();
    std::vector<int> inner(static_cast<std::size_t>(dec.subdomain_count()));
    double energy = 0.0;
    for (int k = 0; k < dec.color_count(); ++k) {
      const auto members = dec.subdomains_of_color(k);
      std::vector<LocalSolution> local =
          solve_subdomains(problem, dec, p, LocalOperator::Exact, members, warm, config);
      for (std::size_t m = 0; m < local.size(); ++m) {
        const int s = members[m];
        write_subdomain(p, dec.subdomain(s), local[m].p);
        inner[static_cast<std::size_t>(s)] = local[m].iterations;
        warm[static_cast<std::size_t>(s)] = std::move(local[m].p);
      }
      energy = checked_energy(p, problem);
      recorder.trace().substep_energies.push_back(energy);
    }
    if (recorder.record(energy, elapsed_ms(step_start), std::move(inner))) break;
  }
  return {std::move(p), recorder.finish()};
}

SolveResult solve_fista_full(const RofProblem& problem, const SolverConfig& config) {
  config.validate();
  const GridSize size = problem.size();
  std::vector<double> data(problem.data().values().begin(), problem.data().values().end());
  for (double& v : data) v *= problem.alpha();

  const LocalShape shape{size.rows, size.cols, false, false};
  DualFista fista(shape, data, 1.0, nullptr, initial_point(problem, config));
  Recorder recorder(Method::Fista, config, checked_energy(fista.iterate(), problem));
  for (int n = 0; n < config.max_outer; ++n) {
    const auto step_start = Clock::now();
    fista.step();
    const double energy = fista.objective();
    if (!std::isfinite(energy)) throw NumericalError("dual energy is not finite");
    if (recorder.record(energy, elapsed_ms(step_start), {})) break;
  }
  return {fista.take_iterate(), recorder.finish()};
}

SolveResult solve(const RofProblem& problem, const Decomposition& dec, const SolverConfig& config) {
  switch (config.method) {
    case Method::RelaxedJacobi:
      return solve_rj(problem, dec, config);
    case Method::PreRelaxedJacobi:
      return solve_pj(problem, dec, config);
    case Method::FastPreRelaxedJacobi:
      return solve_fpj(problem, dec, config);
    case Method::GaussSeidel:
      return solve_gs(problem, dec, config);
    case Method::Fista:
      return solve_fista_full(problem, config);
  }
  throw InvalidArgument("unknown method");
}

DualField fista_reference(const RofProblem& problem, int iterations) {
  const GridSize size = problem.size();
  std::vector<double> data(problem.data().values().begin(), problem.data().values().end());
  for (double& v : data) v *= problem.alpha();
  DualFista fista(LocalShape{size.rows, size.cols, false, false}, data, 1.0, nullptr, DualField(size));
  for (int n = 0; n < iterations; ++n) fista.step();
  return fista.take_iterate();
}

BoundReport evaluate_bounds(const SolverTrace& trace, const Decomposition& dec, const RofProblem& problem,
                            const DualField& p0, const DualField& p_star) {
  BoundReport report;
  report.method = trace.method;
  report.color_count = dec.color_count();
  report.c1 = c1_constant(dec);
  report.oracle_energy = dual_energy(p_star, problem);
  report.initial_gap = dual_energy(p0, problem) - report.oracle_energy;
  report.bregman_initial = bregman_distance(p_star, p0, dec);

  const double nc = report.color_count;
  const double d0 = report.bregman_initial;
  const double g0 = report.initial_gap;
  const double c1 = report.c1;
  const double distance_sq = squared_norm(p0 - p_star);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double slack = 1e-12 * std::max(1.0, std::abs(report.oracle_energy));

  for (const auto& rec : trace.iterations) {
    BoundRow row;
    row.n = rec.n;
    row.gap = rec.energy - report.oracle_energy;
    const double n = rec.n;
    switch (trace.method) {
      case Method::RelaxedJacobi:
        row.bound_bregman = (nc * d0 + (nc - 1.0) * g0) / n;
        row.bound_c1 = nc / n * ((2.0 - 1.0 / nc) * g0 + 2.0 * c1);
        break;
      case Method::PreRelaxedJacobi:
        row.bound_bregman = nc * d0 / n;
        row.bound_c1 = nc / n * (g0 + 2.0 * c1);
        break;
      case Method::FastPreRelaxedJacobi:
        row.bound_bregman = 4.0 * nc * d0 / ((n + 1.0) * (n + 1.0));
        row.bound_c1 = 4.0 * nc / ((n + 1.0) * (n + 1.0)) * (g0 + 2.0 * c1);
        break;
      case Method::Fista:
        row.bound_bregman = 16.0 * distance_sq / ((n + 1.0) * (n + 1.0));
        row.bound_c1 = nan;
        break;
      case Method::GaussSeidel:
        row.bound_bregman = nan;
        row.bound_c1 = nan;
        break;
    }
    row.violated = !std::isnan(row.bound_bregman) && row.gap > row.bound_bregman + slack;
    if (row.violated) ++report.violations;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace tvdd
