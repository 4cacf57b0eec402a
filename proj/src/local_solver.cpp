#include "tvdd/local_solver.hpp"

#include <cmath>
#include <utility>

#include "tvdd/errors.hpp"
#include "tvdd/numeric.hpp"

namespace tvdd {

void InnerStopRule::validate() const {
  if (!(rel_tol > 0.0)) throw InvalidArgument("inner tolerance must be positive");
  if (max_iters < 1) throw InvalidArgument("inner iteration cap must be at least 1");
}

double block_half_squared_norm(const LocalShape& shape, std::span<const double> r) {
  const std::size_t corner = shape.corner_index();
  return 0.5 * pairwise_sum(0, r.size(), [&](std::size_t k) { return k == corner ? 0.0 : r[k] * r[k]; });
}

LocalProblem build_local_problem(const DualField& q, const RofProblem& problem, const Decomposition& dec,
                                 int subdomain, LocalOperator op) {
  if (!(q.size() == dec.grid()) || !(problem.size() == dec.grid())) {
    throw InvalidArgument("build_local_problem: field or data does not match the decomposition grid");
  }
  const SubdomainView& s = dec.subdomain(subdomain);
  const Rect ext = s.extended_bounds();
  const int m = dec.grid().rows;
  const int n = dec.grid().cols;
  const double alpha = problem.alpha();
  const Image& f = problem.data();

  LocalProblem local;
  local.view = s;
  local.weight = op == LocalOperator::Exact ? 1.0 : static_cast<double>(dec.color_count());
  local.anchor = restrict_to_subdomain(q, s);
  local.data = Image(ext.rows, ext.cols);

  // g = div((I - R^s* R^s) q) + alpha f on the extended set. Values of q
  // inside the subdomain are treated as zero; everything read lies in the
  // stencil.
  const auto outside = [&](int i, int j) { return !s.owned.contains(i, j); };
  for (int a = 0; a < ext.rows; ++a) {
    for (int b = 0; b < ext.cols; ++b) {
      const int i = ext.row0 + a;
      const int j = ext.col0 + b;
      if (!s.in_extended(i, j)) continue;
      const double own_d = (i < m - 1 && outside(i, j)) ? q.down(i, j) : 0.0;
      const double up_d = (i > 0 && outside(i - 1, j)) ? q.down(i - 1, j) : 0.0;
      const double own_r = (j < n - 1 && outside(i, j)) ? q.right(i, j) : 0.0;
      const double left_r = (j > 0 && outside(i, j - 1)) ? q.right(i, j - 1) : 0.0;
      local.data(a, b) = ((own_d - up_d) + (own_r - left_r)) + alpha * f(i, j);
    }
  }
  return local;
}

DualFista::DualFista(LocalShape shape, std::span<const double> data, double weight, const DualField* anchor,
                     DualField init)
    : shape_(shape), data_(data), weight_(weight), anchor_(anchor), x_(std::move(init)) {
  if (x_.rows() != shape.rows || x_.cols() != shape.cols) throw InvalidArgument("DualFista: init has wrong size");
  if (data.size() != shape.ext_count()) throw InvalidArgument("DualFista: data has wrong size");
  if (!(weight >= 1.0)) throw InvalidArgument("DualFista: relaxation weight must be at least 1");
  if (weight != 1.0 && (anchor == nullptr || !(anchor->size() == x_.size()))) {
    throw InvalidArgument("DualFista: relaxed problem needs an anchor of matching size");
  }
  project_to_unit_disks_inplace(x_);
  x_prev_ = x_;
  y_ = x_;
  residual_.resize(shape.ext_count());
  grad_down_.resize(shape.count());
  grad_right_.resize(shape.count());
  div_current_.resize(shape.ext_count());
  div_scratch_.resize(shape.ext_count());
  relaxed_divergence(x_, div_current_);
}

void DualFista::relaxed_divergence(const DualField& p, std::vector<double>& out) {
  const double* down = p.down_values().data();
  const double* right = p.right_values().data();
  if (weight_ != 1.0) {
    // z = w p - (w - 1) a, staged in the gradient buffers.
    const auto ad = anchor_->down_values();
    const auto ar = anchor_->right_values();
    const auto pd = p.down_values();
    const auto pr = p.right_values();
    const double shift = weight_ - 1.0;
    for (std::size_t k = 0; k < pd.size(); ++k) {
      grad_down_[k] = weight_ * pd[k] - shift * ad[k];
      grad_right_[k] = weight_ * pr[k] - shift * ar[k];
    }
    down = grad_down_.data();
    right = grad_right_.data();
  }
  block_divergence(shape_, down, right, out.data());
}

void DualFista::residual_of(const DualField& p, std::vector<double>& out) {
  relaxed_divergence(p, out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += data_[k];
}

void DualFista::step() {
  residual_of(y_, residual_);
  block_divergence_adjoint(shape_, residual_.data(), grad_down_.data(), grad_right_.data());

  // Gradient is w * div^T r and the step is 1 / (8 w^2).
  const double scale = weight_ / lipschitz();
  const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_ * t_));
  const double beta = (t_ - 1.0) / t_next;
  std::swap(x_prev_, x_);

  auto xd = x_.down_values();
  auto xr = x_.right_values();
  auto yd = y_.down_values();
  auto yr = y_.right_values();
  const auto pd = x_prev_.down_values();
  const auto pr = x_prev_.right_values();
  for (std::size_t k = 0; k < xd.size(); ++k) {
    double d = yd[k] - scale * grad_down_[k];
    double r = yr[k] - scale * grad_right_[k];
    project_pixel(d, r);
    xd[k] = d;
    xr[k] = r;
    yd[k] = d + beta * (d - pd[k]);
    yr[k] = r + beta * (r - pr[k]);
  }
  t_ = t_next;
  ++iterations_;
}

double DualFista::divergence_change() {
  relaxed_divergence(x_, div_scratch_);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < div_scratch_.size(); ++k) {
    const double delta = div_scratch_[k] - div_current_[k];
    num += delta * delta;
    den += div_scratch_[k] * div_scratch_[k];
  }
  std::swap(div_current_, div_scratch_);
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double DualFista::objective() {
  residual_of(x_, residual_);
  return block_half_squared_norm(shape_, residual_);
}

double local_objective(const LocalProblem& problem, const DualField& p_s) {
  const LocalShape shape = problem.view.local_shape();
  if (p_s.rows() != shape.rows || p_s.cols() != shape.cols) {
    throw InvalidArgument("local_objective: field does not match the subdomain size");
  }
  std::vector<double> z_down(p_s.down_values().begin(), p_s.down_values().end());
  std::vector<double> z_right(p_s.right_values().begin(), p_s.right_values().end());
  if (problem.weight != 1.0) {
    const double shift = problem.weight - 1.0;
    for (std::size_t k = 0; k < shape.count(); ++k) {
      z_down[k] = problem.weight * z_down[k] - shift * problem.anchor.down_values()[k];
      z_right[k] = problem.weight * z_right[k] - shift * problem.anchor.right_values()[k];
    }
  }
  std::vector<double> r(shape.ext_count());
  block_divergence(shape, z_down.data(), z_right.data(), r.data());
  const auto g = problem.data.values();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += g[k];
  return block_half_squared_norm(shape, r);
}

LocalSolution solve_local(const LocalProblem& problem, const DualField& init, const InnerStopRule& stop) {
  stop.validate();
  const LocalShape shape = problem.view.local_shape();
  DualFista fista(shape, problem.data.values(), problem.weight, &problem.anchor, init);
  const DualField start = fista.iterate();
  const double start_objective = fista.objective();

  while (fista.iterations() < stop.max_iters) {
    fista.step();
    if (fista.divergence_change() < stop.rel_tol) break;
  }

  LocalSolution out;
  out.iterations = fista.iterations();
  out.objective = fista.objective();
  out.p = fista.take_iterate();

  // Monotone safeguard against FISTA's non-monotone iterates.
  if (start_objective < out.objective) {
    out.p = start;
    out.objective = start_objective;
  }
  if (max_magnitude(problem.anchor) <= 1.0) {
    const double anchor_objective = local_objective(problem, problem.anchor);
    if (anchor_objective < out.objective) {
      out.p = problem.anchor;
      out.objective = anchor_objective;
    }
  }
  return out;
}

}  // namespace tvdd
