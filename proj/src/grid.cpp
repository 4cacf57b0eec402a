#include "tvdd/grid.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "tvdd/errors.hpp"
#include "tvdd/numeric.hpp"

namespace tvdd {
namespace {

void require_positive(int rows, int cols) {
  if (rows <= 0 || cols <= 0) {
    throw InvalidArgument("grid dimensions must be positive, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
}

void require_same_size(GridSize a, GridSize b, const char* what) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(what) + ": size mismatch " + std::to_string(a.rows) + "x" +
                          std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
}

}  // namespace

Image::Image(int rows, int cols, double fill) : size_{rows, cols} {
  require_positive(rows, cols);
  data_.assign(size_.count(), fill);
}

Image::Image(int rows, int cols, std::vector<double> values) : size_{rows, cols}, data_(std::move(values)) {
  require_positive(rows, cols);
  if (data_.size() != size_.count()) throw InvalidArgument("image buffer length does not match its dimensions");
}

DualField::DualField(int rows, int cols) : size_{rows, cols} {
  require_positive(rows, cols);
  down_.assign(size_.count(), 0.0);
  right_.assign(size_.count(), 0.0);
}

DualField::DualField(int rows, int cols, std::vector<double> down, std::vector<double> right)
    : size_{rows, cols}, down_(std::move(down)), right_(std::move(right)) {
  require_positive(rows, cols);
  if (down_.size() != size_.count() || right_.size() != size_.count()) {
    throw InvalidArgument("dual field buffer length does not match its dimensions");
  }
}

RofProblem::RofProblem(Image data, double alpha) : data_(std::move(data)), alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive and finite");
}

DualField gradient(const Image& u) {
  const int m = u.rows();
  const int n = u.cols();
  DualField p(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      p.down(i, j) = i < m - 1 ? u(i + 1, j) - u(i, j) : 0.0;
      p.right(i, j) = j < n - 1 ? u(i, j + 1) - u(i, j) : 0.0;
    }
  }
  return p;
}

Image divergence(const DualField& p) {
  const int m = p.rows();
  const int n = p.cols();
  Image out(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double vertical;
      if (m == 1) {
        vertical = 0.0;
      } else if (i == 0) {
        vertical = p.down(i, j);
      } else if (i < m - 1) {
        vertical = p.down(i, j) - p.down(i - 1, j);
      } else {
        vertical = -p.down(i - 1, j);
      }
      double horizontal;
      if (n == 1) {
        horizontal = 0.0;
      } else if (j == 0) {
        horizontal = p.right(i, j);
      } else if (j < n - 1) {
        horizontal = p.right(i, j) - p.right(i, j - 1);
      } else {
        horizontal = -p.right(i, j - 1);
      }
      out(i, j) = vertical + horizontal;
    }
  }
  return out;
}

double dual_energy(const DualField& p, const RofProblem& problem) {
  require_same_size(p.size(), problem.size(), "dual_energy");
  const Image div = divergence(p);
  const auto d = div.values();
  const auto f = problem.data().values();
  const double alpha = problem.alpha();
  return 0.5 * pairwise_sum(0, d.size(), [&](std::size_t k) {
           const double r = d[k] + alpha * f[k];
           return r * r;
         });
}

DualField dual_energy_gradient(const DualField& p, const RofProblem& problem) {
  require_same_size(p.size(), problem.size(), "dual_energy_gradient");
  Image residual = divergence(p);
  auto r = residual.values();
  const auto f = problem.data().values();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += problem.alpha() * f[k];
  return -1.0 * gradient(residual);
}

void project_to_unit_disks_inplace(DualField& p) {
  auto d = p.down_values();
  auto r = p.right_values();
  for (std::size_t k = 0; k < d.size(); ++k) project_pixel(d[k], r[k]);
}

DualField project_to_unit_disks(DualField p) {
  project_to_unit_disks_inplace(p);
  return p;
}

double max_magnitude(const DualField& p) {
  const auto d = p.down_values();
  const auto r = p.right_values();
  double best = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) best = std::max(best, std::sqrt(d[k] * d[k] + r[k] * r[k]));
  return best;
}

Image recover_primal(const DualField& p, const RofProblem& problem) {
  require_same_size(p.size(), problem.size(), "recover_primal");
  Image u = divergence(p);
  auto v = u.values();
  const auto f = problem.data().values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f[k] + v[k] / problem.alpha();
  return u;
}

double psnr(const Image& u, const Image& reference) {
  require_same_size(u.size(), reference.size(), "psnr");
  const double err = squared_norm(u - reference);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(u.size().count()) / err);
}

double inner_product(const Image& a, const Image& b) {
  require_same_size(a.size(), b.size(), "inner_product");
  const auto x = a.values();
  const auto y = b.values();
  return pairwise_sum(0, x.size(), [&](std::size_t k) { return x[k] * y[k]; });
}

double inner_product(const DualField& a, const DualField& b) {
  require_same_size(a.size(), b.size(), "inner_product");
  const auto ad = a.down_values();
  const auto ar = a.right_values();
  const auto bd = b.down_values();
  const auto br = b.right_values();
  return pairwise_sum(0, ad.size(), [&](std::size_t k) { return ad[k] * bd[k] + ar[k] * br[k]; });
}

double squared_norm(const Image& a) { return inner_product(a, a); }
double squared_norm(const DualField& a) { return inner_product(a, a); }

DualField operator-(const DualField& a, const DualField& b) {
  require_same_size(a.size(), b.size(), "operator-");
  DualField out = a;
  auto d = out.down_values();
  auto r = out.right_values();
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] -= b.down_values()[k];
    r[k] -= b.right_values()[k];
  }
  return out;
}

DualField operator+(const DualField& a, const DualField& b) {
  require_same_size(a.size(), b.size(), "operator+");
  DualField out = a;
  auto d = out.down_values();
  auto r = out.right_values();
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] += b.down_values()[k];
    r[k] += b.right_values()[k];
  }
  return out;
}

DualField operator*(double s, const DualField& a) {
  DualField out = a;
  for (double& v : out.down_values()) v *= s;
  for (double& v : out.right_values()) v *= s;
  return out;
}

Image operator-(const Image& a, const Image& b) {
  require_same_size(a.size(), b.size(), "operator-");
  Image out = a;
  auto v = out.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= b.values()[k];
  return out;
}

}  // namespace tvdd
