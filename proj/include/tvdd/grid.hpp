#pragma once

// Scalar and vector fields on an M x N pixel grid, the discrete gradient and
// divergence, and the dual ROF energy.
//
// Storage is row-major. Pixel (i, j) is row i, column j, both zero-based, so
// row i here is row i + 1 in the usual one-based textbook indexing. A dual
// field carries two components per pixel:
//   down(i, j)  pairs with the forward difference u(i+1, j) - u(i, j)
//   right(i, j) pairs with the forward difference u(i, j+1) - u(i, j)

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace tvdd {

struct GridSize {
  int rows = 0;
  int cols = 0;

  std::size_t count() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool operator==(const GridSize&) const = default;
};

class Image {
 public:
  Image() = default;
  Image(int rows, int cols, double fill = 0.0);
  Image(int rows, int cols, std::vector<double> values);

  int rows() const { return size_.rows; }
  int cols() const { return size_.cols; }
  GridSize size() const { return size_; }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(size_.cols) + static_cast<std::size_t>(j);
  }

  GridSize size_;
  std::vector<double> data_;
};

class DualField {
 public:
  DualField() = default;
  DualField(int rows, int cols);
  explicit DualField(GridSize size) : DualField(size.rows, size.cols) {}
  DualField(int rows, int cols, std::vector<double> down, std::vector<double> right);

  int rows() const { return size_.rows; }
  int cols() const { return size_.cols; }
  GridSize size() const { return size_; }

  double& down(int i, int j) { return down_[index(i, j)]; }
  double down(int i, int j) const { return down_[index(i, j)]; }
  double& right(int i, int j) { return right_[index(i, j)]; }
  double right(int i, int j) const { return right_[index(i, j)]; }

  std::span<double> down_values() { return down_; }
  std::span<const double> down_values() const { return down_; }
  std::span<double> right_values() { return right_; }
  std::span<const double> right_values() const { return right_; }

  bool operator==(const DualField&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(size_.cols) + static_cast<std::size_t>(j);
  }

  GridSize size_;
  std::vector<double> down_;
  std::vector<double> right_;
};

/// Data term f and fidelity weight alpha of the ROF model.
class RofProblem {
 public:
  RofProblem(Image data, double alpha);

  const Image& data() const { return data_; }
  double alpha() const { return alpha_; }
  GridSize size() const { return data_.size(); }

 private:
  Image data_;
  double alpha_;
};

/// Forward differences; zero on the last row (down) and last column (right).
DualField gradient(const Image& u);

/// Minus the adjoint of gradient(). On a single-row grid the down component
/// never contributes, and likewise for the right component on a single column.
Image divergence(const DualField& p);

/// F(p) = 1/2 ||div p + alpha f||^2, accumulated by pairwise summation.
double dual_energy(const DualField& p, const RofProblem& problem);

/// Gradient of the dual energy, -grad(div p + alpha f).
DualField dual_energy_gradient(const DualField& p, const RofProblem& problem);

/// Projects one pixel (d, r) onto the unit disk. The result always passes
/// sqrt(d^2 + r^2) <= 1 in floating point, so projecting twice changes nothing.
inline void project_pixel(double& d, double& r) {
  const double norm = std::sqrt(d * d + r * r);
  if (norm > 1.0) {
    d /= norm;
    r /= norm;
    while (std::sqrt(d * d + r * r) > 1.0) {
      d *= 0x1.fffffffffffffp-1;
      r *= 0x1.fffffffffffffp-1;
    }
  }
}

/// Euclidean projection onto the per-pixel unit disks.
DualField project_to_unit_disks(DualField p);
void project_to_unit_disks_inplace(DualField& p);

/// max_ij |p_ij|, the infinity norm used by the interface bounds.
double max_magnitude(const DualField& p);

/// u = f + div(p) / alpha.
Image recover_primal(const DualField& p, const RofProblem& problem);

/// Peak signal-to-noise ratio in dB with peak value 1. Identical images give
/// +infinity.
double psnr(const Image& u, const Image& reference);

double inner_product(const Image& a, const Image& b);
double inner_product(const DualField& a, const DualField& b);
double squared_norm(const Image& a);
double squared_norm(const DualField& a);

// Elementwise helpers used by the solvers and tests.
DualField operator-(const DualField& a, const DualField& b);
DualField operator+(const DualField& a, const DualField& b);
DualField operator*(double s, const DualField& a);
Image operator-(const Image& a, const Image& b);

}  // namespace tvdd
