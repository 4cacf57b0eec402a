#include "tvdd/local_ops.hpp"

namespace tvdd {

void block_divergence(const LocalShape& shape, const double* down, const double* right, double* out) {
  const int rows = shape.rows;
  const int cols = shape.cols;
  const int er = shape.ext_rows();
  const int ec = shape.ext_cols();
  // Last column / row values only contribute when the block has a neighbor
  // there; at the grid edge they are dead degrees of freedom.
  const int right_own_end = shape.has_right ? cols : cols - 1;

  for (int a = 0; a < er; ++a) {
    double* o = out + static_cast<std::size_t>(a) * ec;
    const double* own_d =
        (a < rows && (a < rows - 1 || shape.has_bottom)) ? down + static_cast<std::size_t>(a) * cols : nullptr;
    const double* up_d = (a >= 1 && a - 1 < rows) ? down + static_cast<std::size_t>(a - 1) * cols : nullptr;
    const double* r = a < rows ? right + static_cast<std::size_t>(a) * cols : nullptr;

    for (int b = 0; b < ec; ++b) {
      const bool in_block = b < cols;
      const double vertical = ((in_block && own_d) ? own_d[b] : 0.0) - ((in_block && up_d) ? up_d[b] : 0.0);
      double horizontal = 0.0;
      if (r) horizontal = (b < right_own_end ? r[b] : 0.0) - ((b >= 1 && b - 1 < cols) ? r[b - 1] : 0.0);
      o[b] = vertical + horizontal;
    }
  }
}

void block_divergence_adjoint(const LocalShape& shape, const double* r, double* down, double* right) {
  const int rows = shape.rows;
  const int cols = shape.cols;
  const int ec = shape.ext_cols();
  const int down_end = shape.has_bottom ? rows : rows - 1;
  const int right_end = shape.has_right ? cols : cols - 1;

  for (int a = 0; a < rows; ++a) {
    const double* ra = r + static_cast<std::size_t>(a) * ec;
    double* d = down + static_cast<std::size_t>(a) * cols;
    double* h = right + static_cast<std::size_t>(a) * cols;
    if (a < down_end) {
      const double* rb = ra + ec;
      for (int b = 0; b < cols; ++b) d[b] = ra[b] - rb[b];
    } else {
      for (int b = 0; b < cols; ++b) d[b] = 0.0;
    }
    for (int b = 0; b < right_end; ++b) h[b] = ra[b] - ra[b + 1];
    for (int b = right_end; b < cols; ++b) h[b] = 0.0;
  }
}

}  // namespace tvdd
