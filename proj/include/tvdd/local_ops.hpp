#pragma once

// Divergence kernels on a subdomain block and its extension.
//
// A block of rows x cols dual values is embedded in the grid. If the block
// does not touch the bottom edge of the grid, its divergence spills into one
// extra row below (has_bottom); likewise one extra column on the right. The
// output buffer covers ext_rows() x ext_cols(), row-major. With both flags
// false the block is the whole grid and the kernel is the global divergence.

#include <cstddef>

namespace tvdd {

struct LocalShape {
  int rows = 0;
  int cols = 0;
  bool has_bottom = false;
  bool has_right = false;

  int ext_rows() const { return rows + (has_bottom ? 1 : 0); }
  int ext_cols() const { return cols + (has_right ? 1 : 0); }
  std::size_t count() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  std::size_t ext_count() const {
    return static_cast<std::size_t>(ext_rows()) * static_cast<std::size_t>(ext_cols());
  }
  // Index of the bottom-right extension pixel, which no block value reaches,
  // or ext_count() when there is none.
  std::size_t corner_index() const { return has_bottom && has_right ? ext_count() - 1 : ext_count(); }
};

/// out = div of the zero-extended block (down, right).
void block_divergence(const LocalShape& shape, const double* down, const double* right, double* out);

/// (down, right) = div^T r, i.e. minus the block gradient of r.
void block_divergence_adjoint(const LocalShape& shape, const double* r, double* down, double* right);

}  // namespace tvdd
