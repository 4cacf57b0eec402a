#pragma once

// Nonoverlapping rectangular partitions of the pixel grid, their coloring,
// restriction/extension maps and the interface constants used by the
// convergence bounds.

#include <span>
#include <string_view>
#include <vector>

#include "tvdd/grid.hpp"
#include "tvdd/local_ops.hpp"

namespace tvdd {

enum class Shape { Window, Stripe };

std::string_view shape_name(Shape shape);

struct Rect {
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;

  int row_end() const { return row0 + rows; }
  int col_end() const { return col0 + cols; }
  bool contains(int i, int j) const { return i >= row0 && i < row_end() && j >= col0 && j < col_end(); }
  bool operator==(const Rect&) const = default;
};

/// One subdomain together with the pixel sets its local problem touches.
///
/// owned:    the subdomain itself.
/// extended: owned plus the adjacent pixel line below and to the right
///           (clipped to the grid), without the diagonal corner pixel. The
///           divergence of a field supported on `owned` lives here.
/// stencil:  extended plus the adjacent lines above and to the left. The
///           local data term reads the outer iterate only inside this set.
struct SubdomainView {
  int index = 0;
  int block_row = 0;
  int block_col = 0;
  int color = 0;
  Rect owned;
  bool has_bottom = false;
  bool has_right = false;

  LocalShape local_shape() const { return {owned.rows, owned.cols, has_bottom, has_right}; }
  Rect extended_bounds() const;
  bool in_extended(int i, int j) const;
  bool in_stencil(int i, int j) const;
  std::size_t extended_count() const;
};

class Decomposition {
 public:
  /// Splits `grid` into block_rows x block_cols equal rectangles.
  ///
  /// Window shape colors block (i, j) by (i - j) mod 3. Stripe shape needs a
  /// single block row or column and alternates two colors. Colors that end up
  /// unused (tiny partitions) are dropped and the rest renumbered in order, so
  /// color_count() is the number of nonempty classes.
  Decomposition(GridSize grid, int block_rows, int block_cols, Shape shape);

  GridSize grid() const { return grid_; }
  int block_rows() const { return block_rows_; }
  int block_cols() const { return block_cols_; }
  Shape shape() const { return shape_; }
  int color_count() const { return static_cast<int>(by_color_.size()); }
  int subdomain_count() const { return static_cast<int>(subdomains_.size()); }

  const SubdomainView& subdomain(int s) const { return subdomains_.at(static_cast<std::size_t>(s)); }
  std::span<const SubdomainView> subdomains() const { return subdomains_; }
  std::span<const int> subdomains_of_color(int color) const { return by_color_.at(static_cast<std::size_t>(color)); }

  /// Subdomain owning pixel (i, j).
  int owner(int i, int j) const;

 private:
  GridSize grid_;
  int block_rows_;
  int block_cols_;
  Shape shape_;
  std::vector<SubdomainView> subdomains_;
  std::vector<std::vector<int>> by_color_;
};

enum class StripeOrientation { Horizontal, Vertical };

/// `count` stripes; horizontal stripes are full-width bands stacked vertically.
Decomposition make_stripes(GridSize grid, int count, StripeOrientation orientation = StripeOrientation::Horizontal);

// Restriction to one subdomain and its adjoint (zero extension).
DualField restrict_to_subdomain(const DualField& p, const SubdomainView& s);
void write_subdomain(DualField& target, const SubdomainView& s, const DualField& local);

/// R_k p: one local field per subdomain of the color, in subdomains_of_color order.
std::vector<DualField> restrict_to_color(const DualField& p, const Decomposition& dec, int color);

/// R_k^* of the local fields: zero outside the color's subdomains.
DualField extend_from_color(std::span<const DualField> local, const Decomposition& dec, int color);

/// R_k^* R_k p without the intermediate local buffers.
DualField mask_to_color(const DualField& p, const Decomposition& dec, int color);

/// div of the zero extension of p_s, on s.extended_bounds(). The excluded
/// corner pixel is always zero.
Image local_divergence(const DualField& p_s, const SubdomainView& s);

/// Interface constant c1 bounding sum_k ||div R_k^* R_k p||^2 - ||div p||^2
/// by c1 ||p||_inf^2. Windows: 7(M Ns + Ms N) - 11 Ms Ns. Stripes use the
/// sharper count(7L - 5) with L the stripe length in pixels.
double c1_constant(const Decomposition& dec);

/// Total interface length M (Ns - 1) + N (Ms - 1) in pixels.
long long interface_length(const Decomposition& dec);

/// D(p, q) = sum_k 1/2 ||div R_k^* R_k (p - q)||^2.
double bregman_distance(const DualField& p, const DualField& q, const Decomposition& dec);

}  // namespace tvdd
