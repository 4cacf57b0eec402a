#include "tvdd/decomposition.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "tvdd/errors.hpp"
#include "tvdd/numeric.hpp"

namespace tvdd {

std::string_view shape_name(Shape shape) { return shape == Shape::Window ? "window" : "stripe"; }

Rect SubdomainView::extended_bounds() const {
  return {owned.row0, owned.col0, owned.rows + (has_bottom ? 1 : 0), owned.cols + (has_right ? 1 : 0)};
}

bool SubdomainView::in_extended(int i, int j) const {
  if (owned.contains(i, j)) return true;
  const bool below = has_bottom && i == owned.row_end() && j >= owned.col0 && j < owned.col_end();
  const bool beside = has_right && j == owned.col_end() && i >= owned.row0 && i < owned.row_end();
  return below || beside;
}

bool SubdomainView::in_stencil(int i, int j) const {
  // (i, j) is read when some extended pixel needs it: the pixel itself, its
  // lower neighbor or its right neighbor lies in the extended set.
  return in_extended(i, j) || in_extended(i + 1, j) || in_extended(i, j + 1);
}

std::size_t SubdomainView::extended_count() const {
  return static_cast<std::size_t>(owned.rows) * owned.cols + (has_bottom ? owned.cols : 0) +
         (has_right ? owned.rows : 0);
}

Decomposition::Decomposition(GridSize grid, int block_rows, int block_cols, Shape shape)
    : grid_(grid), block_rows_(block_rows), block_cols_(block_cols), shape_(shape) {
  if (grid.rows <= 0 || grid.cols <= 0) throw InvalidArgument("grid dimensions must be positive");
  if (block_rows <= 0 || block_cols <= 0) throw InvalidArgument("subdomain counts must be positive");
  if (grid.rows % block_rows != 0 || grid.cols % block_cols != 0) {
    throw InvalidArgument("grid " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                          " is not divisible into " + std::to_string(block_rows) + "x" +
                          std::to_string(block_cols) + " equal subdomains");
  }
  if (shape == Shape::Stripe && block_rows > 1 && block_cols > 1) {
    throw InvalidArgument("stripe decomposition needs a single row or column of subdomains");
  }

  const int height = grid.rows / block_rows;
  const int width = grid.cols / block_cols;

  std::vector<int> raw_colors;
  for (int bi = 0; bi < block_rows; ++bi) {
    for (int bj = 0; bj < block_cols; ++bj) {
      SubdomainView view;
      view.index = static_cast<int>(subdomains_.size());
      view.block_row = bi;
      view.block_col = bj;
      view.owned = {bi * height, bj * width, height, width};
      view.has_bottom = bi + 1 < block_rows;
      view.has_right = bj + 1 < block_cols;
      subdomains_.push_back(view);
      if (shape == Shape::Window) {
        raw_colors.push_back(((bi - bj) % 3 + 3) % 3);
      } else {
        raw_colors.push_back((block_rows > 1 ? bi : bj) % 2);
      }
    }
  }

  std::map<int, int> compact;
  for (int c : raw_colors) compact.emplace(c, 0);
  int next = 0;
  for (auto& [raw, id] : compact) id = next++;
  by_color_.resize(compact.size());
  for (auto& view : subdomains_) {
    view.color = compact.at(raw_colors[static_cast<std::size_t>(view.index)]);
    by_color_[static_cast<std::size_t>(view.color)].push_back(view.index);
  }
}

int Decomposition::owner(int i, int j) const {
  const int height = grid_.rows / block_rows_;
  const int width = grid_.cols / block_cols_;
  return (i / height) * block_cols_ + j / width;
}

Decomposition make_stripes(GridSize grid, int count, StripeOrientation orientation) {
  return orientation == StripeOrientation::Horizontal ? Decomposition(grid, count, 1, Shape::Stripe)
                                                      : Decomposition(grid, 1, count, Shape::Stripe);
}

DualField restrict_to_subdomain(const DualField& p, const SubdomainView& s) {
  DualField local(s.owned.rows, s.owned.cols);
  for (int a = 0; a < s.owned.rows; ++a) {
    for (int b = 0; b < s.owned.cols; ++b) {
      local.down(a, b) = p.down(s.owned.row0 + a, s.owned.col0 + b);
      local.right(a, b) = p.right(s.owned.row0 + a, s.owned.col0 + b);
    }
  }
  return local;
}

void write_subdomain(DualField& target, const SubdomainView& s, const DualField& local) {
  if (local.rows() != s.owned.rows || local.cols() != s.owned.cols) {
    throw InvalidArgument("local field does not match the subdomain size");
  }
  for (int a = 0; a < s.owned.rows; ++a) {
    for (int b = 0; b < s.owned.cols; ++b) {
      target.down(s.owned.row0 + a, s.owned.col0 + b) = local.down(a, b);
      target.right(s.owned.row0 + a, s.owned.col0 + b) = local.right(a, b);
    }
  }
}

std::vector<DualField> restrict_to_color(const DualField& p, const Decomposition& dec, int color) {
  if (!(p.size() == dec.grid())) throw InvalidArgument("restrict_to_color: field does not match the grid");
  std::vector<DualField> out;
  for (int s : dec.subdomains_of_color(color)) out.push_back(restrict_to_subdomain(p, dec.subdomain(s)));
  return out;
}

DualField extend_from_color(std::span<const DualField> local, const Decomposition& dec, int color) {
  const auto members = dec.subdomains_of_color(color);
  if (local.size() != members.size()) throw InvalidArgument("extend_from_color: wrong number of local fields");
  DualField out(dec.grid());
  for (std::size_t m = 0; m < members.size(); ++m) write_subdomain(out, dec.subdomain(members[m]), local[m]);
  return out;
}

DualField mask_to_color(const DualField& p, const Decomposition& dec, int color) {
  DualField out(dec.grid());
  for (int s : dec.subdomains_of_color(color)) write_subdomain(out, dec.subdomain(s), restrict_to_subdomain(p, dec.subdomain(s)));
  return out;
}

Image local_divergence(const DualField& p_s, const SubdomainView& s) {
  if (p_s.rows() != s.owned.rows || p_s.cols() != s.owned.cols) {
    throw InvalidArgument("local_divergence: field does not match the subdomain size");
  }
  const LocalShape shape = s.local_shape();
  Image out(shape.ext_rows(), shape.ext_cols());
  block_divergence(shape, p_s.down_values().data(), p_s.right_values().data(), out.values().data());
  return out;
}

double c1_constant(const Decomposition& dec) {
  const double m = dec.grid().rows;
  const double n = dec.grid().cols;
  const double ms = dec.block_rows();
  const double ns = dec.block_cols();
  if (dec.shape() == Shape::Stripe) {
    const double count = ms * ns;
    // Vertical stripes (Ms = 1) run the full height M; horizontal stripes
    // are the transposed case and run the full width N.
    const double length = dec.block_rows() == 1 ? m : n;
    return count * (7.0 * length - 5.0);
  }
  return 7.0 * (m * ns + ms * n) - 11.0 * ms * ns;
}

long long interface_length(const Decomposition& dec) {
  const long long m = dec.grid().rows;
  const long long n = dec.grid().cols;
  return m * (dec.block_cols() - 1) + n * (dec.block_rows() - 1);
}

double bregman_distance(const DualField& p, const DualField& q, const Decomposition& dec) {
  if (!(p.size() == dec.grid()) || !(q.size() == dec.grid())) {
    throw InvalidArgument("bregman_distance: field does not match the grid");
  }
  const DualField diff = p - q;
  double total = 0.0;
  for (int k = 0; k < dec.color_count(); ++k) {
    total += 0.5 * squared_norm(divergence(mask_to_color(diff, dec, k)));
  }
  return total;
}

}  // namespace tvdd
