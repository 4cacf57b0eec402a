#include "tvdd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tvdd {

Image make_synthetic_image(int rows, int cols) {
  Image image(rows, cols);
  const auto inside_ellipse = [](double x, double y, double cx, double cy, double ax, double ay) {
    const double dx = (x - cx) / ax;
    const double dy = (y - cy) / ay;
    return dx * dx + dy * dy <= 1.0;
  };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double y = (i + 0.5) / rows;
      const double x = (j + 0.5) / cols;
      double v = 0.25 + 0.3 * y;
      if (x >= 0.55 && x <= 0.95 && y >= 0.55 && y <= 0.95) {
        v += 0.1 * std::sin(2.0 * std::numbers::pi * i / 16.0) * std::sin(2.0 * std::numbers::pi * j / 16.0);
      }
      if (y >= 0.06 && y <= 0.12 && x >= 0.05 && x <= 0.95) v = ((i / 4 + j / 4) % 2 == 0) ? 0.35 : 0.6;
      if (x >= 0.1 && x <= 0.45 && y >= 0.18 && y <= 0.5) v = 0.8;
      if (inside_ellipse(x, y, 0.7, 0.32, 0.17, 0.17)) v = 0.1;
      if (inside_ellipse(x, y, 0.28, 0.75, 0.14, 0.14)) v = 0.65;
      if (inside_ellipse(x, y, 0.75, 0.75, 0.16, 0.09)) v = 0.92;
      image(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return image;
}

}  // namespace tvdd
