#pragma once

#include "tvdd/grid.hpp"

namespace tvdd {

/// Deterministic test image with values in [0, 1]: a smooth ramp background,
/// flat rectangles, disks and an ellipse with sharp edges, a sinusoidal
/// texture patch (16 pixel period) and a fine checkerboard band (4 pixel
/// cells). Geometry scales with the image; textures keep their pixel size.
Image make_synthetic_image(int rows, int cols);

}  // namespace tvdd
