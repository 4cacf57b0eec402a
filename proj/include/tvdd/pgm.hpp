#pragma once

// Netpbm graymap I/O. Intensities are mapped to [0, 1] by dividing by maxval.

#include <iosfwd>
#include <string>

#include "tvdd/grid.hpp"

namespace tvdd {

enum class PgmEncoding { Plain /* P2 */, Raw /* P5 */ };

Image read_pgm(const std::string& path);
Image parse_pgm(std::istream& in);

/// Writes round(v * maxval) clamped to [0, maxval]. Samples above 255 use two
/// big-endian bytes in the raw encoding.
void write_pgm(const Image& image, const std::string& path, PgmEncoding encoding = PgmEncoding::Raw,
               int maxval = 255);
void write_pgm(const Image& image, std::ostream& out, PgmEncoding encoding = PgmEncoding::Raw, int maxval = 255);

}  // namespace tvdd
