#include "tvdd/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tvdd/errors.hpp"

namespace tvdd {
namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::int64_t offset() const { return offset_; }

  int get() {
    const int c = in_.get();
    if (c != std::char_traits<char>::eof()) ++offset_;
    return c;
  }

  int peek() { return in_.peek(); }

  // Skips whitespace and, when allowed, '#' comments running to end of line.
  void skip_separators(bool comments) {
    for (;;) {
      const int c = peek();
      if (c == std::char_traits<char>::eof()) return;
      if (std::isspace(c)) {
        get();
      } else if (comments && c == '#') {
        while (peek() != std::char_traits<char>::eof() && peek() != '\n' && peek() != '\r') get();
      } else {
        return;
      }
    }
  }

  long read_unsigned(const char* what, bool comments) {
    skip_separators(comments);
    const std::int64_t start = offset_;
    long value = 0;
    int digits = 0;
    while (std::isdigit(peek())) {
      value = value * 10 + (get() - '0');
      if (value > 1'000'000'000L) throw IoError(std::string("PGM ") + what + " is too large", start);
      ++digits;
    }
    if (digits == 0) {
      if (peek() == std::char_traits<char>::eof()) throw IoError(std::string("truncated PGM: missing ") + what, offset_);
      throw IoError(std::string("malformed PGM: expected ") + what, offset_);
    }
    return value;
  }

 private:
  std::istream& in_;
  std::int64_t offset_ = 0;
};

}  // namespace

Image parse_pgm(std::istream& in) {
  Reader reader(in);
  const int m0 = reader.get();
  const int m1 = reader.get();
  if (m0 != 'P' || (m1 != '2' && m1 != '5')) throw IoError("not a PGM file: bad magic number", 0);
  const bool raw = m1 == '5';

  const long width = reader.read_unsigned("width", true);
  const long height = reader.read_unsigned("height", true);
  const long maxval = reader.read_unsigned("maxval", true);
  if (width <= 0 || height <= 0) throw IoError("malformed PGM: zero dimension", reader.offset());
  if (maxval <= 0 || maxval > 65535) throw IoError("malformed PGM: maxval must be in 1..65535", reader.offset());
  if (width * height > (1L << 31)) throw IoError("PGM image is too large", reader.offset());

  Image image(static_cast<int>(height), static_cast<int>(width));
  auto values = image.values();
  const double scale = static_cast<double>(maxval);

  if (raw) {
    const int sep = reader.get();
    if (sep == std::char_traits<char>::eof() || !std::isspace(sep)) {
      throw IoError("malformed PGM: expected whitespace before raster", reader.offset());
    }
    const bool wide = maxval > 255;
    for (std::size_t k = 0; k < values.size(); ++k) {
      long sample = 0;
      for (int byte = 0; byte < (wide ? 2 : 1); ++byte) {
        const int c = reader.get();
        if (c == std::char_traits<char>::eof()) throw IoError("truncated PGM raster", reader.offset());
        sample = (sample << 8) | (c & 0xff);
      }
      if (sample > maxval) throw IoError("PGM sample exceeds maxval", reader.offset() - (wide ? 2 : 1));
      values[k] = static_cast<double>(sample) / scale;
    }
  } else {
    for (std::size_t k = 0; k < values.size(); ++k) {
      reader.skip_separators(false);
      const std::int64_t at = reader.offset();
      const long sample = reader.read_unsigned("sample", false);
      if (sample > maxval) throw IoError("PGM sample exceeds maxval", at);
      values[k] = static_cast<double>(sample) / scale;
    }
  }
  return image;
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return parse_pgm(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_pgm(const Image& image, std::ostream& out, PgmEncoding encoding, int maxval) {
  if (maxval <= 0 || maxval > 65535) throw InvalidArgument("maxval must be in 1..65535");
  const auto to_sample = [maxval](double v) {
    if (std::isnan(v)) return 0L;
    const double scaled = std::clamp(v * maxval, 0.0, static_cast<double>(maxval));
    return std::lround(scaled);
  };

  out << (encoding == PgmEncoding::Raw ? "P5" : "P2") << '\n'
      << image.cols() << ' ' << image.rows() << '\n'
      << maxval << '\n';
  if (encoding == PgmEncoding::Raw) {
    for (double v : image.values()) {
      const long s = to_sample(v);
      if (maxval > 255) out.put(static_cast<char>((s >> 8) & 0xff));
      out.put(static_cast<char>(s & 0xff));
    }
  } else {
    // Plain format lines stay within 70 characters.
    for (int i = 0; i < image.rows(); ++i) {
      std::size_t line = 0;
      for (int j = 0; j < image.cols(); ++j) {
        const std::string token = std::to_string(to_sample(image(i, j)));
        if (line > 0 && line + 1 + token.size() > 70) {
          out << '\n';
          line = 0;
        }
        if (line > 0) {
          out << ' ';
          ++line;
        }
        out << token;
        line += token.size();
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("failed to write PGM data");
}

void write_pgm(const Image& image, const std::string& path, PgmEncoding encoding, int maxval) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_pgm(image, out, encoding, maxval);
}

}  // namespace tvdd
