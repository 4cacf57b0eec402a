#pragma once

// Test-side reference implementations. Written straight from the textbook
// definitions with plain loops so they share no code with the library kernels.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tvdd/decomposition.hpp"
#include "tvdd/grid.hpp"

namespace oracle {

using tvdd::DualField;
using tvdd::Image;

inline Image random_image(int rows, int cols, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Image u(rows, cols);
  for (double& v : u.values()) v = dist(rng);
  return u;
}

inline DualField random_field(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  DualField p(rows, cols);
  for (double& v : p.down_values()) v = dist(rng);
  for (double& v : p.right_values()) v = dist(rng);
  return p;
}

// Uniform in the unit disk at every pixel.
inline DualField random_feasible(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  DualField p(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double r = std::sqrt(radius(rng));
      const double a = angle(rng);
      p.down(i, j) = r * std::cos(a);
      p.right(i, j) = r * std::sin(a);
    }
  }
  return p;
}

// Three-case backward differences, one component at a time.
inline Image divergence(const DualField& p) {
  const int m = p.rows();
  const int n = p.cols();
  Image out(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double a = 0.0;
      if (m > 1) {
        if (i == 0) a = p.down(i, j);
        else if (i == m - 1) a = -p.down(i - 1, j);
        else a = p.down(i, j) - p.down(i - 1, j);
      }
      double b = 0.0;
      if (n > 1) {
        if (j == 0) b = p.right(i, j);
        else if (j == n - 1) b = -p.right(i, j - 1);
        else b = p.right(i, j) - p.right(i, j - 1);
      }
      out(i, j) = a + b;
    }
  }
  return out;
}

inline DualField gradient(const Image& u) {
  DualField g(u.rows(), u.cols());
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = 0; j < u.cols(); ++j) {
      g.down(i, j) = i + 1 < u.rows() ? u(i + 1, j) - u(i, j) : 0.0;
      g.right(i, j) = j + 1 < u.cols() ? u(i, j + 1) - u(i, j) : 0.0;
    }
  }
  return g;
}

inline double dot(const Image& a, const Image& b) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.values().size(); ++k) s += static_cast<long double>(a.values()[k]) * b.values()[k];
  return static_cast<double>(s);
}

inline double dot(const DualField& a, const DualField& b) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.down_values().size(); ++k) {
    s += static_cast<long double>(a.down_values()[k]) * b.down_values()[k];
    s += static_cast<long double>(a.right_values()[k]) * b.right_values()[k];
  }
  return static_cast<double>(s);
}

inline double norm2(const Image& a) { return dot(a, a); }
inline double norm2(const DualField& a) { return dot(a, a); }

inline double energy(const DualField& p, const Image& f, double alpha) {
  const Image d = oracle::divergence(p);
  long double s = 0.0L;
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < f.cols(); ++j) {
      const long double r = static_cast<long double>(d(i, j)) + alpha * f(i, j);
      s += r * r;
    }
  }
  return static_cast<double>(0.5L * s);
}

inline void project(DualField& p) {
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      const double m = std::hypot(p.down(i, j), p.right(i, j));
      if (m > 1.0) {
        p.down(i, j) /= m;
        p.right(i, j) /= m;
      }
    }
  }
}

// Zero outside the given pixel predicate.
template <class Pred>
DualField masked(const DualField& p, Pred keep) {
  DualField out(p.rows(), p.cols());
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (keep(i, j)) {
        out.down(i, j) = p.down(i, j);
        out.right(i, j) = p.right(i, j);
      }
    }
  }
  return out;
}

// Plain projected gradient with step 1/8 on the full grid dual problem.
inline DualField projected_gradient(const Image& f, double alpha, long iterations, DualField p) {
  for (long it = 0; it < iterations; ++it) {
    Image r = oracle::divergence(p);
    for (int i = 0; i < f.rows(); ++i)
      for (int j = 0; j < f.cols(); ++j) r(i, j) += alpha * f(i, j);
    const DualField g = oracle::gradient(r);  // grad F = -gradient(r)
    for (std::size_t k = 0; k < p.down_values().size(); ++k) {
      p.down_values()[k] += g.down_values()[k] / 8.0;
      p.right_values()[k] += g.right_values()[k] / 8.0;
    }
    project(p);
  }
  return p;
}

// Isotropic TV of u with forward differences.
inline double total_variation(const Image& u) {
  const DualField g = oracle::gradient(u);
  long double s = 0.0L;
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j) s += std::hypot(g.down(i, j), g.right(i, j));
  return static_cast<double>(s);
}

// Primal ROF objective alpha/2 ||u - f||^2 + TV(u).
inline double primal(const Image& u, const Image& f, double alpha) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < u.values().size(); ++k) {
    const long double d = static_cast<long double>(u.values()[k]) - f.values()[k];
    s += d * d;
  }
  return static_cast<double>(0.5L * alpha * s) + total_variation(u);
}

}  // namespace oracle
