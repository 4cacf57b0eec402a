#pragma once

#include <cstddef>
#include <span>

namespace tvdd {

/// Pairwise (tree) summation of term(i) for i in [begin, end).
///
/// The split points depend only on the range, so the result is reproducible
/// regardless of how the terms were produced. Error grows as O(log n) instead
/// of O(n) for a naive loop.
template <class Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kLeaf = 32;
  const std::size_t n = end - begin;
  if (n <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(0, values.size(), [&](std::size_t i) { return values[i]; });
}

}  // namespace tvdd
