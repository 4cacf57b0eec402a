#pragma once

// Additive Gaussian noise from a counter-based generator, so a (seed, pixel)
// pair always maps to the same sample regardless of platform or thread layout.

#include <array>
#include <cstdint>

#include "tvdd/grid.hpp"

namespace tvdd {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal sample number `index` of stream `seed`.
///
/// Samples come in pairs from one Philox block: block = index / 2 with
/// counter {block_lo, block_hi, 0, 0} and key {seed_lo, seed_hi}. The four
/// output words form two 53-bit uniforms in (0, 1], combined by Box-Muller;
/// even indices take the cosine branch, odd indices the sine branch.
double standard_normal(std::uint64_t seed, std::uint64_t index);

/// u + eta with eta_k ~ N(0, variance) i.i.d., eta_k = sqrt(variance) *
/// standard_normal(seed, k) in row-major pixel order. Values are not clamped.
Image add_gaussian_noise(const Image& u, double variance, std::uint64_t seed);

}  // namespace tvdd
