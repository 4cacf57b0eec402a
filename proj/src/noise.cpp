#include "tvdd/noise.hpp"

#include <cmath>
#include <numbers>

#include "tvdd/errors.hpp"

namespace tvdd {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

double unit_interval(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t block = index / 2;
  const auto out = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0u, 0u},
                              {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const double u1 = unit_interval(out[0], out[1]);
  const double u2 = unit_interval(out[2], out[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

Image add_gaussian_noise(const Image& u, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) throw InvalidArgument("noise variance must be nonnegative");
  Image out = u;
  if (variance == 0.0) return out;
  const double sigma = std::sqrt(variance);
  auto v = out.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += sigma * standard_normal(seed, k);
  return out;
}

}  // namespace tvdd
