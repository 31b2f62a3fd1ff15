#include "databand/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "databand/stats.hpp"

namespace databand {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 output function (Fisher-Yates / murmur-style finalizer).
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::for_world(std::uint64_t seed, std::uint64_t world,
                               Lane lane) {
  std::uint64_t key = mix64(seed + kGamma);
  key = mix64(key ^ (world + 0xBF58476D1CE4E5B9ULL));
  key = mix64(key ^ (static_cast<std::uint64_t>(lane) + 0x94D049BB133111EBULL));
  return RngStream(key);
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::uniform01() {
  // 53 random bits centered on half-steps: values in [2^-54, 1 - 2^-54].
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  const std::uint64_t bound = n * ((~std::uint64_t{0}) / n);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= bound);
  return v % n;
}

double RngStream::normal(double mean, double stddev) {
  return mean + stddev * stats::normal_quantile(uniform01());
}

double RngStream::half_normal(double scale) {
  if (scale == 0.0) {
    uniform01();  // keep draw positions stable across degenerate configs
    return 0.0;
  }
  return std::abs(normal(0.0, scale));
}

double RngStream::triangular(double min, double mode, double max) {
  if (!(min <= mode && mode <= max && min < max)) {
    throw std::invalid_argument("triangular: need min <= mode <= max, min < max");
  }
  const double u = uniform01();
  const double cut = (mode - min) / (max - min);
  if (u < cut) {
    return min + std::sqrt(u * (max - min) * (mode - min));
  }
  return max - std::sqrt((1.0 - u) * (max - min) * (max - mode));
}

}  // namespace databand
