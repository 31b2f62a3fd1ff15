#pragma once

#include <cstdint>

namespace databand {

// Counter-based random stream (splitmix64). Substreams are derived by
// hashing (seed, world, lane), so any world can be generated independently
// of execution order or thread count.
//
// Lanes keep draw positions stable across run modes: parameter draws, deal
// attribute draws, and noise draws never share a stream, so a fixed-deal run
// and a degenerate-pipeline run consume identical noise sequences.
class RngStream {
 public:
  enum class Lane : std::uint64_t {
    kParameters = 0,
    kAttributes = 1,
    kNoise = 2,
    kProbe = 3,
  };

  RngStream() = default;
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static RngStream for_world(std::uint64_t seed, std::uint64_t world,
                             Lane lane);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01();

  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n must be positive. Unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n);

  // Inverse-CDF normal draw; consumes exactly one uniform.
  double normal(double mean, double stddev);

  // |N(0, scale^2)|; scale 0 yields exactly 0 (degenerate mode).
  double half_normal(double scale);

  // Triangular(min, mode, max) via inverse CDF; consumes one uniform.
  double triangular(double min, double mode, double max);

 private:
  std::uint64_t state_ = 0;
};

}  // namespace databand
