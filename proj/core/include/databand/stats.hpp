#pragma once

#include <cstddef>
#include <span>

namespace databand::stats {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF) for p strictly inside (0, 1).
// Wichura's AS 241 rational approximations, accurate to ~1e-15.
double normal_quantile(double p);

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1 denominator), 0 for n < 2
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

}  // namespace databand::stats
