#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "databand/deal.hpp"
#include "databand/priors.hpp"

namespace databand {

// One recorded transaction: the levers that were in force and the realized
// price per megabyte.
struct ObservedDeal {
  MultiplierVector multipliers;
  double price_usd_per_mb = 0.0;
  std::string label;

  void validate() const;
};

struct FitResult {
  double alpha_hat = 0.0;
  std::array<double, kLeverCount> beta_hat{};
  double sigma_hat = 0.0;  // residual std, n-6 degrees of freedom
  double alpha_se = 0.0;
  std::array<double, kLeverCount> beta_se{};
  std::size_t n = 0;
  double condition = 0.0;  // condition number of the design matrix
};

inline constexpr std::size_t kMinDealsForFit = kLeverCount + 2;  // 7

// Least squares on ln(price) ~ 1 + ln(x): recovers alpha, the elasticities
// and the residual scale. Throws ValidationError for n < 7 or a (near-)rank-
// deficient design, naming the collinear lever(s).
FitResult fit_ols(std::span<const ObservedDeal> deals,
                  double condition_limit = 1e8);

// Moment blend of the prior toward the fit:
//   mu  <- (1-w) mu + w beta_hat        s  <- (1-w) s + w SE
//   ln b0 <- (1-w) ln b0 + w alpha_hat  s_alpha likewise
//   s_sigma matched so the half-normal mean equals the blended residual scale
// w = 0 returns the old spec unchanged.
PriorSpec refresh_prior(const PriorSpec& old_spec, const FitResult& fit,
                        double blend_weight);

// Sample-size heuristic for the blend weight: n / (n + 20).
double default_blend_weight(std::size_t n);

}  // namespace databand
