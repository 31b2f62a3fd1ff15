#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "databand/deal.hpp"
#include "databand/deal_mix.hpp"
#include "databand/priors.hpp"

namespace databand {

// T parameter worlds, N noise draws per world, and the quantiles to report.
struct SimulationPlan {
  std::int64_t worlds = 5000;           // T
  std::int64_t draws_per_world = 10;    // N
  std::uint64_t seed = 0;
  std::vector<double> quantiles = {0.05, 0.5, 0.95};

  std::int64_t total_draws() const { return worlds * draws_per_world; }
  void validate() const;

  bool operator==(const SimulationPlan&) const = default;
};

// Deal source for a run: either one fixed multiplier vector, or a deal mix
// (optionally conditioned on a configuration class) mapped through the
// attribute formulas per draw.
struct PipelineSource {
  DealMix mix;
  std::optional<ConfigurationClass> configuration;
  NodeTable node_table;
  FormulaParams formula;
  std::uint64_t max_class_attempts = kDefaultMaxClassAttempts;
};
using DealSource = std::variant<MultiplierVector, PipelineSource>;

// What to do when a world produces a non-finite price.
enum class OverflowPolicy { kAbort, kDropWorld };

struct WorldRecord {
  ParameterVector theta;
  std::uint64_t rejection_attempts = 1;
  bool dropped = false;
};

struct RunTelemetry {
  double acceptance_rate = 1.0;   // governed-prior acceptance across worlds
  double worlds_per_second = 0.0;
  std::int64_t dropped_worlds = 0;
};

// The T x N price array plus the per-world parameter audit trail.
struct PriceSampleSet {
  SimulationPlan plan;                 // echo
  std::vector<double> samples;         // row-major, worlds x draws_per_world
  std::vector<WorldRecord> worlds;     // one record per world, audit
  RunTelemetry telemetry;

  std::span<const double> world_samples(std::size_t t) const;
};

// log-linear price kernel: exp(alpha + beta . ln x + eta). Equivalent to the
// multiplicative form b0 * prod x^beta * e^eta; the debug build cross-checks
// the two routes. Throws on a non-finite result.
double price_one(const ParameterVector& theta, const MultiplierVector& x,
                 double eta);

// The multiplicative route, kept as an independently evaluated form.
double price_one_multiplicative(const ParameterVector& theta,
                                const MultiplierVector& x, double eta);

// Runs the full scheme: per world t one governed parameter draw, then N
// (attribute, noise) pairs. Output is a pure function of (plan, specs);
// thread_count only changes wall time.
PriceSampleSet simulate(const SimulationPlan& plan, const PriorSpec& prior,
                        const ConstraintSet& constraints,
                        const DealSource& deal_source, int thread_count = 1,
                        OverflowPolicy overflow = OverflowPolicy::kAbort);

// Transforms accepted by estimate_mean.
struct Transform {
  enum class Kind { kIdentity, kLog, kIndicatorAbove };
  Kind kind = Kind::kIdentity;
  double threshold = 0.0;  // only for kIndicatorAbove

  static Transform identity() { return {}; }
  static Transform log() { return {Kind::kLog}; }
  static Transform indicator_above(double t) {
    return {Kind::kIndicatorAbove, t};
  }

  double operator()(double p) const;
};

struct MeanEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

MeanEstimate estimate_mean(std::span<const double> samples,
                           const Transform& h = Transform::identity());

struct QuantileBand {
  double q = 0.5;
  double price_usd_per_mb = 0.0;
};

// Price bands plus the sample-mean summary of the run.
struct PriceBands {
  std::vector<QuantileBand> bands;
  double mean = 0.0;
  double mean_standard_error = 0.0;
  std::size_t count = 0;

  double at(double q) const;  // throws if q was not requested

  // Unit conversions used in reports.
  static double usd_per_gb(double usd_per_mb) { return usd_per_mb * 1024.0; }
  static double contract_total_usd(double usd_per_mb, double volume_mb) {
    return usd_per_mb * volume_mb;
  }
};

// Empirical quantiles under the inf-based convention: the ceil(q*n)-th order
// statistic, no interpolation.
PriceBands estimate_quantiles(std::span<const double> samples,
                              std::span<const double> quantiles);

inline PriceBands estimate_quantiles(const PriceSampleSet& set) {
  return estimate_quantiles(set.samples, set.plan.quantiles);
}

// exp(ln b0 + mu . ln x): the exact median of ln P when truncation does not
// shift its location. Refuses when alpha/beta constraints carve off real
// mass (probed acceptance < min_acceptance); sigma-only truncation leaves
// the median where it is and is not probed.
double semi_analytic_median(const PriorSpec& prior,
                            const ConstraintSet& constraints,
                            const MultiplierVector& x,
                            double min_acceptance = 0.999);

}  // namespace databand
