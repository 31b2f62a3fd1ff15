#include "databand/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "databand/errors.hpp"
#include "databand/stats.hpp"

namespace databand {

void SimulationPlan::validate() const {
  if (worlds < 1) throw ValidationError("plan: worlds (T) must be >= 1");
  if (draws_per_world < 1) {
    throw ValidationError("plan: draws_per_world (N) must be >= 1");
  }
  if (quantiles.empty()) {
    throw ValidationError("plan: at least one quantile is required");
  }
  double prev = 0.0;
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) {
      throw ValidationError("plan: quantiles must lie strictly in (0,1)");
    }
    if (!(q > prev)) {
      throw ValidationError("plan: quantiles must be strictly increasing");
    }
    prev = q;
  }
}

std::span<const double> PriceSampleSet::world_samples(std::size_t t) const {
  const std::size_t n = static_cast<std::size_t>(plan.draws_per_world);
  return std::span<const double>(samples).subspan(t * n, n);
}

// Extended-precision intermediates keep the two algebraically equivalent
// evaluation routes within a few final-rounding ulps of each other.
double price_one_multiplicative(const ParameterVector& theta,
                                const MultiplierVector& x, double eta) {
  long double price = std::exp(static_cast<long double>(theta.alpha));
  for (std::size_t j = 0; j < MultiplierVector::kLevers; ++j) {
    price *= std::pow(static_cast<long double>(x.values()[j]),
                      static_cast<long double>(theta.beta[j]));
  }
  price *= std::exp(static_cast<long double>(eta));
  return static_cast<double>(price);
}

double price_one(const ParameterVector& theta, const MultiplierVector& x,
                 double eta) {
  long double log_price = static_cast<long double>(theta.alpha) + eta;
  for (std::size_t j = 0; j < MultiplierVector::kLevers; ++j) {
    log_price += static_cast<long double>(theta.beta[j]) * x.logs()[j];
  }
  const double price = static_cast<double>(std::exp(log_price));
  if (!std::isfinite(price)) {
    std::ostringstream msg;
    msg << "price overflow: exp(" << log_price << ") with alpha=" << theta.alpha
        << " sigma=" << theta.sigma << "; the priors admit absurd worlds";
    throw Error(msg.str());
  }
  assert(price <= 0.0 ||
         std::abs(price_one_multiplicative(theta, x, eta) - price) <=
             1e-9 * price);
  return price;
}

namespace {

// Samples one world: the governed parameter draw, then N (attribute, noise)
// pairs. Lanes fix the draw positions; see RngStream.
void run_world(std::size_t t, const SimulationPlan& plan,
               const PriorSpec& prior, const ConstraintSet& constraints,
               const DealSource& deal_source, OverflowPolicy overflow,
               std::span<double> out, WorldRecord& record) {
  RngStream theta_rng =
      RngStream::for_world(plan.seed, t, RngStream::Lane::kParameters);
  const GovernedDraw draw = sample_governed(prior, constraints, theta_rng);
  record.theta = draw.theta;
  record.rejection_attempts = draw.attempts;

  RngStream attr_rng =
      RngStream::for_world(plan.seed, t, RngStream::Lane::kAttributes);
  RngStream noise_rng =
      RngStream::for_world(plan.seed, t, RngStream::Lane::kNoise);

  const auto n = static_cast<std::size_t>(plan.draws_per_world);
  for (std::size_t i = 0; i < n; ++i) {
    const MultiplierVector x = std::visit(
        [&](const auto& source) -> MultiplierVector {
          using T = std::decay_t<decltype(source)>;
          if constexpr (std::is_same_v<T, MultiplierVector>) {
            return source;
          } else {
            const DealAttributes attrs =
                source.configuration
                    ? sample_conditional(source.mix, *source.configuration,
                                         attr_rng, source.max_class_attempts)
                    : sample_deal(source.mix, attr_rng);
            return map_attributes(attrs, source.node_table, source.formula);
          }
        },
        deal_source);
    const double eta = noise_rng.normal(0.0, record.theta.sigma);
    try {
      out[i] = price_one(record.theta, x, eta);
    } catch (const Error&) {
      if (overflow == OverflowPolicy::kAbort) {
        std::ostringstream msg;
        msg << "world " << t << ": non-finite price (alpha="
            << record.theta.alpha << ", sigma=" << record.theta.sigma << ")";
        throw Error(msg.str());
      }
      record.dropped = true;
      return;
    }
  }
}

}  // namespace

PriceSampleSet simulate(const SimulationPlan& plan, const PriorSpec& prior,
                        const ConstraintSet& constraints,
                        const DealSource& deal_source, int thread_count,
                        OverflowPolicy overflow) {
  plan.validate();
  prior.validate();
  constraints.validate();
  if (const auto* pipeline = std::get_if<PipelineSource>(&deal_source)) {
    pipeline->mix.validate();
  }

  const auto t_count = static_cast<std::size_t>(plan.worlds);
  const auto n = static_cast<std::size_t>(plan.draws_per_world);

  PriceSampleSet result;
  result.plan = plan;
  result.samples.assign(t_count * n, 0.0);
  result.worlds.assign(t_count, WorldRecord{});

  const auto started = std::chrono::steady_clock::now();

  if (thread_count < 1) thread_count = 1;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count), t_count);

  std::exception_ptr failure;
  if (workers <= 1) {
    for (std::size_t t = 0; t < t_count; ++t) {
      run_world(t, plan, prior, constraints, deal_source, overflow,
                std::span<double>(result.samples).subspan(t * n, n),
                result.worlds[t]);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < t_count; t += workers) {
            run_world(t, plan, prior, constraints, deal_source, overflow,
                      std::span<double>(result.samples).subspan(t * n, n),
                      result.worlds[t]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) {
        failure = e;
        break;
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  // Compact away dropped worlds so estimators never see their zeros.
  std::uint64_t total_attempts = 0;
  std::int64_t dropped = 0;
  std::size_t kept = 0;
  for (std::size_t t = 0; t < t_count; ++t) {
    total_attempts += result.worlds[t].rejection_attempts;
    if (result.worlds[t].dropped) {
      ++dropped;
      continue;
    }
    if (kept != t) {
      std::copy_n(result.samples.begin() + static_cast<std::ptrdiff_t>(t * n),
                  n,
                  result.samples.begin() + static_cast<std::ptrdiff_t>(kept * n));
    }
    ++kept;
  }
  if (dropped > 0) {
    result.samples.resize(kept * n);
    std::erase_if(result.worlds, [](const WorldRecord& w) { return w.dropped; });
    if (kept == 0) {
      throw Error("all worlds produced non-finite prices; check the priors");
    }
  }

  const auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  result.telemetry.acceptance_rate =
      static_cast<double>(t_count) / static_cast<double>(total_attempts);
  result.telemetry.worlds_per_second =
      elapsed > 0.0 ? static_cast<double>(t_count) / elapsed : 0.0;
  result.telemetry.dropped_worlds = dropped;
  return result;
}

double Transform::operator()(double p) const {
  switch (kind) {
    case Kind::kIdentity: return p;
    case Kind::kLog: return std::log(p);
    case Kind::kIndicatorAbove: return p > threshold ? 1.0 : 0.0;
  }
  return p;
}

MeanEstimate estimate_mean(std::span<const double> samples,
                           const Transform& h) {
  if (samples.empty()) {
    throw ValidationError("estimate_mean: empty sample set");
  }
  std::vector<double> transformed(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) transformed[i] = h(samples[i]);
  const auto summary = stats::summarize(transformed);
  MeanEstimate out;
  out.value = summary.mean;
  out.standard_error =
      std::sqrt(summary.variance / static_cast<double>(summary.count));
  out.count = summary.count;
  return out;
}

double PriceBands::at(double q) const {
  for (const auto& band : bands) {
    if (band.q == q) return band.price_usd_per_mb;
  }
  throw ValidationError("quantile was not part of the run plan");
}

PriceBands estimate_quantiles(std::span<const double> samples,
                              std::span<const double> quantiles) {
  if (samples.empty()) {
    throw ValidationError("estimate_quantiles: empty sample set");
  }
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) {
      throw ValidationError("estimate_quantiles: q must lie in (0,1)");
    }
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  PriceBands out;
  const auto n = static_cast<double>(sorted.size());
  for (double q : quantiles) {
    // smallest k with empirical CDF k/n >= q
    auto k = static_cast<std::size_t>(std::ceil(q * n));
    if (k < 1) k = 1;
    auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(sorted.begin(), nth, sorted.end());
    out.bands.push_back({q, *nth});
  }
  const MeanEstimate mean = estimate_mean(samples);
  out.mean = mean.value;
  out.mean_standard_error = mean.standard_error;
  out.count = samples.size();
  return out;
}

double semi_analytic_median(const PriorSpec& prior,
                            const ConstraintSet& constraints,
                            const MultiplierVector& x, double min_acceptance) {
  prior.validate();
  if (constraints.restricts_location()) {
    // Probe with the beta/alpha checks only; sigma truncation rescales the
    // noise but cannot move the median of ln P.
    ConstraintSet location_only = constraints;
    location_only.sigma_bounds = Interval{};
    std::erase_if(location_only.predicates, [](const NamedPredicate& p) {
      return p.lhs == ThetaComponent::kSigma &&
             (!p.rhs_component || *p.rhs_component == ThetaComponent::kSigma);
    });
    const double acceptance =
        acceptance_probe(prior, location_only, /*seed=*/0x5EED, 20000);
    if (acceptance < min_acceptance) {
      std::ostringstream msg;
      msg << "semi-analytic median unavailable: alpha/beta constraints truncate "
          << "the prior materially (acceptance ~ " << acceptance << " < "
          << min_acceptance << ")";
      throw ValidationError(msg.str());
    }
  }
  double log_median = std::log(prior.b0);
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    log_median += prior.mu[j] * x.logs()[j];
  }
  return std::exp(log_median);
}

}  // namespace databand
