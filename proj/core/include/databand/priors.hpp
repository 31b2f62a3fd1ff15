#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "databand/rng.hpp"

namespace databand {

inline constexpr std::size_t kLeverCount = 5;

// One "pricing world": log-baseline, the five elasticities, residual scale.
struct ParameterVector {
  double alpha = 0.0;
  std::array<double, kLeverCount> beta{};
  double sigma = 0.0;  // 0 only in the degenerate point-estimate mode

  void validate() const;

  bool operator==(const ParameterVector&) const = default;
};

// Hyperparameters of the expert prior.
//   alpha  ~ Normal(ln b0, s_alpha^2)
//   beta_j ~ Normal(mu_j, s_j^2), independently
//   sigma  ~ HalfNormal(s_sigma)   (|N(0, s_sigma^2)|, scale convention)
// s_sigma == 0 is the degenerate point mode: sigma is identically 0.
struct PriorSpec {
  double b0 = 1.0;
  double s_alpha = 0.0;
  std::array<double, kLeverCount> mu{};
  std::array<double, kLeverCount> s{};
  double s_sigma = 0.0;

  void validate() const;

  bool operator==(const PriorSpec&) const = default;
};

// Open interval; defaults are unbounded.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v > lo && v < hi; }
  bool bounded() const;
  void validate(const std::string& what) const;

  bool operator==(const Interval&) const = default;
};

// Names of the components a declarative predicate may reference.
enum class ThetaComponent {
  kAlpha,
  kBetaTn,
  kBetaCov,
  kBetaQf,
  kBetaUtil,
  kBetaRights,
  kSigma,
};

ThetaComponent theta_component_from_name(const std::string& name);
std::string theta_component_name(ThetaComponent c);
double theta_component_value(const ParameterVector& theta, ThetaComponent c);

// One named business rule: <lhs component> <op> <number or component>.
// Covers monotone orderings (beta_util > beta_cov), premium caps
// (beta_tn < 2) and anchor inequalities (alpha > -12).
struct NamedPredicate {
  enum class Op { kLt, kLe, kGt, kGe };

  std::string label;
  ThetaComponent lhs = ThetaComponent::kAlpha;
  Op op = Op::kLt;
  double rhs_value = 0.0;
  std::optional<ThetaComponent> rhs_component;

  bool holds(const ParameterVector& theta) const;

  bool operator==(const NamedPredicate&) const = default;
};

// Admissible region Theta_C: open bounds per component plus named predicates.
struct ConstraintSet {
  std::array<Interval, kLeverCount> beta_bounds{};
  Interval sigma_bounds{};
  std::vector<NamedPredicate> predicates;

  void validate() const;

  // Human-readable labels of every check, in evaluation order.
  std::vector<std::string> check_labels() const;

  // True iff any beta bound, sigma bound or predicate actually restricts.
  bool restricts_anything() const;

  // True iff some restriction involves alpha or a beta component (the ones
  // that can shift the location of ln P). Sigma-only truncation cannot.
  bool restricts_location() const;

  bool operator==(const ConstraintSet&) const = default;
};

bool admissible(const ParameterVector& theta, const ConstraintSet& constraints);

// Index (into check_labels order) of the first violated check, or nullopt.
std::optional<std::size_t> first_violation(const ParameterVector& theta,
                                           const ConstraintSet& constraints);

// Unconstrained prior draw. Consumes exactly 7 uniforms from the stream, in
// the order alpha, beta_1..beta_5, sigma.
ParameterVector draw_raw(const PriorSpec& prior, RngStream& rng);

struct GovernedDraw {
  ParameterVector theta;
  std::uint64_t attempts = 1;  // total raw draws consumed, accepted one included
};

inline constexpr std::uint64_t kDefaultMaxRejectionAttempts = 10000;

// Rejection sampling from the constraint-governed prior; exact (accepted
// draws are i.i.d. from the conditional law). Throws SamplingConflictError
// after max_attempts consecutive rejections, reporting the empirical
// acceptance estimate and the most frequently violated check.
GovernedDraw sample_governed(
    const PriorSpec& prior, const ConstraintSet& constraints, RngStream& rng,
    std::uint64_t max_attempts = kDefaultMaxRejectionAttempts);

// Acceptance-rate probe: fraction of `draws` raw draws that land in the
// admissible region. Deterministic in `seed`; used by validation and by the
// semi-analytic median guard.
double acceptance_probe(const PriorSpec& prior, const ConstraintSet& constraints,
                        std::uint64_t seed, std::size_t draws = 1000);

}  // namespace databand
