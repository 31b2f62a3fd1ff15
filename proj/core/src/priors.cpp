#include "databand/priors.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "databand/errors.hpp"

namespace databand {
namespace {

const char* kBetaNames[kLeverCount] = {"beta_tn", "beta_cov", "beta_qf",
                                       "beta_util", "beta_rights"};

std::string interval_label(const std::string& component, const Interval& b) {
  std::ostringstream out;
  out << component << " in (" << b.lo << ", " << b.hi << ")";
  return out.str();
}

}  // namespace

void ParameterVector::validate() const {
  if (!std::isfinite(alpha)) throw ValidationError("theta: alpha must be finite");
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    if (!std::isfinite(beta[j])) {
      throw ValidationError(std::string("theta: ") + kBetaNames[j] +
                            " must be finite");
    }
  }
  if (!(std::isfinite(sigma) && sigma >= 0.0)) {
    throw ValidationError("theta: sigma must be >= 0");
  }
}

void PriorSpec::validate() const {
  if (!(std::isfinite(b0) && b0 > 0.0)) {
    throw ValidationError("prior: b0 must be > 0");
  }
  if (!(std::isfinite(s_alpha) && s_alpha >= 0.0)) {
    throw ValidationError("prior: s_alpha must be >= 0");
  }
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    if (!std::isfinite(mu[j])) {
      throw ValidationError("prior: mu components must be finite");
    }
    if (!(std::isfinite(s[j]) && s[j] >= 0.0)) {
      throw ValidationError("prior: s components must be >= 0");
    }
  }
  // s_sigma == 0 selects the degenerate point mode (sigma identically 0).
  if (!(std::isfinite(s_sigma) && s_sigma >= 0.0)) {
    throw ValidationError("prior: s_sigma must be >= 0");
  }
}

bool Interval::bounded() const {
  return lo != -std::numeric_limits<double>::infinity() ||
         hi != std::numeric_limits<double>::infinity();
}

void Interval::validate(const std::string& what) const {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    throw ValidationError(what + ": bounds must satisfy lo < hi");
  }
}

ThetaComponent theta_component_from_name(const std::string& name) {
  if (name == "alpha") return ThetaComponent::kAlpha;
  if (name == "beta_tn") return ThetaComponent::kBetaTn;
  if (name == "beta_cov") return ThetaComponent::kBetaCov;
  if (name == "beta_qf") return ThetaComponent::kBetaQf;
  if (name == "beta_util") return ThetaComponent::kBetaUtil;
  if (name == "beta_rights") return ThetaComponent::kBetaRights;
  if (name == "sigma") return ThetaComponent::kSigma;
  throw ValidationError("unknown parameter component '" + name + "'");
}

std::string theta_component_name(ThetaComponent c) {
  switch (c) {
    case ThetaComponent::kAlpha: return "alpha";
    case ThetaComponent::kBetaTn: return "beta_tn";
    case ThetaComponent::kBetaCov: return "beta_cov";
    case ThetaComponent::kBetaQf: return "beta_qf";
    case ThetaComponent::kBetaUtil: return "beta_util";
    case ThetaComponent::kBetaRights: return "beta_rights";
    case ThetaComponent::kSigma: return "sigma";
  }
  return "?";
}

double theta_component_value(const ParameterVector& theta, ThetaComponent c) {
  switch (c) {
    case ThetaComponent::kAlpha: return theta.alpha;
    case ThetaComponent::kBetaTn: return theta.beta[0];
    case ThetaComponent::kBetaCov: return theta.beta[1];
    case ThetaComponent::kBetaQf: return theta.beta[2];
    case ThetaComponent::kBetaUtil: return theta.beta[3];
    case ThetaComponent::kBetaRights: return theta.beta[4];
    case ThetaComponent::kSigma: return theta.sigma;
  }
  return 0.0;
}

bool NamedPredicate::holds(const ParameterVector& theta) const {
  const double lhs_value = theta_component_value(theta, lhs);
  const double rhs =
      rhs_component ? theta_component_value(theta, *rhs_component) : rhs_value;
  switch (op) {
    case Op::kLt: return lhs_value < rhs;
    case Op::kLe: return lhs_value <= rhs;
    case Op::kGt: return lhs_value > rhs;
    case Op::kGe: return lhs_value >= rhs;
  }
  return false;
}

void ConstraintSet::validate() const {
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    beta_bounds[j].validate(kBetaNames[j]);
  }
  sigma_bounds.validate("sigma");
  for (const auto& p : predicates) {
    if (p.label.empty()) {
      throw ValidationError("constraint predicates must carry a label");
    }
    if (!p.rhs_component && !std::isfinite(p.rhs_value)) {
      throw ValidationError("predicate '" + p.label +
                            "': rhs bound must be finite");
    }
  }
}

std::vector<std::string> ConstraintSet::check_labels() const {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    labels.push_back(interval_label(kBetaNames[j], beta_bounds[j]));
  }
  labels.push_back(interval_label("sigma", sigma_bounds));
  for (const auto& p : predicates) labels.push_back(p.label);
  return labels;
}

bool ConstraintSet::restricts_anything() const {
  for (const auto& b : beta_bounds) {
    if (b.bounded()) return true;
  }
  return sigma_bounds.bounded() || !predicates.empty();
}

bool ConstraintSet::restricts_location() const {
  for (const auto& b : beta_bounds) {
    if (b.bounded()) return true;
  }
  for (const auto& p : predicates) {
    if (p.lhs != ThetaComponent::kSigma) return true;
    if (p.rhs_component && *p.rhs_component != ThetaComponent::kSigma) {
      return true;
    }
  }
  return false;
}

bool admissible(const ParameterVector& theta,
                const ConstraintSet& constraints) {
  return !first_violation(theta, constraints).has_value();
}

std::optional<std::size_t> first_violation(const ParameterVector& theta,
                                           const ConstraintSet& constraints) {
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    if (!constraints.beta_bounds[j].contains(theta.beta[j])) return j;
  }
  if (!constraints.sigma_bounds.contains(theta.sigma)) return kLeverCount;
  for (std::size_t k = 0; k < constraints.predicates.size(); ++k) {
    if (!constraints.predicates[k].holds(theta)) return kLeverCount + 1 + k;
  }
  return std::nullopt;
}

ParameterVector draw_raw(const PriorSpec& prior, RngStream& rng) {
  ParameterVector theta;
  theta.alpha = rng.normal(std::log(prior.b0), prior.s_alpha);
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    theta.beta[j] = rng.normal(prior.mu[j], prior.s[j]);
  }
  theta.sigma = rng.half_normal(prior.s_sigma);
  return theta;
}

GovernedDraw sample_governed(const PriorSpec& prior,
                             const ConstraintSet& constraints, RngStream& rng,
                             std::uint64_t max_attempts) {
  if (max_attempts < 1) {
    throw ValidationError("sample_governed: max_attempts must be >= 1");
  }
  std::vector<std::size_t> violation_counts(constraints.check_labels().size(),
                                            0);
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const ParameterVector theta = draw_raw(prior, rng);
    const auto violated = first_violation(theta, constraints);
    if (!violated) {
      assert(admissible(theta, constraints));
      return GovernedDraw{theta, attempt};
    }
    ++violation_counts[*violated];
  }

  const auto labels = constraints.check_labels();
  std::size_t worst = 0;
  for (std::size_t k = 1; k < violation_counts.size(); ++k) {
    if (violation_counts[k] > violation_counts[worst]) worst = k;
  }
  std::ostringstream msg;
  msg << "prior-constraint conflict: no admissible draw in " << max_attempts
      << " attempts (acceptance < " << 1.0 / static_cast<double>(max_attempts)
      << "); most violated: " << labels[worst];
  throw SamplingConflictError(msg.str(),
                              1.0 / static_cast<double>(max_attempts),
                              labels[worst]);
}

double acceptance_probe(const PriorSpec& prior,
                        const ConstraintSet& constraints, std::uint64_t seed,
                        std::size_t draws) {
  RngStream rng = RngStream::for_world(seed, 0, RngStream::Lane::kProbe);
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    if (admissible(draw_raw(prior, rng), constraints)) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(draws);
}

}  // namespace databand
