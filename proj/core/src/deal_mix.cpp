#include "databand/deal_mix.hpp"

#include <cmath>
#include <sstream>

#include "databand/errors.hpp"

namespace databand {
namespace {

double sample_real(const RealSampler& sampler, RngStream& rng) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedReal>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, ChoiceReal>) {
          return s.values[rng.uniform_below(s.values.size())];
        } else if constexpr (std::is_same_v<T, UniformReal>) {
          return rng.uniform(s.lo, s.hi);
        } else {
          return rng.triangular(s.min, s.mode, s.max);
        }
      },
      sampler);
}

int sample_int(const IntSampler& sampler, RngStream& rng) {
  return std::visit(
      [&](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedInt>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, ChoiceInt>) {
          return s.values[rng.uniform_below(s.values.size())];
        } else {
          return s.lo + static_cast<int>(rng.uniform_below(
                            static_cast<std::uint64_t>(s.hi - s.lo) + 1));
        }
      },
      sampler);
}

std::string sample_label(const LabelSampler& sampler, RngStream& rng) {
  return std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedLabel>) {
          return s.value;
        } else {
          return s.values[rng.uniform_below(s.values.size())];
        }
      },
      sampler);
}

RightsBundle sample_rights(const RightsSampler& sampler, RngStream& rng) {
  return std::visit(
      [&](const auto& s) -> RightsBundle {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedRights>) {
          return s.bundle;
        } else {
          return s.bundles[rng.uniform_below(s.bundles.size())];
        }
      },
      sampler);
}

void check_real(const RealSampler& sampler, const std::string& field) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ChoiceReal>) {
          if (s.values.empty()) {
            throw ValidationError(field + ": choice sampler needs values");
          }
        } else if constexpr (std::is_same_v<T, UniformReal>) {
          if (!(s.lo < s.hi)) {
            throw ValidationError(field + ": uniform sampler needs lo < hi");
          }
        } else if constexpr (std::is_same_v<T, TriangularReal>) {
          if (!(s.min <= s.mode && s.mode <= s.max && s.min < s.max)) {
            throw ValidationError(field +
                                  ": triangular sampler needs min <= mode <= max");
          }
        }
      },
      sampler);
}

}  // namespace

DealTemplate DealTemplate::fixed(const DealAttributes& attrs) {
  DealTemplate t;
  t.technology_node = FixedLabel{attrs.technology_node};
  t.process_count = FixedInt{attrs.process_count};
  t.quality_score = FixedReal{attrs.quality_score};
  t.completeness_score = FixedReal{attrs.completeness_score};
  t.age_months = FixedReal{attrs.age_months};
  t.utility_value_usd = FixedReal{attrs.utility_value_usd};
  t.rights_factors = FixedRights{attrs.rights_factors};
  t.volume_mb = FixedReal{attrs.volume_mb};
  return t;
}

DealAttributes DealTemplate::sample(RngStream& rng) const {
  DealAttributes attrs;
  attrs.technology_node = sample_label(technology_node, rng);
  attrs.process_count = sample_int(process_count, rng);
  attrs.quality_score = sample_real(quality_score, rng);
  attrs.completeness_score = sample_real(completeness_score, rng);
  attrs.age_months = sample_real(age_months, rng);
  attrs.utility_value_usd = sample_real(utility_value_usd, rng);
  attrs.rights_factors = sample_rights(rights_factors, rng);
  attrs.volume_mb = sample_real(volume_mb, rng);
  return attrs;
}

void DealTemplate::validate() const {
  if (const auto* c = std::get_if<ChoiceLabel>(&technology_node)) {
    if (c->values.empty()) {
      throw ValidationError("technology_node: choice sampler needs values");
    }
  }
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedInt>) {
          if (s.value < 0) throw ValidationError("process_count must be >= 0");
        } else if constexpr (std::is_same_v<T, ChoiceInt>) {
          if (s.values.empty()) {
            throw ValidationError("process_count: choice sampler needs values");
          }
          for (int v : s.values) {
            if (v < 0) throw ValidationError("process_count must be >= 0");
          }
        } else {
          if (s.lo < 0 || s.hi < s.lo) {
            throw ValidationError("process_count: need 0 <= lo <= hi");
          }
        }
      },
      process_count);
  check_real(quality_score, "quality_score");
  check_real(completeness_score, "completeness_score");
  check_real(age_months, "age_months");
  check_real(utility_value_usd, "utility_value_usd");
  check_real(volume_mb, "volume_mb");
  if (const auto* c = std::get_if<ChoiceRights>(&rights_factors)) {
    if (c->bundles.empty()) {
      throw ValidationError("rights_factors: choice sampler needs bundles");
    }
  }
}

void DealMix::validate() const {
  if (components.empty()) {
    throw ValidationError("deal mix needs at least one component");
  }
  double total = 0.0;
  for (const auto& c : components) {
    if (!(std::isfinite(c.weight) && c.weight > 0.0)) {
      throw ValidationError("deal mix weights must be > 0");
    }
    total += c.weight;
    c.deal.validate();
  }
  if (!(total > 0.0)) throw ValidationError("deal mix weights must sum > 0");
}

std::vector<double> DealMix::normalized_weights() const {
  double total = 0.0;
  for (const auto& c : components) total += c.weight;
  std::vector<double> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.weight / total);
  return out;
}

bool AttributeCondition::holds(const DealAttributes& attrs) const {
  if (field == Field::kTechnologyNode) {
    switch (op) {
      case Op::kEq: return attrs.technology_node == label;
      case Op::kNe: return attrs.technology_node != label;
      default:
        throw ValidationError(
            "configuration class: technology_node supports only == and !=");
    }
  }
  double value = 0.0;
  switch (field) {
    case Field::kProcessCount: value = attrs.process_count; break;
    case Field::kQualityScore: value = attrs.quality_score; break;
    case Field::kCompletenessScore: value = attrs.completeness_score; break;
    case Field::kAgeMonths: value = attrs.age_months; break;
    case Field::kUtilityValueUsd: value = attrs.utility_value_usd; break;
    case Field::kVolumeMb: value = attrs.volume_mb; break;
    case Field::kTechnologyNode: break;  // handled above
  }
  switch (op) {
    case Op::kEq: return value == number;
    case Op::kNe: return value != number;
    case Op::kLt: return value < number;
    case Op::kLe: return value <= number;
    case Op::kGt: return value > number;
    case Op::kGe: return value >= number;
  }
  return false;
}

AttributeCondition::Field attribute_field_from_name(const std::string& name) {
  using F = AttributeCondition::Field;
  if (name == "technology_node") return F::kTechnologyNode;
  if (name == "process_count") return F::kProcessCount;
  if (name == "quality_score") return F::kQualityScore;
  if (name == "completeness_score") return F::kCompletenessScore;
  if (name == "age_months") return F::kAgeMonths;
  if (name == "utility_value_usd") return F::kUtilityValueUsd;
  if (name == "volume_mb") return F::kVolumeMb;
  throw ValidationError("unknown attribute field '" + name + "'");
}

std::string attribute_field_name(AttributeCondition::Field f) {
  using F = AttributeCondition::Field;
  switch (f) {
    case F::kTechnologyNode: return "technology_node";
    case F::kProcessCount: return "process_count";
    case F::kQualityScore: return "quality_score";
    case F::kCompletenessScore: return "completeness_score";
    case F::kAgeMonths: return "age_months";
    case F::kUtilityValueUsd: return "utility_value_usd";
    case F::kVolumeMb: return "volume_mb";
  }
  return "?";
}

bool ConfigurationClass::matches(const DealAttributes& attrs) const {
  for (const auto& c : conditions) {
    if (!c.holds(attrs)) return false;
  }
  return true;
}

DealAttributes sample_deal(const DealMix& mix, RngStream& rng) {
  std::size_t index = 0;
  if (mix.components.size() > 1) {
    const auto weights = mix.normalized_weights();
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      cumulative += weights[k];
      if (u < cumulative || k + 1 == weights.size()) {
        index = k;
        break;
      }
    }
  }
  return mix.components[index].deal.sample(rng);
}

DealAttributes sample_conditional(const DealMix& mix,
                                  const ConfigurationClass& cls,
                                  RngStream& rng,
                                  std::uint64_t max_attempts) {
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    DealAttributes attrs = sample_deal(mix, rng);
    if (cls.matches(attrs)) return attrs;
  }
  std::ostringstream msg;
  msg << "configuration class '" << cls.label << "' looks empty: no hit in "
      << max_attempts << " samples from the mix (hit rate < "
      << 1.0 / static_cast<double>(max_attempts) << ")";
  throw SamplingConflictError(msg.str(),
                              1.0 / static_cast<double>(max_attempts),
                              cls.label);
}

}  // namespace databand
