#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "databand/deal.hpp"
#include "databand/rng.hpp"

namespace databand {

// Per-field samplers. A fixed value consumes no randomness, so degenerate
// templates stay aligned with fixed-deal runs.
struct FixedReal {
  double value = 0.0;
  bool operator==(const FixedReal&) const = default;
};
struct ChoiceReal {
  std::vector<double> values;
  bool operator==(const ChoiceReal&) const = default;
};
struct UniformReal {
  double lo = 0.0, hi = 1.0;
  bool operator==(const UniformReal&) const = default;
};
struct TriangularReal {
  double min = 0.0, mode = 0.5, max = 1.0;
  bool operator==(const TriangularReal&) const = default;
};
using RealSampler = std::variant<FixedReal, ChoiceReal, UniformReal, TriangularReal>;

struct FixedInt {
  int value = 0;
  bool operator==(const FixedInt&) const = default;
};
struct ChoiceInt {
  std::vector<int> values;
  bool operator==(const ChoiceInt&) const = default;
};
struct UniformInt {  // inclusive range
  int lo = 0, hi = 0;
  bool operator==(const UniformInt&) const = default;
};
using IntSampler = std::variant<FixedInt, ChoiceInt, UniformInt>;

struct FixedLabel {
  std::string value;
  bool operator==(const FixedLabel&) const = default;
};
struct ChoiceLabel {
  std::vector<std::string> values;
  bool operator==(const ChoiceLabel&) const = default;
};
using LabelSampler = std::variant<FixedLabel, ChoiceLabel>;

using RightsBundle = std::vector<RightsFactor>;
struct FixedRights {
  RightsBundle bundle;
  bool operator==(const FixedRights&) const = default;
};
struct ChoiceRights {
  std::vector<RightsBundle> bundles;
  bool operator==(const ChoiceRights&) const = default;
};
using RightsSampler = std::variant<FixedRights, ChoiceRights>;

// Attribute template: one sampler per DealAttributes field. Fields are drawn
// independently, in declaration order.
struct DealTemplate {
  LabelSampler technology_node = FixedLabel{};
  IntSampler process_count = FixedInt{};
  RealSampler quality_score = FixedReal{};
  RealSampler completeness_score = FixedReal{};
  RealSampler age_months = FixedReal{};
  RealSampler utility_value_usd = FixedReal{};
  RightsSampler rights_factors = FixedRights{};
  RealSampler volume_mb = FixedReal{1.0};

  static DealTemplate fixed(const DealAttributes& attrs);

  DealAttributes sample(RngStream& rng) const;
  void validate() const;

  bool operator==(const DealTemplate&) const = default;
};

// Finite mixture over deal templates: how often each deal type shows up in
// the pipeline. Weights are normalized on validation.
struct DealMix {
  struct Component {
    double weight = 1.0;
    DealTemplate deal;
    bool operator==(const Component&) const = default;
  };
  std::vector<Component> components;

  void validate() const;

  // Component weights rescaled to sum to 1.
  std::vector<double> normalized_weights() const;

  bool operator==(const DealMix&) const = default;
};

// Declarative deal-family predicate: a conjunction of field comparisons.
struct AttributeCondition {
  enum class Field {
    kTechnologyNode,
    kProcessCount,
    kQualityScore,
    kCompletenessScore,
    kAgeMonths,
    kUtilityValueUsd,
    kVolumeMb,
  };
  enum class Op { kEq, kNe, kLt, kLe, kGt, kGe };

  Field field = Field::kTechnologyNode;
  Op op = Op::kEq;
  double number = 0.0;     // numeric fields
  std::string label;       // technology node comparisons

  bool holds(const DealAttributes& attrs) const;

  bool operator==(const AttributeCondition&) const = default;
};

AttributeCondition::Field attribute_field_from_name(const std::string& name);
std::string attribute_field_name(AttributeCondition::Field f);

struct ConfigurationClass {
  std::string label;
  std::vector<AttributeCondition> conditions;  // conjunction

  bool matches(const DealAttributes& attrs) const;

  bool operator==(const ConfigurationClass&) const = default;
};

// One draw from the mix: pick a component by weight, then sample each field.
DealAttributes sample_deal(const DealMix& mix, RngStream& rng);

inline constexpr std::uint64_t kDefaultMaxClassAttempts = 100000;

// Rejection sampling of A | A in C; exact for the same reason governed
// parameter sampling is. Throws SamplingConflictError when the class looks
// empty under the mix.
DealAttributes sample_conditional(
    const DealMix& mix, const ConfigurationClass& cls, RngStream& rng,
    std::uint64_t max_attempts = kDefaultMaxClassAttempts);

}  // namespace databand
