#include "databand/deal.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "databand/errors.hpp"

namespace databand {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

// "3nm" -> 3.0, "0.8nm" -> 0.8; nullopt for labels that do not follow the
// <number>nm convention.
std::optional<double> parse_node_size(const std::string& label) {
  if (label.size() < 3 || label.substr(label.size() - 2) != "nm") {
    return std::nullopt;
  }
  const std::string head = label.substr(0, label.size() - 2);
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(head, &consumed);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (consumed != head.size() || value <= 0.0) return std::nullopt;
  return value;
}

}  // namespace

void DealAttributes::validate() const {
  require(process_count >= 0, "deal: process_count must be >= 0");
  require(quality_score >= 0.0 && quality_score <= 1.0,
          "deal: quality_score must lie in [0,1]");
  require(completeness_score >= 0.0 && completeness_score <= 1.0,
          "deal: completeness_score must lie in [0,1]");
  require(std::isfinite(age_months) && age_months >= 0.0,
          "deal: age_months must be >= 0");
  require(std::isfinite(utility_value_usd) && utility_value_usd >= 0.0,
          "deal: utility_value_usd must be >= 0");
  for (const auto& rf : rights_factors) {
    if (!(std::isfinite(rf.factor) && rf.factor > 0.0)) {
      throw ValidationError("deal: rights factor '" + rf.label +
                            "' must be > 0");
    }
  }
  require(std::isfinite(volume_mb) && volume_mb > 0.0,
          "deal: volume_mb must be > 0");
}

NodeTable::NodeTable(std::map<std::string, double> entries)
    : entries_(std::move(entries)) {
  for (const auto& [label, mult] : entries_) {
    require(std::isfinite(mult) && mult > 0.0,
            "node table: multiplier for '" + label + "' must be > 0");
  }
}

NodeTable NodeTable::semiconductor_preset() {
  return NodeTable({{"10nm", 1.25},
                    {"7nm", 1.35},
                    {"5nm", 1.50},
                    {"3nm", 1.65},
                    {"2nm", 1.80}});
}

void NodeTable::insert(const std::string& label, double multiplier) {
  require(std::isfinite(multiplier) && multiplier > 0.0,
          "node table: multiplier for '" + label + "' must be > 0");
  entries_[label] = multiplier;
}

bool NodeTable::contains(const std::string& label) const {
  return entries_.count(label) != 0;
}

double NodeTable::multiplier(const std::string& label) const {
  auto it = entries_.find(label);
  if (it == entries_.end()) {
    throw ValidationError("technology_node: unknown node label '" + label +
                          "' (not in the active node table)");
  }
  return it->second;
}

std::vector<std::pair<std::string, std::string>>
NodeTable::monotonicity_violations() const {
  std::vector<std::pair<std::string, double>> sized;
  for (const auto& [label, mult] : entries_) {
    if (auto size = parse_node_size(label)) {
      sized.emplace_back(label, *size);
    }
  }
  std::vector<std::pair<std::string, std::string>> violations;
  for (std::size_t i = 0; i < sized.size(); ++i) {
    for (std::size_t j = 0; j < sized.size(); ++j) {
      // smaller node must price at least as high
      if (sized[i].second < sized[j].second &&
          entries_.at(sized[i].first) < entries_.at(sized[j].first)) {
        violations.emplace_back(sized[i].first, sized[j].first);
      }
    }
  }
  return violations;
}

MultiplierVector::MultiplierVector(double tn, double cov, double qf,
                                   double util, double rights)
    : values_{tn, cov, qf, util, rights} {
  for (std::size_t j = 0; j < kLevers; ++j) {
    if (!(std::isfinite(values_[j]) && values_[j] > 0.0)) {
      std::ostringstream msg;
      msg << "multiplier x_" << kLeverNames[j] << " = " << values_[j]
          << " is outside (0, inf)";
      throw ValidationError(msg.str());
    }
    logs_[j] = std::log(values_[j]);
    if (!std::isfinite(logs_[j])) {
      throw ValidationError(std::string("multiplier x_") + kLeverNames[j] +
                            " has a non-finite log");
    }
  }
}

double node_multiplier(const DealAttributes& attrs, const NodeTable& table) {
  return table.multiplier(attrs.technology_node);
}

double coverage_multiplier(int process_count, double scale) {
  require(process_count >= 0, "coverage_multiplier: process count must be >= 0");
  return 1.0 + scale * std::log1p(static_cast<double>(process_count));
}

double quality_freshness_multiplier(double quality, double completeness,
                                    double age_months,
                                    const FormulaParams& params) {
  require(quality >= 0.0 && quality <= 1.0,
          "quality_freshness_multiplier: quality must lie in [0,1]");
  require(completeness >= 0.0 && completeness <= 1.0,
          "quality_freshness_multiplier: completeness must lie in [0,1]");
  require(age_months >= 0.0,
          "quality_freshness_multiplier: age_months must be >= 0");
  const double value = params.qf_base + params.qf_quality_weight * quality +
                       params.qf_completeness_weight * completeness +
                       params.qf_age_weight *
                           (1.0 - age_months / params.qf_horizon_months);
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << "quality/freshness multiplier is " << value
        << " (<= 0); adjust weights or the age horizon";
    throw ValidationError(msg.str());
  }
  return value;
}

double utility_multiplier(double utility_value_usd,
                          const FormulaParams& params) {
  require(utility_value_usd >= 0.0,
          "utility_multiplier: utility value must be >= 0");
  const double arg = 1.0 + utility_value_usd / params.utility_denom_usd;
  return 1.0 + params.utility_scale * std::log(arg) /
                   std::log(params.utility_log_base);
}

double rights_multiplier(std::span<const RightsFactor> factors) {
  double product = 1.0;  // empty list is neutral
  for (const auto& rf : factors) {
    if (!(std::isfinite(rf.factor) && rf.factor > 0.0)) {
      throw ValidationError("rights_multiplier: factor '" + rf.label +
                            "' must be > 0");
    }
    product *= rf.factor;
  }
  return product;
}

MultiplierVector map_attributes(const DealAttributes& attrs,
                                const NodeTable& table,
                                const FormulaParams& params) {
  attrs.validate();
  return MultiplierVector(
      node_multiplier(attrs, table),
      coverage_multiplier(attrs.process_count, params.coverage_scale),
      quality_freshness_multiplier(attrs.quality_score,
                                   attrs.completeness_score, attrs.age_months,
                                   params),
      utility_multiplier(attrs.utility_value_usd, params),
      rights_multiplier(attrs.rights_factors));
}

double volume_to_mb(double value, const std::string& unit) {
  require(std::isfinite(value) && value > 0.0, "volume must be > 0");
  if (unit == "MB") return value;
  if (unit == "GB") return value * 1024.0;
  if (unit == "TB") return value * 1024.0 * 1024.0;
  if (unit == "PB") return value * 1024.0 * 1024.0 * 1024.0;
  throw ValidationError("volume unit must be one of MB/GB/TB/PB, got '" +
                        unit + "'");
}

}  // namespace databand
