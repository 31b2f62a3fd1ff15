#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace databand {

// One named legal/licensing lever, e.g. ("derivatives", 1.3).
struct RightsFactor {
  std::string label;
  double factor = 1.0;

  bool operator==(const RightsFactor&) const = default;
};

// Raw, human-meaningful description of one transaction.
struct DealAttributes {
  std::string technology_node;
  int process_count = 0;             // covered processes of buyer interest
  double quality_score = 0.0;        // in [0,1]
  double completeness_score = 0.0;   // in [0,1]
  double age_months = 0.0;
  double utility_value_usd = 0.0;    // buyer's estimated profit from purchase
  std::vector<RightsFactor> rights_factors;
  double volume_mb = 1.0;            // deliverable size

  // Throws ValidationError on any out-of-range field. Node membership is
  // checked against the active NodeTable separately.
  void validate() const;

  bool operator==(const DealAttributes&) const = default;
};

// Map from technology-node label to its price multiplier.
class NodeTable {
 public:
  NodeTable() = default;
  explicit NodeTable(std::map<std::string, double> entries);

  // The worked-example semiconductor table (10nm..2nm).
  static NodeTable semiconductor_preset();

  void insert(const std::string& label, double multiplier);
  bool contains(const std::string& label) const;
  double multiplier(const std::string& label) const;  // throws on unknown label

  // Pairs of labels where a smaller node does not get a larger multiplier.
  // Only labels of the form "<number>nm" participate; others are skipped.
  std::vector<std::pair<std::string, std::string>> monotonicity_violations()
      const;

  const std::map<std::string, double>& entries() const { return entries_; }

  bool operator==(const NodeTable&) const = default;

 private:
  std::map<std::string, double> entries_;
};

// Tunables of the attribute-to-multiplier formulas. Defaults reproduce the
// worked example; scenarios may override any of them.
struct FormulaParams {
  double coverage_scale = 0.15;

  double qf_base = 0.85;
  double qf_quality_weight = 0.2;
  double qf_completeness_weight = 0.1;
  double qf_age_weight = 0.1;
  double qf_horizon_months = 24.0;

  double utility_scale = 0.4;
  double utility_denom_usd = 1e6;
  double utility_log_base = 10.0;

  bool operator==(const FormulaParams&) const = default;
};

// The five positive price levers, with their logs cached.
class MultiplierVector {
 public:
  static constexpr std::size_t kLevers = 5;
  static constexpr std::array<const char*, kLevers> kLeverNames = {
      "tn", "cov", "qf", "util", "rights"};

  // Validates positivity and finiteness of every component and its log.
  MultiplierVector(double tn, double cov, double qf, double util,
                   double rights);

  double tn() const { return values_[0]; }
  double coverage() const { return values_[1]; }
  double quality_freshness() const { return values_[2]; }
  double utility() const { return values_[3]; }
  double rights() const { return values_[4]; }

  const std::array<double, kLevers>& values() const { return values_; }
  const std::array<double, kLevers>& logs() const { return logs_; }

  bool operator==(const MultiplierVector&) const = default;

 private:
  std::array<double, kLevers> values_;
  std::array<double, kLevers> logs_;
};

double node_multiplier(const DealAttributes& attrs, const NodeTable& table);

double coverage_multiplier(int process_count, double scale = 0.15);

double quality_freshness_multiplier(double quality, double completeness,
                                    double age_months,
                                    const FormulaParams& params = {});

double utility_multiplier(double utility_value_usd,
                          const FormulaParams& params = {});

double rights_multiplier(std::span<const RightsFactor> factors);

// Composes the five lever formulas; pure and deterministic.
MultiplierVector map_attributes(const DealAttributes& attrs,
                                const NodeTable& table,
                                const FormulaParams& params = {});

// Binary-prefix volume conversions ("PB", "TB", "GB", "MB").
double volume_to_mb(double value, const std::string& unit);

}  // namespace databand
