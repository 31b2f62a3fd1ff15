#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "databand/anchor.hpp"
#include "databand/calibration.hpp"
#include "databand/deal.hpp"
#include "databand/deal_mix.hpp"
#include "databand/engine.hpp"
#include "databand/priors.hpp"

namespace databand {

// Where the baseline anchor comes from: an explicit per-MB price, or a year
// looked up in the anchor dataset (builtin unless a file is given).
struct AnchorChoice {
  std::optional<double> explicit_b0;
  std::optional<int> year;
  std::optional<std::string> dataset_path;

  bool operator==(const AnchorChoice&) const = default;
};

struct PipelineSection {
  DealMix mix;
  std::vector<ConfigurationClass> classes;

  bool operator==(const PipelineSection&) const = default;
};

// Everything a run needs, parsed from one scenario file.
struct Scenario {
  std::string name;
  std::string currency = "USD";
  std::optional<int> year;

  AnchorChoice anchor;
  std::string b0_provenance;  // filled at parse/resolve time

  DealAttributes deal;
  NodeTable node_table;
  bool enforce_node_monotonicity = true;
  FormulaParams formula;

  PriorSpec prior;  // b0 resolved from the anchor section
  ConstraintSet constraints;
  SimulationPlan plan;

  std::optional<PipelineSection> pipeline;

  // Cross-section validation; throws ValidationError naming the section.
  void validate() const;

  bool operator==(const Scenario& other) const;
};

// Parses a scenario document (JSON, comments allowed) and resolves the
// anchor. Relative dataset paths resolve against base_dir.
Scenario parse_scenario(const std::string& text,
                        const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);

// Canonical serialization; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

// Observed-deals file for the calibrate flow (same dialect as scenarios).
std::vector<ObservedDeal> load_observed_deals(
    const std::filesystem::path& path);

}  // namespace databand
