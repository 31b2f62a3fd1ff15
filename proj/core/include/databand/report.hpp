#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "databand/calibration.hpp"
#include "databand/engine.hpp"
#include "databand/scenario.hpp"

namespace databand {

struct ClassReport {
  std::string label;
  PriceBands bands;
};

// Audit report: echoes every resolved input next to the estimates so each
// reported number can be traced back (and recomputed) from the echo.
struct RunReport {
  std::string scenario_name;
  std::string artifact_version;
  std::string mode;  // "price" or "pipeline"
  std::uint64_t seed = 0;

  double b0 = 0.0;
  std::string b0_provenance;
  DealAttributes attributes;       // single-deal echo
  std::optional<MultiplierVector> multipliers;  // absent in pipeline mode
  PriorSpec prior;
  ConstraintSet constraints;
  SimulationPlan plan;

  double volume_mb = 0.0;
  PriceBands bands;                // USD/MB
  std::vector<ClassReport> class_reports;

  RunTelemetry telemetry;
  double elapsed_seconds = 0.0;
  std::optional<std::string> generated_at;  // UTC, suppressible
};

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  bool keep_samples = false;
  bool with_timestamp = true;
};

struct RunOutput {
  RunReport report;
  std::optional<PriceSampleSet> samples;
};

// Single-deal pricing: map attributes, simulate, estimate bands.
RunOutput run_price(const Scenario& scenario, const RunOptions& options = {});

// Pipeline pricing: per-draw attribute sampling, plus conditional bands for
// every declared configuration class.
RunOutput run_pipeline(const Scenario& scenario, const RunOptions& options = {});

// Dry run: validation, derived multipliers, acceptance probe, semi-analytic
// median. No full simulation.
std::string run_validate(const Scenario& scenario,
                         std::optional<std::uint64_t> seed_override = {});

std::string render_text(const RunReport& report);
std::string render_json(const RunReport& report);

// Raw sample dump: world, draw, price, then the world's parameter draw.
void write_samples_csv(std::ostream& out, const PriceSampleSet& samples);

}  // namespace databand
