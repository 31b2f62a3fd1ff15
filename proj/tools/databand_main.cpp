// Command-line front end: scenario-driven price-band runs, anchor lookups,
// and elasticity calibration from observed deals.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "databand/anchor.hpp"
#include "databand/calibration.hpp"
#include "databand/errors.hpp"
#include "databand/report.hpp"
#include "databand/scenario.hpp"
#include "databand/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSamplingConflict = 3;
constexpr int kExitIo = 4;

struct RunArgs {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool json = false;
  bool no_timestamp = false;
  std::string samples_out;
};

void add_run_flags(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario file (JSON)")
      ->required();
  cmd->add_option("--seed", args.seed, "Override the scenario's seed");
  cmd->add_option("--threads", args.threads,
                  "Worker threads (never changes results)");
  cmd->add_flag("--json", args.json, "Machine-readable report on stdout");
  cmd->add_flag("--no-timestamp", args.no_timestamp,
                "Suppress timestamp and wall-time telemetry (stable bytes)");
  cmd->add_option("--samples-out", args.samples_out,
                  "Write the raw T x N samples as CSV");
}

int run_subcommand(const RunArgs& args, bool pipeline_mode) {
  const databand::Scenario scenario =
      databand::load_scenario(args.scenario_path);
  databand::RunOptions options;
  options.seed_override = args.seed;
  options.threads = args.threads;
  options.with_timestamp = !args.no_timestamp;
  options.keep_samples = !args.samples_out.empty();

  const databand::RunOutput output = pipeline_mode
                                         ? run_pipeline(scenario, options)
                                         : run_price(scenario, options);
  if (!args.samples_out.empty()) {
    std::ofstream out(args.samples_out);
    if (!out) {
      throw databand::IoError("cannot write samples to '" + args.samples_out +
                              "'");
    }
    databand::write_samples_csv(out, *output.samples);
  }
  std::cout << (args.json ? databand::render_json(output.report)
                          : databand::render_text(output.report));
  return kExitOk;
}

int anchor_subcommand(int year, const std::string& dataset_path, bool json) {
  const databand::AnchorDataset dataset =
      dataset_path.empty() ? databand::AnchorDataset::builtin()
                           : databand::AnchorDataset::load(dataset_path);
  const auto lookup = dataset.anchor_for_year(year);
  const auto& row = dataset.row(year);
  if (json) {
    nlohmann::ordered_json doc;
    doc["year"] = year;
    doc["b0_usd_per_mb"] = lookup.b0;
    doc["is_projection"] = lookup.is_projection;
    doc["economy_value_usd"] = row.economy_value_usd;
    doc["gdp_usd"] = row.gdp_usd;
    doc["data_volume_zb"] = row.data_volume_zb;
    doc["dataset_version"] = dataset.version();
    std::cout << doc.dump(2) << "\n";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4e", lookup.b0);
    std::cout << "b0(" << year << ") = " << buf << " USD/MB"
              << (lookup.is_projection ? " (projection)" : "") << "\n"
              << "  economy value: " << row.economy_value_usd << " USD\n"
              << "  data volume:   " << row.data_volume_zb << " ZB\n"
              << "  dataset:       " << dataset.version() << "\n";
  }
  return kExitOk;
}

int calibrate_subcommand(const std::string& deals_path,
                         const std::string& base_scenario_path,
                         std::optional<double> weight,
                         const std::string& out_path, bool json) {
  const auto deals = databand::load_observed_deals(deals_path);
  const databand::FitResult fit = databand::fit_ols(deals);

  if (json) {
    nlohmann::ordered_json doc;
    doc["n"] = fit.n;
    doc["alpha_hat"] = fit.alpha_hat;
    doc["alpha_se"] = fit.alpha_se;
    doc["beta_hat"] = fit.beta_hat;
    doc["beta_se"] = fit.beta_se;
    doc["sigma_hat"] = fit.sigma_hat;
    doc["condition"] = fit.condition;
    doc["implied_b0_usd_per_mb"] = std::exp(fit.alpha_hat);
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "OLS fit over " << fit.n << " observed deals\n";
    std::cout << "  alpha: " << fit.alpha_hat << " (se " << fit.alpha_se
              << "), implied b0 = " << std::exp(fit.alpha_hat) << " USD/MB\n";
    for (std::size_t j = 0; j < databand::kLeverCount; ++j) {
      std::cout << "  beta_" << databand::MultiplierVector::kLeverNames[j]
                << ": " << fit.beta_hat[j] << " (se " << fit.beta_se[j]
                << ")\n";
    }
    std::cout << "  sigma: " << fit.sigma_hat << "\n";
    std::cout << "  design condition: " << fit.condition << "\n";
  }

  if (!out_path.empty()) {
    if (base_scenario_path.empty()) {
      throw databand::ValidationError(
          "--out needs --scenario (the prior to refresh)");
    }
    databand::Scenario scenario = databand::load_scenario(base_scenario_path);
    const double w = weight.value_or(databand::default_blend_weight(fit.n));
    scenario.prior = databand::refresh_prior(scenario.prior, fit, w);
    // the refreshed baseline becomes an explicit anchor
    scenario.anchor.explicit_b0 = scenario.prior.b0;
    scenario.anchor.year.reset();
    scenario.anchor.dataset_path.reset();
    scenario.b0_provenance = "explicit";
    std::ofstream out(out_path);
    if (!out) {
      throw databand::IoError("cannot write scenario to '" + out_path + "'");
    }
    out << databand::serialize_scenario(scenario);
    std::cerr << "refreshed scenario written to " << out_path
              << " (blend weight " << w << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prior-predictive Monte Carlo price bands for data products"};
  app.set_version_flag("--version", std::string("databand ") + databand::kVersion);
  app.require_subcommand(1);

  RunArgs price_args;
  auto* price = app.add_subcommand(
      "price", "Price one deal from a scenario file (P5/P50/P95 bands)");
  add_run_flags(price, price_args);

  RunArgs pipeline_args;
  auto* pipeline = app.add_subcommand(
      "pipeline", "Price a deal mix, with per-class conditional bands");
  add_run_flags(pipeline, pipeline_args);

  RunArgs validate_args;
  auto* validate = app.add_subcommand(
      "validate", "Dry-run a scenario: validation + derived quantities");
  validate->add_option("--scenario", validate_args.scenario_path,
                       "Scenario file (JSON)")
      ->required();
  validate->add_option("--seed", validate_args.seed,
                       "Seed for the acceptance probe");

  int anchor_year = 0;
  std::string anchor_dataset;
  bool anchor_json = false;
  auto* anchor = app.add_subcommand(
      "anchor", "Baseline price anchor for a year (data-economy dataset)");
  anchor->add_option("--year", anchor_year, "Year in [2015, 2035]")->required();
  anchor->add_option("--dataset", anchor_dataset,
                     "Anchor dataset file (defaults to builtin)");
  anchor->add_flag("--json", anchor_json, "Machine-readable output");

  std::string deals_path, calibrate_scenario, calibrate_out;
  std::optional<double> blend_weight;
  bool calibrate_json = false;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Fit elasticities from observed deals (OLS on log data)");
  calibrate->add_option("--deals", deals_path, "Observed-deals file (JSON)")
      ->required();
  calibrate->add_option("--scenario", calibrate_scenario,
                        "Base scenario whose prior to refresh");
  calibrate->add_option("--weight", blend_weight,
                        "Blend weight in [0,1]; default n/(n+20)");
  calibrate->add_option("--out", calibrate_out,
                        "Write the refreshed scenario here");
  calibrate->add_flag("--json", calibrate_json, "Machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (price->parsed()) return run_subcommand(price_args, false);
    if (pipeline->parsed()) return run_subcommand(pipeline_args, true);
    if (validate->parsed()) {
      const databand::Scenario scenario =
          databand::load_scenario(validate_args.scenario_path);
      std::cout << databand::run_validate(scenario, validate_args.seed);
      return kExitOk;
    }
    if (anchor->parsed()) {
      return anchor_subcommand(anchor_year, anchor_dataset, anchor_json);
    }
    if (calibrate->parsed()) {
      return calibrate_subcommand(deals_path, calibrate_scenario, blend_weight,
                                  calibrate_out, calibrate_json);
    }
  } catch (const databand::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const databand::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const databand::SamplingConflictError& e) {
    std::cerr << "sampling conflict: " << e.what() << "\n";
    return kExitSamplingConflict;
  } catch (const databand::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSamplingConflict;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
