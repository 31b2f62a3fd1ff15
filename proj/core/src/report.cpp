#include "databand/report.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <json.hpp>

#include "databand/errors.hpp"
#include "databand/version.hpp"

namespace databand {
namespace {

using Json = nlohmann::ordered_json;

std::string sig5(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string quantile_label(double q) {
  const double pct = q * 100.0;
  char buf[32];
  if (std::abs(pct - std::round(pct)) < 1e-9) {
    std::snprintf(buf, sizeof(buf), "P%d", static_cast<int>(std::round(pct)));
  } else {
    std::snprintf(buf, sizeof(buf), "P%g", pct);
  }
  return buf;
}

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunOutput run_common(const Scenario& scenario, const RunOptions& options,
                     bool pipeline_mode) {
  scenario.validate();
  if (pipeline_mode && !scenario.pipeline) {
    throw ValidationError("scenario has no 'pipeline' section");
  }

  SimulationPlan plan = scenario.plan;
  if (options.seed_override) plan.seed = *options.seed_override;

  const MultiplierVector x =
      map_attributes(scenario.deal, scenario.node_table, scenario.formula);

  DealSource source = x;
  if (pipeline_mode) {
    source = PipelineSource{scenario.pipeline->mix, std::nullopt,
                            scenario.node_table, scenario.formula};
  }

  const auto started = std::chrono::steady_clock::now();
  PriceSampleSet samples = simulate(plan, scenario.prior, scenario.constraints,
                                    source, options.threads);
  RunOutput out;
  out.report.bands = estimate_quantiles(samples);

  if (pipeline_mode) {
    // Conditional bands share the root seed: worlds reuse the same parameter
    // and noise draws, so classes differ only through the deals they admit.
    for (const auto& cls : scenario.pipeline->classes) {
      PipelineSource conditional{scenario.pipeline->mix, cls,
                                 scenario.node_table, scenario.formula};
      PriceSampleSet class_samples =
          simulate(plan, scenario.prior, scenario.constraints,
                   DealSource{std::move(conditional)}, options.threads);
      out.report.class_reports.push_back(
          {cls.label, estimate_quantiles(class_samples)});
    }
  }
  out.report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  out.report.scenario_name = scenario.name;
  out.report.artifact_version = kVersion;
  out.report.mode = pipeline_mode ? "pipeline" : "price";
  out.report.seed = plan.seed;
  out.report.b0 = scenario.prior.b0;
  out.report.b0_provenance = scenario.b0_provenance.empty()
                                 ? "explicit"
                                 : scenario.b0_provenance;
  out.report.attributes = scenario.deal;
  if (!pipeline_mode) out.report.multipliers = x;
  out.report.prior = scenario.prior;
  out.report.constraints = scenario.constraints;
  out.report.plan = plan;
  out.report.volume_mb = scenario.deal.volume_mb;
  out.report.telemetry = samples.telemetry;
  if (options.with_timestamp) out.report.generated_at = utc_now();
  if (options.keep_samples) out.samples = std::move(samples);
  return out;
}

}  // namespace

RunOutput run_price(const Scenario& scenario, const RunOptions& options) {
  return run_common(scenario, options, /*pipeline_mode=*/false);
}

RunOutput run_pipeline(const Scenario& scenario, const RunOptions& options) {
  return run_common(scenario, options, /*pipeline_mode=*/true);
}

std::string run_validate(const Scenario& scenario,
                         std::optional<std::uint64_t> seed_override) {
  scenario.validate();  // throws with section context on failure
  const std::uint64_t seed = seed_override.value_or(scenario.plan.seed);
  std::ostringstream out;
  out << "scenario '" << scenario.name << "': valid\n";
  out << "  anchor: b0 = " << sig5(scenario.prior.b0) << " USD/MB ("
      << (scenario.b0_provenance.empty() ? "explicit" : scenario.b0_provenance)
      << ")\n";

  const MultiplierVector x =
      map_attributes(scenario.deal, scenario.node_table, scenario.formula);
  out << "  multipliers x: tn=" << x.tn() << " cov=" << x.coverage()
      << " qf=" << x.quality_freshness() << " util=" << x.utility()
      << " rights=" << x.rights() << "\n";
  out << "  ln x:";
  for (double l : x.logs()) out << " " << l;
  out << "\n";

  const double acceptance =
      acceptance_probe(scenario.prior, scenario.constraints, seed, 1000);
  out << "  prior acceptance probe (1000 draws): " << acceptance << "\n";
  if (acceptance < 0.01) {
    out << "  warning: prior-constraint conflict likely; sampling will be "
           "slow or fail\n";
  }

  try {
    const double median =
        semi_analytic_median(scenario.prior, scenario.constraints, x);
    out << "  semi-analytic median: " << sig5(median) << " USD/MB\n";
  } catch (const ValidationError& e) {
    out << "  semi-analytic median: unavailable (" << e.what() << ")\n";
  }

  out << "  plan: T=" << scenario.plan.worlds
      << " N=" << scenario.plan.draws_per_world << " -> "
      << scenario.plan.total_draws() << " samples, seed " << seed << "\n";
  if (scenario.pipeline) {
    out << "  pipeline: " << scenario.pipeline->mix.components.size()
        << " component(s), " << scenario.pipeline->classes.size()
        << " class(es)\n";
  }
  return out.str();
}

std::string render_text(const RunReport& r) {
  std::ostringstream out;
  out << "databand " << r.mode << " report (v" << r.artifact_version << ")\n";
  out << "scenario: " << r.scenario_name << "   seed: " << r.seed << "\n";
  if (r.generated_at) out << "generated_at: " << *r.generated_at << "\n";
  out << "\ninputs\n";
  out << "  b0: " << sig5(r.b0) << " USD/MB (" << r.b0_provenance << ")\n";
  const auto& a = r.attributes;
  out << "  deal: node=" << a.technology_node
      << " processes=" << a.process_count << " quality=" << a.quality_score
      << " completeness=" << a.completeness_score << " age_months="
      << a.age_months << " utility_usd=" << sig5(a.utility_value_usd) << "\n";
  out << "  rights:";
  if (a.rights_factors.empty()) out << " (none)";
  for (const auto& rf : a.rights_factors) {
    out << " " << rf.label << "=" << rf.factor;
  }
  out << "\n";
  out << "  volume_mb: " << sig5(r.volume_mb) << "\n";
  if (r.multipliers) {
    out << "  multipliers x: tn=" << r.multipliers->tn()
        << " cov=" << r.multipliers->coverage()
        << " qf=" << r.multipliers->quality_freshness()
        << " util=" << r.multipliers->utility()
        << " rights=" << r.multipliers->rights() << "\n";
    out << "  ln x:";
    for (double l : r.multipliers->logs()) out << " " << l;
    out << "\n";
  } else {
    out << "  multipliers: per-draw (pipeline mode)\n";
  }
  out << "  prior: b0=" << sig5(r.prior.b0) << " s_alpha=" << r.prior.s_alpha
      << " mu=[";
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    out << (j ? ", " : "") << r.prior.mu[j];
  }
  out << "] s=[";
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    out << (j ? ", " : "") << r.prior.s[j];
  }
  out << "] s_sigma=" << r.prior.s_sigma << "\n";
  out << "  constraints:";
  bool any_constraint = false;
  for (const auto& label : r.constraints.check_labels()) {
    if (label.find("(-inf") != std::string::npos &&
        label.find("inf)") != std::string::npos) {
      continue;  // unbounded, not worth echoing
    }
    out << (any_constraint ? "; " : " ") << label;
    any_constraint = true;
  }
  if (!any_constraint) out << " (none)";
  out << "\n";
  out << "  plan: T=" << r.plan.worlds << " N=" << r.plan.draws_per_world
      << "\n";

  out << "\nestimates (" << r.bands.count << " samples)\n";
  for (const auto& band : r.bands.bands) {
    const double mb = band.price_usd_per_mb;
    out << "  " << quantile_label(band.q) << ": " << sig5(mb) << " USD/MB   "
        << fixed3(PriceBands::usd_per_gb(mb)) << " USD/GB   total $"
        << fixed3(PriceBands::contract_total_usd(mb, r.volume_mb) / 1e6)
        << "M\n";
  }
  out << "  mean: " << sig5(r.bands.mean) << " USD/MB (se "
      << sig5(r.bands.mean_standard_error) << ")\n";

  for (const auto& cls : r.class_reports) {
    out << "\nclass '" << cls.label << "' (" << cls.bands.count
        << " samples)\n";
    for (const auto& band : cls.bands.bands) {
      const double mb = band.price_usd_per_mb;
      out << "  " << quantile_label(band.q) << ": " << sig5(mb)
          << " USD/MB   " << fixed3(PriceBands::usd_per_gb(mb))
          << " USD/GB   total $"
          << fixed3(PriceBands::contract_total_usd(mb, r.volume_mb) / 1e6)
          << "M\n";
    }
  }

  out << "\ntelemetry\n";
  out << "  prior acceptance: " << r.telemetry.acceptance_rate << "\n";
  if (r.telemetry.dropped_worlds > 0) {
    out << "  dropped worlds: " << r.telemetry.dropped_worlds << "\n";
  }
  if (r.generated_at) {
    out << "  elapsed: " << r.elapsed_seconds << " s   worlds/s: "
        << r.telemetry.worlds_per_second << "\n";
  }
  return out.str();
}

std::string render_json(const RunReport& r) {
  Json doc;
  doc["artifact"] = {{"name", "databand"}, {"version", r.artifact_version}};
  doc["scenario"] = r.scenario_name;
  doc["mode"] = r.mode;
  doc["seed"] = r.seed;
  if (r.generated_at) doc["generated_at"] = *r.generated_at;

  Json inputs;
  inputs["b0_usd_per_mb"] = r.b0;
  inputs["b0_provenance"] = r.b0_provenance;
  Json attrs;
  attrs["technology_node"] = r.attributes.technology_node;
  attrs["process_count"] = r.attributes.process_count;
  attrs["quality_score"] = r.attributes.quality_score;
  attrs["completeness_score"] = r.attributes.completeness_score;
  attrs["age_months"] = r.attributes.age_months;
  attrs["utility_value_usd"] = r.attributes.utility_value_usd;
  Json rights = Json::array();
  for (const auto& rf : r.attributes.rights_factors) {
    rights.push_back({{"label", rf.label}, {"factor", rf.factor}});
  }
  attrs["rights_factors"] = rights;
  attrs["volume_mb"] = r.attributes.volume_mb;
  inputs["attributes"] = attrs;
  if (r.multipliers) {
    Json x, lnx;
    for (std::size_t j = 0; j < MultiplierVector::kLevers; ++j) {
      x[MultiplierVector::kLeverNames[j]] = r.multipliers->values()[j];
      lnx[MultiplierVector::kLeverNames[j]] = r.multipliers->logs()[j];
    }
    inputs["multipliers"] = x;
    inputs["ln_multipliers"] = lnx;
  }
  inputs["prior"] = {{"b0", r.prior.b0},
                     {"s_alpha", r.prior.s_alpha},
                     {"mu", r.prior.mu},
                     {"s", r.prior.s},
                     {"s_sigma", r.prior.s_sigma}};
  inputs["constraints"] = r.constraints.check_labels();
  inputs["plan"] = {{"worlds", r.plan.worlds},
                    {"draws_per_world", r.plan.draws_per_world},
                    {"seed", r.plan.seed},
                    {"quantiles", r.plan.quantiles}};
  doc["inputs"] = inputs;

  const auto bands_json = [&](const PriceBands& bands) {
    Json usd_mb, usd_gb, totals;
    for (const auto& band : bands.bands) {
      const auto label = quantile_label(band.q);
      usd_mb[label] = band.price_usd_per_mb;
      usd_gb[label] = PriceBands::usd_per_gb(band.price_usd_per_mb);
      totals[label] =
          PriceBands::contract_total_usd(band.price_usd_per_mb, r.volume_mb);
    }
    Json out;
    out["usd_per_mb"] = usd_mb;
    out["usd_per_gb"] = usd_gb;
    out["contract_total_usd"] = totals;
    out["mean_usd_per_mb"] = bands.mean;
    out["mean_standard_error"] = bands.mean_standard_error;
    out["samples"] = bands.count;
    return out;
  };

  doc["estimates"] = bands_json(r.bands);
  doc["estimates"]["volume_mb"] = r.volume_mb;
  if (!r.class_reports.empty()) {
    Json classes = Json::array();
    for (const auto& cls : r.class_reports) {
      Json cj = bands_json(cls.bands);
      cj["label"] = cls.label;
      classes.push_back(cj);
    }
    doc["classes"] = classes;
  }

  Json telemetry;
  telemetry["acceptance_rate"] = r.telemetry.acceptance_rate;
  telemetry["dropped_worlds"] = r.telemetry.dropped_worlds;
  if (r.generated_at) {
    telemetry["elapsed_seconds"] = r.elapsed_seconds;
    telemetry["worlds_per_second"] = r.telemetry.worlds_per_second;
  }
  doc["telemetry"] = telemetry;
  return doc.dump(2) + "\n";
}

void write_samples_csv(std::ostream& out, const PriceSampleSet& samples) {
  out << "world,draw,price_usd_per_mb,alpha,beta_tn,beta_cov,beta_qf,"
         "beta_util,beta_rights,sigma\n";
  char buf[64];
  const auto n = static_cast<std::size_t>(samples.plan.draws_per_world);
  for (std::size_t t = 0; t < samples.worlds.size(); ++t) {
    const auto& theta = samples.worlds[t].theta;
    for (std::size_t i = 0; i < n; ++i) {
      out << t << "," << i;
      const double row[8] = {samples.samples[t * n + i], theta.alpha,
                             theta.beta[0], theta.beta[1], theta.beta[2],
                             theta.beta[3], theta.beta[4], theta.sigma};
      for (double v : row) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << "," << buf;
      }
      out << "\n";
    }
  }
}

}  // namespace databand
