#include <doctest.h>

#include <cmath>

#include "databand/deal.hpp"
#include "databand/errors.hpp"
#include "databand/rng.hpp"

using namespace databand;

namespace {

DealAttributes case_study_deal() {
  DealAttributes attrs;
  attrs.technology_node = "3nm";
  attrs.process_count = 6;
  attrs.quality_score = 0.95;
  attrs.completeness_score = 0.95;
  attrs.age_months = 6.0;
  attrs.utility_value_usd = 25e6;
  attrs.rights_factors = {{"non-exclusive", 1.0},
                          {"derivatives", 1.3},
                          {"term-24mo", 1.1},
                          {"enterprise-use", 1.15}};
  attrs.volume_mb = 5368709120.0;  // 5 PB
  return attrs;
}

}  // namespace

TEST_CASE("node multiplier is an exact table lookup") {
  const NodeTable table = NodeTable::semiconductor_preset();
  DealAttributes attrs = case_study_deal();
  CHECK(node_multiplier(attrs, table) == 1.65);
  attrs.technology_node = "10nm";
  CHECK(node_multiplier(attrs, table) == 1.25);

  NodeTable with_neutral = table;
  with_neutral.insert("legacy", 1.0);
  attrs.technology_node = "legacy";
  CHECK(node_multiplier(attrs, with_neutral) == 1.0);

  attrs.technology_node = "1nm";
  CHECK_THROWS_AS(node_multiplier(attrs, table), ValidationError);
  CHECK_THROWS_WITH_AS(node_multiplier(attrs, table),
                       doctest::Contains("1nm"), ValidationError);
}

TEST_CASE("node table rejects non-positive multipliers and spots inversions") {
  NodeTable table;
  CHECK_THROWS_AS(table.insert("3nm", 0.0), ValidationError);
  CHECK_THROWS_AS(table.insert("3nm", -1.0), ValidationError);

  CHECK(NodeTable::semiconductor_preset().monotonicity_violations().empty());

  NodeTable inverted({{"10nm", 1.5}, {"3nm", 1.2}});
  const auto violations = inverted.monotonicity_violations();
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].first == "3nm");
  CHECK(violations[0].second == "10nm");
}

TEST_CASE("coverage multiplier reproduces the worked value") {
  CHECK(coverage_multiplier(6) == doctest::Approx(1.29189).epsilon(1e-5));
  CHECK(coverage_multiplier(0) == 1.0);
  CHECK(coverage_multiplier(1) ==
        doctest::Approx(1.0 + 0.15 * std::log(2.0)).epsilon(1e-12));
  CHECK(coverage_multiplier(1) == doctest::Approx(1.10397).epsilon(1e-5));
  CHECK_THROWS_AS(coverage_multiplier(-1), ValidationError);
}

TEST_CASE("coverage multiplier: increasing with diminishing returns") {
  double previous_gain = coverage_multiplier(1) - coverage_multiplier(0);
  for (int m = 1; m < 60; ++m) {
    const double gain = coverage_multiplier(m + 1) - coverage_multiplier(m);
    CHECK(gain > 0.0);
    CHECK(gain < previous_gain);
    previous_gain = gain;
  }
}

TEST_CASE("quality/freshness multiplier") {
  CHECK(quality_freshness_multiplier(0.95, 0.95, 6.0) ==
        doctest::Approx(1.21).epsilon(1e-12));
  CHECK(quality_freshness_multiplier(0.0, 0.0, 24.0) ==
        doctest::Approx(0.85).epsilon(1e-12));
  CHECK(quality_freshness_multiplier(1.0, 1.0, 0.0) ==
        doctest::Approx(1.25).epsilon(1e-12));

  // stale enough to push the multiplier non-positive: hard error, no clamp
  FormulaParams params;
  params.qf_base = 0.1;
  CHECK_THROWS_AS(quality_freshness_multiplier(0.0, 0.0, 240.0, params),
                  ValidationError);
  CHECK_THROWS_AS(quality_freshness_multiplier(1.2, 0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(quality_freshness_multiplier(0.5, 0.5, -1.0), ValidationError);
}

TEST_CASE("utility multiplier uses a base-10 log") {
  CHECK(utility_multiplier(25e6) == doctest::Approx(1.56599).epsilon(1e-5));
  CHECK(utility_multiplier(0.0) == 1.0);
  CHECK(utility_multiplier(9e6) == doctest::Approx(1.4).epsilon(1e-12));

  // a natural-log base would give a very different value for the same deal
  FormulaParams natural;
  natural.utility_log_base = std::exp(1.0);
  CHECK(utility_multiplier(25e6, natural) ==
        doctest::Approx(1.0 + 0.4 * std::log(26.0)).epsilon(1e-12));
  CHECK(utility_multiplier(25e6, natural) > 2.3);
}

TEST_CASE("rights multiplier is a plain product") {
  const std::vector<RightsFactor> case_study = {
      {"non-exclusive", 1.0}, {"derivatives", 1.3}, {"term", 1.1}, {"enterprise", 1.15}};
  CHECK(rights_multiplier(case_study) == doctest::Approx(1.6445).epsilon(1e-6));

  const std::vector<RightsFactor> one = {{"base", 1.0}};
  CHECK(rights_multiplier(one) == 1.0);

  const std::vector<RightsFactor> cancel = {{"a", 2.0}, {"b", 0.5}};
  CHECK(rights_multiplier(cancel) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(rights_multiplier({}) == 1.0);

  const std::vector<RightsFactor> bad = {{"broken", -0.2}};
  CHECK_THROWS_AS(rights_multiplier(bad), ValidationError);
}

TEST_CASE("map_attributes reproduces the worked multiplier vector") {
  const MultiplierVector x = map_attributes(
      case_study_deal(), NodeTable::semiconductor_preset(), FormulaParams{});
  CHECK(x.tn() == doctest::Approx(1.65).epsilon(1e-12));
  CHECK(x.coverage() == doctest::Approx(1.29189).epsilon(1e-5));
  CHECK(x.quality_freshness() == doctest::Approx(1.21).epsilon(1e-12));
  CHECK(x.utility() == doctest::Approx(1.56599).epsilon(1e-5));
  CHECK(x.rights() == doctest::Approx(1.6445).epsilon(1e-6));

  const std::array<double, 5> expected_logs = {0.5008, 0.2560, 0.1906, 0.4470,
                                               0.4974};
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(std::abs(x.logs()[j] - expected_logs[j]) <
          5e-4 + 2e-3 * (j == 3));  // the printed ln(util) is rounded low
  }
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(x.logs()[j] == doctest::Approx(std::log(x.values()[j])));
  }
}

TEST_CASE("map_attributes is deterministic and the neutral deal maps to ones") {
  const NodeTable table = NodeTable::semiconductor_preset();
  const DealAttributes attrs = case_study_deal();
  const MultiplierVector a = map_attributes(attrs, table, {});
  const MultiplierVector b = map_attributes(attrs, table, {});
  CHECK(a == b);  // bit-identical components and logs

  DealAttributes neutral;
  neutral.technology_node = "base";
  neutral.process_count = 0;
  // q = c = 0.5 at the full horizon lands the quality term exactly on 1
  neutral.quality_score = 0.5;
  neutral.completeness_score = 0.5;
  neutral.age_months = 24.0;
  neutral.utility_value_usd = 0.0;
  neutral.volume_mb = 1.0;
  NodeTable neutral_table;
  neutral_table.insert("base", 1.0);
  const MultiplierVector ones = map_attributes(neutral, neutral_table, {});
  for (double v : ones.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  for (double l : ones.logs()) CHECK(std::abs(l) < 1e-15);
}

TEST_CASE("randomized attributes always yield positive multipliers") {
  RngStream rng = RngStream::for_world(99, 0, RngStream::Lane::kProbe);
  const NodeTable table = NodeTable::semiconductor_preset();
  const std::vector<std::string> nodes = {"10nm", "7nm", "5nm", "3nm", "2nm"};
  for (int i = 0; i < 20000; ++i) {
    DealAttributes attrs;
    attrs.technology_node = nodes[rng.uniform_below(nodes.size())];
    attrs.process_count = static_cast<int>(rng.uniform_below(50));
    attrs.quality_score = rng.uniform01();
    attrs.completeness_score = rng.uniform01();
    attrs.age_months = rng.uniform(0.0, 24.0);  // within the default horizon
    attrs.utility_value_usd = rng.uniform(0.0, 1e9);
    attrs.rights_factors = {{"r1", rng.uniform(0.1, 3.0)},
                            {"r2", rng.uniform(0.1, 3.0)}};
    attrs.volume_mb = rng.uniform(1.0, 1e10);
    const MultiplierVector x = map_attributes(attrs, table, {});
    for (double v : x.values()) CHECK(v > 0.0);
    for (double l : x.logs()) CHECK(std::isfinite(l));
  }
}

TEST_CASE("monotonicity in coverage, utility and rights") {
  for (int m = 0; m < 30; ++m) {
    CHECK(coverage_multiplier(m + 1) > coverage_multiplier(m));
  }
  double previous = utility_multiplier(0.0);
  for (double v = 1e5; v < 1e9; v *= 3.0) {
    const double current = utility_multiplier(v);
    CHECK(current > previous);
    previous = current;
  }
  std::vector<RightsFactor> factors = {{"a", 1.2}};
  const double base = rights_multiplier(factors);
  factors.push_back({"b", 1.01});
  CHECK(rights_multiplier(factors) > base);
}

TEST_CASE("attribute validation catches each invariant") {
  DealAttributes attrs = case_study_deal();
  CHECK_NOTHROW(attrs.validate());

  auto broken = attrs;
  broken.quality_score = 1.5;
  CHECK_THROWS_AS(broken.validate(), ValidationError);
  broken = attrs;
  broken.process_count = -2;
  CHECK_THROWS_AS(broken.validate(), ValidationError);
  broken = attrs;
  broken.utility_value_usd = -1.0;
  CHECK_THROWS_AS(broken.validate(), ValidationError);
  broken = attrs;
  broken.volume_mb = 0.0;
  CHECK_THROWS_AS(broken.validate(), ValidationError);
  broken = attrs;
  broken.rights_factors.push_back({"void", 0.0});
  CHECK_THROWS_AS(broken.validate(), ValidationError);
}

TEST_CASE("binary-prefix volume conversions") {
  CHECK(volume_to_mb(5.0, "PB") == 5368709120.0);
  CHECK(volume_to_mb(5242880.0, "GB") == 5368709120.0);
  CHECK(volume_to_mb(1.0, "MB") == 1.0);
  CHECK_THROWS_AS(volume_to_mb(1.0, "KB"), ValidationError);
  CHECK_THROWS_AS(volume_to_mb(-1.0, "MB"), ValidationError);
}
