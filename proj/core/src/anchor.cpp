#include "databand/anchor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "databand/errors.hpp"

namespace databand {
namespace {

constexpr double kMbPerZb = 1e15;  // decimal: 1e21 bytes / 1e6 bytes

// 2015-2025 use reported market totals; 2026+ are CAGR-style projections.
// Economy values in billions USD, GDP in trillions USD, volume in ZB.
struct RawRow {
  int year;
  double economy_busd;
  double gdp_tusd;
  double volume_zb;
  bool projection;
};

constexpr RawRow kBuiltinRows[] = {
    {2015, 1151.0, 75.8, 12, false},   {2016, 1309.2, 77.1, 19, false},
    {2017, 1999.1, 82.0, 24, false},   {2018, 1761.6, 87.0, 33, false},
    {2019, 1971.0, 88.3, 24, false},   {2020, 2768.8, 86.1, 59, false},
    {2021, 4545.8, 98.2, 24, false},   {2022, 2926.6, 102.4, 100, false},
    {2023, 4151.2, 106.9, 120, false}, {2024, 6194.5, 111.1, 147, false},
    {2025, 6709.0, 117.2, 175, false}, {2026, 7453.0, 123.6, 231, true},
    {2027, 8864.1, 129.6, 297, true},  {2028, 10542.5, 136.0, 394, true},
    {2029, 12538.6, 142.6, 491, true}, {2030, 14912.7, 149.6, 612, true},
    {2031, 17736.3, 155.5, 811, true}, {2032, 21094.5, 162.9, 1042, true},
    {2033, 25088.6, 170.7, 1339, true},{2034, 29838.9, 178.8, 1721, true},
    {2035, 35488.7, 187.4, 2142, true},
};

constexpr const char* kBuiltinVersion = "builtin-2015-2035-v1";

}  // namespace

void AnchorRow::validate() const {
  if (year < 2015 || year > 2035) {
    throw ValidationError("anchor row: year must lie in [2015, 2035]");
  }
  if (!(economy_value_usd > 0.0 && gdp_usd > 0.0 && data_volume_zb > 0.0)) {
    throw ValidationError("anchor row: values must be > 0");
  }
}

double derive_b0(double economy_value_usd, double data_volume_zb) {
  if (!(std::isfinite(economy_value_usd) && economy_value_usd > 0.0)) {
    throw ValidationError("derive_b0: economy value must be > 0");
  }
  if (!(std::isfinite(data_volume_zb) && data_volume_zb > 0.0)) {
    throw ValidationError("derive_b0: data volume must be > 0");
  }
  return economy_value_usd / (data_volume_zb * kMbPerZb);
}

AnchorDataset::AnchorDataset(std::vector<AnchorRow> rows, std::string version)
    : rows_(std::move(rows)), version_(std::move(version)) {
  if (rows_.empty()) throw ValidationError("anchor dataset: no rows");
  std::sort(rows_.begin(), rows_.end(),
            [](const AnchorRow& a, const AnchorRow& b) { return a.year < b.year; });
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    rows_[i].validate();
    if (i > 0 && rows_[i].year == rows_[i - 1].year) {
      throw ValidationError("anchor dataset: duplicate year " +
                            std::to_string(rows_[i].year));
    }
  }
}

AnchorDataset AnchorDataset::builtin() {
  std::vector<AnchorRow> rows;
  for (const auto& raw : kBuiltinRows) {
    rows.push_back({raw.year, raw.economy_busd * 1e9, raw.gdp_tusd * 1e12,
                    raw.volume_zb, raw.projection});
  }
  return AnchorDataset(std::move(rows), kBuiltinVersion);
}

AnchorDataset AnchorDataset::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open anchor dataset '" + path.string() + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("anchor dataset '" + path.string() +
                          "': " + e.what());
  }
  try {
    if (doc.value("schema", "") != kAnchorDatasetSchema) {
      throw ValidationError("anchor dataset: schema field must be '" +
                            std::string(kAnchorDatasetSchema) + "'");
    }
    std::vector<AnchorRow> rows;
    for (const auto& r : doc.at("rows")) {
      AnchorRow row;
      row.year = r.at("year").get<int>();
      row.economy_value_usd = r.at("economy_value_usd").get<double>();
      row.gdp_usd = r.at("gdp_usd").get<double>();
      row.data_volume_zb = r.at("data_volume_zb").get<double>();
      row.is_projection = r.value("is_projection", false);
      rows.push_back(row);
    }
    return AnchorDataset(std::move(rows),
                         doc.value("version", std::string("custom")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("anchor dataset '" + path.string() +
                          "': " + e.what());
  }
}

const AnchorRow& AnchorDataset::row(int year) const {
  auto it = std::lower_bound(
      rows_.begin(), rows_.end(), year,
      [](const AnchorRow& r, int y) { return r.year < y; });
  if (it == rows_.end() || it->year != year) {
    throw ValidationError("anchor dataset (" + version_ + "): no row for year " +
                          std::to_string(year));
  }
  return *it;
}

bool AnchorDataset::contains(int year) const {
  return std::any_of(rows_.begin(), rows_.end(),
                     [year](const AnchorRow& r) { return r.year == year; });
}

AnchorDataset::Lookup AnchorDataset::anchor_for_year(int year) const {
  const AnchorRow& r = row(year);
  return {derive_b0(r.economy_value_usd, r.data_volume_zb), r.is_projection};
}

}  // namespace databand
