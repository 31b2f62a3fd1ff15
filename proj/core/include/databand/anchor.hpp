#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace databand {

// One year of the data-economy sizing series.
struct AnchorRow {
  int year = 0;
  double economy_value_usd = 0.0;  // absolute USD
  double gdp_usd = 0.0;            // absolute USD
  double data_volume_zb = 0.0;     // zettabytes (decimal)
  bool is_projection = false;

  void validate() const;

  bool operator==(const AnchorRow&) const = default;
};

// Content-agnostic floor price: data-economy value spread over global data
// volume. Decimal prefixes: 1 ZB = 1e15 MB.
double derive_b0(double economy_value_usd, double data_volume_zb);

// The data-economy dataset, embedded but replaceable by a user file of the
// same schema so future years do not require a rebuild.
class AnchorDataset {
 public:
  static AnchorDataset builtin();
  static AnchorDataset load(const std::filesystem::path& path);

  explicit AnchorDataset(std::vector<AnchorRow> rows,
                         std::string version = "custom");

  const AnchorRow& row(int year) const;  // throws ValidationError on missing
  bool contains(int year) const;

  struct Lookup {
    double b0 = 0.0;
    bool is_projection = false;
  };
  // b0 recomputed from the row's value/volume (not a stored rounded column).
  Lookup anchor_for_year(int year) const;

  const std::vector<AnchorRow>& rows() const { return rows_; }
  const std::string& version() const { return version_; }

 private:
  std::vector<AnchorRow> rows_;  // sorted by year
  std::string version_;
};

inline constexpr const char* kAnchorDatasetSchema = "databand-anchor-dataset";

}  // namespace databand
