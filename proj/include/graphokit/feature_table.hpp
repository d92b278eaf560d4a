#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace graphokit {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

// Cohort x feature matrix. Missing cells hold kMissing (NaN); labels are
// 0 = HC, 1 = LBD.
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> subject_ids;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::size_t n_rows() const noexcept { return rows.size(); }
  std::size_t n_features() const noexcept { return feature_names.size(); }

  void add_row(std::string subject_id, int label, std::vector<double> values);
  std::vector<double> column(std::size_t feature) const;
  FeatureTable select_rows(std::span<const std::size_t> indices) const;

  // Throws DimensionMismatch / InvalidParams when the shape invariants fail.
  void check() const;
};

// CSV contract: header `subject_id,label,<feature names...>`, label as 0/1,
// missing values as empty cells. The reader also accepts HC/LBD labels.
std::string to_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view text);
FeatureTable read_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);

}  // namespace graphokit
