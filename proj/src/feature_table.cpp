#include "graphokit/feature_table.hpp"

#include <set>

#include "graphokit/cohort.hpp"
#include "graphokit/error.hpp"
#include "graphokit/text.hpp"

namespace graphokit {

void FeatureTable::add_row(std::string subject_id, int label, std::vector<double> values) {
  if (values.size() != feature_names.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "row has " + std::to_string(values.size()) + " values, table has " +
                    std::to_string(feature_names.size()) + " features",
                subject_id);
  }
  subject_ids.push_back(std::move(subject_id));
  labels.push_back(label);
  rows.push_back(std::move(values));
}

std::vector<double> FeatureTable::column(std::size_t feature) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[feature]);
  return out;
}

FeatureTable FeatureTable::select_rows(std::span<const std::size_t> indices) const {
  FeatureTable out;
  out.feature_names = feature_names;
  for (std::size_t i : indices) {
    out.subject_ids.push_back(subject_ids[i]);
    out.labels.push_back(labels[i]);
    out.rows.push_back(rows[i]);
  }
  return out;
}

void FeatureTable::check() const {
  if (labels.size() != rows.size() || subject_ids.size() != rows.size()) {
    throw Error(ErrorCode::DimensionMismatch, "labels/subject ids do not match row count");
  }
  for (const auto& r : rows) {
    if (r.size() != feature_names.size()) {
      throw Error(ErrorCode::DimensionMismatch, "row length differs from feature count");
    }
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(ErrorCode::InvalidParams, "labels must be 0 or 1");
  }
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  if (names.size() != feature_names.size()) {
    throw Error(ErrorCode::InvalidParams, "feature names must be unique");
  }
}

std::string to_csv(const FeatureTable& table) {
  std::string out = "subject_id,label";
  for (const auto& n : table.feature_names) {
    out.push_back(',');
    out += n;
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out += table.subject_ids[i];
    out.push_back(',');
    out += std::to_string(table.labels[i]);
    for (double v : table.rows[i]) {
      out.push_back(',');
      out += format_number(v);
    }
    out.push_back('\n');
  }
  return out;
}

FeatureTable parse_feature_csv(std::string_view text) {
  FeatureTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_done = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (!header_done) {
      if (fields.size() < 2 || fields[0] != "subject_id" || fields[1] != "label") {
        throw Error(ErrorCode::MissingLabelColumn,
                    "header must start with subject_id,label", "line 1");
      }
      table.feature_names.assign(fields.begin() + 2, fields.end());
      header_done = true;
      continue;
    }
    const std::string ctx = "line " + std::to_string(line_no);
    if (fields.size() != table.feature_names.size() + 2) {
      throw Error(ErrorCode::FieldCountMismatch, "wrong number of CSV fields", ctx);
    }
    auto label = parse_label(fields[1]);
    if (!label) throw Error(ErrorCode::NonNumericField, "bad label '" + fields[1] + "'", ctx);
    std::vector<double> values;
    values.reserve(fields.size() - 2);
    for (std::size_t f = 2; f < fields.size(); ++f) {
      if (fields[f].empty()) {
        values.push_back(kMissing);
        continue;
      }
      auto v = parse_number(fields[f]);
      if (!v) throw Error(ErrorCode::NonNumericField, "bad value '" + fields[f] + "'", ctx);
      values.push_back(*v);
    }
    table.add_row(fields[0], static_cast<int>(*label), std::move(values));
  }
  if (!header_done) throw Error(ErrorCode::MissingLabelColumn, "empty CSV");
  return table;
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  try {
    return parse_feature_csv(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), path.string() + (e.context().empty() ? "" : ":" + e.context()));
  }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
  write_text_file(path, to_csv(table));
}

}  // namespace graphokit
