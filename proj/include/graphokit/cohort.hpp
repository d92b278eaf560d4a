#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphokit/ink.hpp"
#include "graphokit/svc.hpp"

namespace graphokit {

enum class Label : int { HC = 0, LBD = 1 };

std::string_view label_name(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;

struct ManifestEntry {
  std::string subject_id;
  Label label = Label::HC;
  std::map<Task, std::filesystem::path> task_files;  // relative to base_dir
  std::map<std::string, double> covariates;           // optional clinical scores
};

// JSON layout:
//   { "metadata": { ... },
//     "subjects": [ { "id": "S001", "label": "HC",
//                     "tasks": { "spiral": "S001/spiral.svc", ... },
//                     "covariates": { "updrs": 12 } } ] }
// The optional metadata key "svc_columns" (array of 7 names) selects an
// alternate SvcLayout.
struct CohortManifest {
  std::vector<ManifestEntry> entries;
  std::map<std::string, std::string> metadata;
  std::filesystem::path base_dir;

  SvcLayout svc_layout() const;
};

CohortManifest parse_manifest(std::string_view json_text,
                              const std::filesystem::path& base_dir);
CohortManifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const CohortManifest& manifest);

struct CohortItem {
  std::string subject_id;
  Label label = Label::HC;
  InkRecording recording;
};

struct LoadedCohort {
  std::map<Task, std::vector<CohortItem>> tasks;
  std::vector<std::string> warnings;
};

struct LoadOptions {
  bool strict = false;
};

// Per-task recording lists in manifest order. Subjects without a task are
// omitted from that task with a warning. In lenient mode unreadable files are
// also skipped with a warning; strict mode raises FileMissing / ParseError.
LoadedCohort load_cohort(const CohortManifest& manifest, const LoadOptions& options = {});

}  // namespace graphokit
