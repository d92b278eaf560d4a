#include "graphokit/cohort.hpp"

#include <set>

#include <json.hpp>

#include "graphokit/error.hpp"
#include "graphokit/text.hpp"

namespace graphokit {

using nlohmann::json;

std::string_view label_name(Label label) noexcept {
  return label == Label::LBD ? "LBD" : "HC";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "HC" || text == "hc" || text == "0") return Label::HC;
  if (text == "LBD" || text == "lbd" || text == "1") return Label::LBD;
  return std::nullopt;
}

SvcLayout CohortManifest::svc_layout() const {
  auto it = metadata.find("svc_columns");
  if (it == metadata.end()) return {};
  json cols = json::parse(it->second, nullptr, false);
  if (!cols.is_array()) {
    throw Error(ErrorCode::MalformedManifest, "svc_columns must be an array of names");
  }
  std::vector<std::string> names;
  for (const auto& c : cols) {
    if (!c.is_string()) {
      throw Error(ErrorCode::MalformedManifest, "svc_columns entries must be strings");
    }
    names.push_back(c.get<std::string>());
  }
  return SvcLayout::from_names(names);
}

CohortManifest parse_manifest(std::string_view json_text,
                              const std::filesystem::path& base_dir) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::MalformedManifest, "manifest is not a JSON object");
  }
  CohortManifest manifest;
  manifest.base_dir = base_dir;

  if (auto meta = doc.find("metadata"); meta != doc.end()) {
    if (!meta->is_object()) {
      throw Error(ErrorCode::MalformedManifest, "metadata must be an object");
    }
    for (const auto& [key, value] : meta->items()) {
      manifest.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }

  auto subjects = doc.find("subjects");
  if (subjects == doc.end() || !subjects->is_array()) {
    throw Error(ErrorCode::MalformedManifest, "manifest needs a 'subjects' array");
  }
  std::set<std::string> ids;
  for (const auto& s : *subjects) {
    if (!s.is_object() || !s.contains("id") || !s["id"].is_string()) {
      throw Error(ErrorCode::MalformedManifest, "subject entry without string 'id'");
    }
    ManifestEntry entry;
    entry.subject_id = s["id"].get<std::string>();
    if (!ids.insert(entry.subject_id).second) {
      throw Error(ErrorCode::MalformedManifest, "duplicate subject id", entry.subject_id);
    }
    auto label = s.contains("label") && s["label"].is_string()
                     ? parse_label(s["label"].get<std::string>())
                     : std::nullopt;
    if (!label) {
      throw Error(ErrorCode::MalformedManifest, "label must be \"HC\" or \"LBD\"",
                  entry.subject_id);
    }
    entry.label = *label;
    if (!s.contains("tasks") || !s["tasks"].is_object() || s["tasks"].empty()) {
      throw Error(ErrorCode::MalformedManifest, "subject needs at least one task file",
                  entry.subject_id);
    }
    for (const auto& [name, file] : s["tasks"].items()) {
      auto task = parse_task(name);
      if (!task || !file.is_string()) {
        throw Error(ErrorCode::MalformedManifest, "bad task entry '" + name + "'",
                    entry.subject_id);
      }
      entry.task_files[*task] = file.get<std::string>();
    }
    if (auto cov = s.find("covariates"); cov != s.end()) {
      for (const auto& [name, value] : cov->items()) {
        if (!value.is_number()) {
          throw Error(ErrorCode::MalformedManifest, "covariate '" + name + "' must be numeric",
                      entry.subject_id);
        }
        entry.covariates[name] = value.get<double>();
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

CohortManifest load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::FileMissing, "manifest not found", path.string());
  }
  try {
    return parse_manifest(read_text_file(path), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), path.string() + (e.context().empty() ? "" : ":" + e.context()));
  }
}

std::string serialize_manifest(const CohortManifest& manifest) {
  json doc;
  json meta = json::object();
  for (const auto& [k, v] : manifest.metadata) meta[k] = v;
  doc["metadata"] = meta;
  json subjects = json::array();
  for (const auto& e : manifest.entries) {
    json s;
    s["id"] = e.subject_id;
    s["label"] = std::string(label_name(e.label));
    json tasks = json::object();
    for (const auto& [task, file] : e.task_files) {
      tasks[std::string(task_name(task))] = file.generic_string();
    }
    s["tasks"] = tasks;
    if (!e.covariates.empty()) {
      json cov = json::object();
      for (const auto& [k, v] : e.covariates) cov[k] = v;
      s["covariates"] = cov;
    }
    subjects.push_back(std::move(s));
  }
  doc["subjects"] = subjects;
  return doc.dump(2) + "\n";
}

LoadedCohort load_cohort(const CohortManifest& manifest, const LoadOptions& options) {
  LoadedCohort out;
  std::set<Task> all_tasks;
  for (const auto& e : manifest.entries) {
    for (const auto& [task, file] : e.task_files) all_tasks.insert(task);
  }
  for (Task task : all_tasks) out.tasks[task];

  const SvcLayout layout = manifest.svc_layout();
  const ValidationOptions validation{options.strict};

  for (const auto& e : manifest.entries) {
    for (Task task : all_tasks) {
      auto it = e.task_files.find(task);
      if (it == e.task_files.end()) {
        out.warnings.push_back(e.subject_id + ": no " + std::string(task_name(task)) +
                               " recording, omitted from that task");
        continue;
      }
      const auto path = manifest.base_dir / it->second;
      try {
        if (!std::filesystem::exists(path)) {
          throw Error(ErrorCode::FileMissing, "file not found", path.string());
        }
        InkRecording rec;
        try {
          rec = read_svc_file(path, layout);
          std::vector<std::string> repairs;
          rec = validate_recording(rec, validation, &repairs);
          for (const auto& r : repairs) {
            out.warnings.push_back(path.string() + ": " + r);
          }
        } catch (const Error& e2) {
          if (e2.code() == ErrorCode::FileMissing) throw;
          throw Error(ErrorCode::ParseError,
                      std::string(to_string(e2.code())) + ": " + e2.what(),
                      e2.context().empty() ? path.string() : e2.context());
        }
        rec.task = task;
        rec.subject_id = e.subject_id;
        out.tasks[task].push_back(CohortItem{e.subject_id, e.label, std::move(rec)});
      } catch (const Error& err) {
        if (options.strict) throw;
        out.warnings.push_back(e.subject_id + ": " + std::string(task_name(task)) +
                               " skipped (" + std::string(to_string(err.code())) + ": " +
                               err.what() + " @ " + err.context() + ")");
      }
    }
  }
  return out;
}

}  // namespace graphokit
