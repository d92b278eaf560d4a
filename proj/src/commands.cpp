#include "graphokit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include <json.hpp>

#include "graphokit/error.hpp"
#include "graphokit/stats.hpp"
#include "graphokit/text.hpp"

namespace graphokit {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig RunConfig::for_profile(Profile profile) {
  RunConfig c;
  c.profile = profile;
  if (profile == Profile::Desk) {
    c.iterations = 50;
    c.permutations = 99;
  }
  return c;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (iterations < 1) fail("iterations must be >= 1");
  if (cv.k < 2) fail("k must be >= 2");
  if (cv.repeats < 1) fail("repeats must be >= 1");
  if (permutations < 1) fail("permutations must be >= 1");
  if (tasks.empty()) fail("no tasks selected");
  for (const auto& t : tasks) {
    if (t != "combined" && !parse_task(t)) fail("unknown task '" + t + "'");
  }
  grids.validate();
}

std::string_view profile_name(Profile profile) noexcept {
  return profile == Profile::Desk ? "desk" : "paper";
}

std::optional<Profile> parse_profile(std::string_view text) noexcept {
  if (text == "paper") return Profile::Paper;
  if (text == "desk") return Profile::Desk;
  return std::nullopt;
}

std::optional<ThresholdObjective> parse_objective(std::string_view text) noexcept {
  if (text == "youden") return ThresholdObjective::Youden;
  if (text == "f1") return ThresholdObjective::F1;
  return std::nullopt;
}

std::string_view objective_name(ThresholdObjective objective) noexcept {
  return objective == ThresholdObjective::F1 ? "f1" : "youden";
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("GRAPHOKIT_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw Error(ErrorCode::InvalidConfig, "GRAPHOKIT_SEED is not an unsigned integer");
  }
  return 0;
}

namespace {

fs::path features_path(const fs::path& out, std::string_view task) {
  return out / ("features_" + std::string(task) + ".csv");
}

std::string stem_name(const fs::path& features_csv) {
  std::string stem = features_csv.stem().string();
  if (stem.starts_with("features_")) stem = stem.substr(9);
  return stem;
}

std::vector<Task> selected_tasks(const RunConfig& config) {
  std::vector<Task> out;
  for (const auto& name : config.tasks) {
    if (auto t = parse_task(name)) out.push_back(*t);
  }
  return out;
}

}  // namespace

ExtractOutput cmd_extract(const RunConfig& config) {
  config.validate();
  const CohortManifest manifest = load_manifest(config.manifest);
  if (manifest.entries.empty()) {
    throw Error(ErrorCode::MalformedManifest, "manifest lists no subjects", config.manifest.string());
  }
  LoadOptions load_opts;
  load_opts.strict = config.strict;
  LoadedCohort cohort = load_cohort(manifest, load_opts);

  ExtractOutput out;
  out.warnings = cohort.warnings;
  std::vector<Task> tasks = selected_tasks(config);
  if (tasks.empty()) tasks = {Task::Spiral, Task::Sentence, Task::Pentagons};

  std::vector<std::pair<std::string, FeatureTable>> per_task;
  for (Task task : tasks) {
    const auto it = cohort.tasks.find(task);
    const std::vector<CohortItem> empty;
    const auto& items = it == cohort.tasks.end() ? empty : it->second;
    FeatureTable table = build_feature_table(items, task, config.features);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      std::size_t missing = 0;
      for (double v : table.rows[r]) missing += is_missing(v);
      if (missing == table.n_features()) {
        out.warnings.push_back(std::string(task_name(task)) + ": no feature computable for " +
                               table.subject_ids[r]);
      }
    }
    per_task.emplace_back(std::string(task_name(task)), table);
  }
  if (per_task.size() >= 2) {
    std::vector<std::pair<std::string, FeatureTable>> non_empty;
    for (const auto& p : per_task) {
      if (p.second.n_rows() > 0) non_empty.push_back(p);
    }
    if (non_empty.size() >= 2) {
      try {
        out.tables["combined"] = combine_tasks(non_empty, &out.warnings);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyIntersection) throw;
        out.warnings.push_back("combined: no subject has every task; combined table skipped");
      }
    }
  }
  for (auto& [name, table] : per_task) out.tables[name] = std::move(table);

  fs::create_directories(config.out);
  for (const auto& [name, table] : out.tables) {
    const auto path = features_path(config.out, name);
    write_feature_csv(path, table);
    out.written.push_back(path);
  }
  std::string warn_text;
  for (const auto& w : out.warnings) warn_text += w + "\n";
  const auto warn_path = config.out / "warnings.txt";
  write_text_file(warn_path, warn_text);
  out.written.push_back(warn_path);
  return out;
}

std::vector<AnalyzeRow> analyze_table(const FeatureTable& table) {
  table.check();
  std::vector<AnalyzeRow> rows(table.n_features());
  for (std::size_t f = 0; f < table.n_features(); ++f) {
    AnalyzeRow& row = rows[f];
    row.feature = table.feature_names[f];
    std::vector<double> hc, lbd, values;
    std::vector<double> labels;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      const double v = table.rows[r][f];
      if (is_missing(v)) continue;
      (table.labels[r] == 1 ? lbd : hc).push_back(v);
      values.push_back(v);
      labels.push_back(static_cast<double>(table.labels[r]));
    }
    row.n_hc = hc.size();
    row.n_lbd = lbd.size();
    if (!hc.empty() && !lbd.empty()) {
      const auto mw = mann_whitney_u(hc, lbd);
      row.u = mw.statistic;
      row.p_u = mw.p_value;
      try {
        const auto sp = spearman_rho(values, labels);
        row.rho = sp.statistic;
        row.p_rho = sp.p_value;
      } catch (const Error&) {
        // Constant feature: rho undefined.
      }
    }
  }
  std::vector<double> p(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) p[i] = rows[i].p_u;
  const auto q = benjamini_hochberg(p);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].q_bh = q[i];
  std::stable_sort(rows.begin(), rows.end(), [](const AnalyzeRow& a, const AnalyzeRow& b) {
    const bool ma = is_missing(a.p_u), mb = is_missing(b.p_u);
    if (ma != mb) return mb;
    return !ma && a.p_u < b.p_u;
  });
  return rows;
}

std::string analyze_csv(const std::vector<AnalyzeRow>& rows) {
  std::string out = "feature,n_hc,n_lbd,U,p_U,rho,p_rho,q_bh\n";
  for (const auto& r : rows) {
    out += r.feature + "," + std::to_string(r.n_hc) + "," + std::to_string(r.n_lbd) + "," +
           format_number(r.u) + "," + format_number(r.p_u) + "," + format_number(r.rho) + "," +
           format_number(r.p_rho) + "," + format_number(r.q_bh) + "\n";
  }
  return out;
}

std::string covariate_correlation_csv(
    const FeatureTable& table,
    const std::map<std::string, std::map<std::string, double>>& covariates_by_subject) {
  std::set<std::string> names;
  for (const auto& [id, covs] : covariates_by_subject) {
    for (const auto& [name, v] : covs) names.insert(name);
  }
  std::string out = "feature";
  for (const auto& n : names) out += ",rho_" + n + ",p_" + n;
  out += "\n";
  for (std::size_t f = 0; f < table.n_features(); ++f) {
    out += table.feature_names[f];
    for (const auto& n : names) {
      std::vector<double> x, y;
      for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const double v = table.rows[r][f];
        const auto it = covariates_by_subject.find(table.subject_ids[r]);
        if (is_missing(v) || it == covariates_by_subject.end()) continue;
        const auto c = it->second.find(n);
        if (c == it->second.end() || std::isnan(c->second)) continue;
        x.push_back(v);
        y.push_back(c->second);
      }
      double rho = kMissing, p = kMissing;
      try {
        const auto sp = spearman_rho(x, y);
        rho = sp.statistic;
        p = sp.p_value;
      } catch (const Error&) {
      }
      out += "," + format_number(rho) + "," + format_number(p);
    }
    out += "\n";
  }
  return out;
}

std::vector<AnalyzeRow> cmd_analyze(const fs::path& features_csv, const RunConfig& config) {
  const FeatureTable table = read_feature_csv(features_csv);
  const auto rows = analyze_table(table);
  const std::string name = stem_name(features_csv);
  write_text_file(config.out / ("stats_" + name + ".csv"), analyze_csv(rows));
  if (!config.manifest.empty()) {
    const CohortManifest manifest = load_manifest(config.manifest);
    std::map<std::string, std::map<std::string, double>> covs;
    for (const auto& e : manifest.entries) {
      if (!e.covariates.empty()) covs[e.subject_id] = e.covariates;
    }
    if (!covs.empty()) {
      write_text_file(config.out / ("correlations_" + name + ".csv"),
                      covariate_correlation_csv(table, covs));
    }
  }
  return rows;
}

namespace {

json grids_json(const SearchGrids& g) {
  return json{{"learning_rate", g.learning_rate},
              {"gamma", g.gamma},
              {"max_depth", g.max_depth},
              {"subsample", g.subsample},
              {"colsample_bylevel", g.colsample_bylevel},
              {"colsample_bytree", g.colsample_bytree},
              {"min_child_weight", g.min_child_weight},
              {"scale_pos_weight", g.scale_pos_weight}};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string run_json(const RunConfig& config, const std::map<std::string, ProtocolResult>& results) {
  json doc;
  doc["profile"] = profile_name(config.profile);
  doc["manifest"] = config.manifest.generic_string();
  doc["out"] = config.out.generic_string();
  doc["tasks"] = config.tasks;
  doc["search"] = json{{"iterations", config.iterations}, {"grids", grids_json(config.grids)}};
  doc["cv"] = json{{"k", config.cv.k}, {"repeats", config.cv.repeats}};
  doc["permutations"] = config.permutations;
  doc["seed"] = config.seed;
  doc["strict"] = config.strict;
  doc["threshold_objective"] = objective_name(config.objective);
  doc["features"] = json{{"units_per_mm", config.features.units_per_mm},
                         {"pen_stop_min_duration", config.features.pen_stop_min_duration},
                         {"pen_stop_radius_mm", config.features.pen_stop_radius_mm},
                         {"entropy_bins", config.features.entropy_bins}};
  json res = json::object();
  for (const auto& [task, r] : results) {
    res[task] = json{{"best_params", json::parse(to_json(r.search.best))},
                     {"best_cv_bacc", r.search.best_score},
                     {"best_iteration", r.search.best_iteration},
                     {"threshold", r.report.threshold},
                     {"loocv_bacc", opt_json(r.report.metrics.bacc)},
                     {"auc", r.report.auc},
                     {"permutation_p", opt_json(r.report.permutation_p)}};
  }
  doc["results"] = std::move(res);
  return doc.dump(2) + "\n";
}

std::string report_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "task,MCC,BACC,SEN,SPE,PRE,F1,threshold,p,AUC\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : reports) {
    out += r.task + "," + cell(r.metrics.mcc) + "," + cell(r.metrics.bacc) + "," +
           cell(r.metrics.sen) + "," + cell(r.metrics.spe) + "," + cell(r.metrics.pre) + "," +
           cell(r.metrics.f1) + "," + format_number(r.threshold) + "," + cell(r.permutation_p) +
           "," + format_number(r.auc) + "\n";
  }
  return out;
}

std::string roc_csv(const EvaluationReport& report) {
  std::string out = "threshold,FPR,TPR\n";
  for (const auto& p : report.roc) {
    out += format_number(p.threshold) + "," + format_number(p.fpr) + "," + format_number(p.tpr) + "\n";
  }
  return out;
}

TrainOutput cmd_train(const RunConfig& config) {
  config.validate();
  std::map<std::string, FeatureTable> tables;
  bool need_extract = false;
  for (const auto& task : config.tasks) {
    if (!fs::exists(features_path(config.out, task))) need_extract = true;
  }
  if (need_extract) {
    if (config.manifest.empty()) {
      throw Error(ErrorCode::InvalidConfig, "feature CSVs missing and no manifest given",
                  config.out.string());
    }
    auto ex = cmd_extract(config);
    tables = std::move(ex.tables);
  } else {
    for (const auto& task : config.tasks) tables[task] = read_feature_csv(features_path(config.out, task));
  }

  ProtocolConfig pc;
  pc.grids = config.grids;
  pc.iterations = config.iterations;
  pc.cv = config.cv;
  pc.permutations = config.permutations;
  pc.seed = config.seed;
  pc.objective = config.objective;

  TrainOutput out;
  std::vector<EvaluationReport> reports;
  for (const auto& task : config.tasks) {
    const auto it = tables.find(task);
    if (it == tables.end()) {
      throw Error(ErrorCode::InvalidConfig, "no feature table for task", task);
    }
    ProtocolResult res = run_protocol(it->second, pc, task);
    const auto model_path = config.out / ("model_" + task + ".json");
    write_text_file(model_path, serialize_model(res.model));
    const auto roc_path = config.out / ("roc_" + task + ".csv");
    write_text_file(roc_path, roc_csv(res.report));
    out.written.push_back(model_path);
    out.written.push_back(roc_path);
    reports.push_back(res.report);
    out.results.emplace(task, std::move(res));
  }
  const auto report_path = config.out / "report.csv";
  write_text_file(report_path, report_csv(reports));
  const auto run_path = config.out / "run.json";
  write_text_file(run_path, run_json(config, out.results));
  out.written.push_back(report_path);
  out.written.push_back(run_path);
  return out;
}

EvaluateOutput cmd_evaluate(const fs::path& model_json, const fs::path& features_csv,
                            const RunConfig& config) {
  const BoostedEnsemble model = parse_model(read_text_file(model_json));
  const FeatureTable table = read_feature_csv(features_csv);
  std::map<std::string, std::size_t> column;
  for (std::size_t f = 0; f < table.n_features(); ++f) column[table.feature_names[f]] = f;

  EvaluateOutput out;
  std::string csv = "subject_id,label,probability,prediction\n";
  std::vector<double> x(model.feature_names.size());
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t f = 0; f < x.size(); ++f) {
      const auto it = column.find(model.feature_names[f]);
      x[f] = it == column.end() ? kMissing : table.rows[r][it->second];
    }
    const double p = predict_proba(model, x);
    out.probs.push_back(p);
    csv += table.subject_ids[r] + "," + std::to_string(table.labels[r]) + "," + format_number(p) +
           "," + (p >= model.decision_threshold ? "1" : "0") + "\n";
  }
  out.cm = confusion(out.probs, table.labels, model.decision_threshold);
  if (out.cm.total() > 0) out.metrics = metrics(out.cm);
  write_text_file(config.out / ("predictions_" + stem_name(features_csv) + ".csv"), csv);
  return out;
}

CohortManifest cmd_synth(const CohortSpec& spec, const fs::path& out_dir) {
  return gen_cohort(spec, out_dir);
}

}  // namespace graphokit
