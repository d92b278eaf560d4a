#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphokit/cohort.hpp"
#include "graphokit/extract.hpp"
#include "graphokit/feature_table.hpp"
#include "graphokit/pipeline.hpp"
#include "graphokit/synth.hpp"

namespace graphokit {

enum class Profile { Paper, Desk };

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path out = ".";
  std::vector<std::string> tasks{"spiral", "sentence", "pentagons", "combined"};
  Profile profile = Profile::Paper;
  std::size_t iterations = 1000;
  CvSetup cv;
  std::size_t permutations = 1000;
  std::uint64_t seed = 0;
  bool strict = false;
  ThresholdObjective objective = ThresholdObjective::Youden;
  SearchGrids grids = SearchGrids::paper();
  FeatureConfig features;

  // Profile defaults for iterations / permutations; CV stays 5 x 10.
  static RunConfig for_profile(Profile profile);

  // Throws InvalidConfig.
  void validate() const;
};

std::string_view profile_name(Profile profile) noexcept;
std::optional<Profile> parse_profile(std::string_view text) noexcept;
std::optional<ThresholdObjective> parse_objective(std::string_view text) noexcept;
std::string_view objective_name(ThresholdObjective objective) noexcept;

// Seed precedence: explicit value, then GRAPHOKIT_SEED, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed);

struct ExtractOutput {
  std::map<std::string, FeatureTable> tables;  // task name (and "combined") -> table
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> written;
};

// Loads the manifest, extracts every task and writes features_<task>.csv,
// features_combined.csv (when at least two tasks share subjects) and
// warnings.txt into config.out. Nothing is written when the manifest has no
// subjects.
ExtractOutput cmd_extract(const RunConfig& config);

struct AnalyzeRow {
  std::string feature;
  std::size_t n_hc = 0;
  std::size_t n_lbd = 0;
  double u = kMissing;
  double p_u = kMissing;
  double rho = kMissing;
  double p_rho = kMissing;
  double q_bh = kMissing;
};

// Per-feature Mann-Whitney and Spearman (feature vs label) on the observed
// values, BH q-values over p(U), sorted by p(U) ascending (missing last).
std::vector<AnalyzeRow> analyze_table(const FeatureTable& table);
std::string analyze_csv(const std::vector<AnalyzeRow>& rows);

// Spearman rho and p between each feature and each covariate.
std::string covariate_correlation_csv(const FeatureTable& table,
                                      const std::map<std::string, std::map<std::string, double>>&
                                          covariates_by_subject);

// Writes stats_<name>.csv next to config.out (and correlations_<name>.csv
// when the manifest carries covariates). Returns the analysis rows.
std::vector<AnalyzeRow> cmd_analyze(const std::filesystem::path& features_csv,
                                    const RunConfig& config);

// run.json content. `results` may be empty (dry run).
std::string run_json(const RunConfig& config, const std::map<std::string, ProtocolResult>& results);

std::string report_csv(const std::vector<EvaluationReport>& reports);
std::string roc_csv(const EvaluationReport& report);

struct TrainOutput {
  std::map<std::string, ProtocolResult> results;
  std::vector<std::filesystem::path> written;
};

// Runs the full protocol for every configured task, reading
// features_<task>.csv from config.out (extracting first if absent), and writes
// model_<task>.json, roc_<task>.csv, report.csv and run.json.
TrainOutput cmd_train(const RunConfig& config);

struct EvaluateOutput {
  ConfusionMatrix cm;
  Metrics metrics;
  std::vector<double> probs;
};

// Applies a saved model at its stored threshold to a feature CSV, writing
// predictions_<name>.csv into config.out.
EvaluateOutput cmd_evaluate(const std::filesystem::path& model_json,
                            const std::filesystem::path& features_csv, const RunConfig& config);

CohortManifest cmd_synth(const CohortSpec& spec, const std::filesystem::path& out_dir);

}  // namespace graphokit
