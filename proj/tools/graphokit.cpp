// graphokit command-line entry point.
//
//   graphokit synth    --out DIR [--n-hc N] [--n-lbd N] [--delta D] [--seed S]
//   graphokit extract  --manifest FILE --out DIR [--tasks ...] [--strict]
//   graphokit analyze  --features CSV --out DIR [--manifest FILE]
//   graphokit train    --out DIR [--manifest FILE] [--profile paper|desk] ...
//   graphokit evaluate --model JSON --features CSV --out DIR
//
// Errors are reported on stderr as one JSON object; the exit code is 1 for
// library errors and 2 for usage errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphokit/commands.hpp"
#include "graphokit/error.hpp"
#include "graphokit/text.hpp"

namespace {

using namespace graphokit;

void report_error(std::string_view code, std::string_view message, std::string_view context) {
  nlohmann::json j{{"error", code}, {"message", message}};
  if (!context.empty()) j["context"] = context;
  std::cerr << j.dump() << "\n";
}

std::vector<std::string> split_tasks(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonFlags {
  std::string manifest;
  std::string out = ".";
  std::string tasks;
  std::string profile = "paper";
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> permutations;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string objective = "youden";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--manifest", f.manifest, "Cohort manifest (JSON)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--tasks", f.tasks, "Comma list of spiral,sentence,pentagons,combined");
  cmd->add_option("--profile", f.profile, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--iterations", f.iterations, "Randomized-search iterations");
  cmd->add_option("--permutations", f.permutations, "Permutation-test replicates");
  cmd->add_option("--seed", f.seed, "Seed (falls back to GRAPHOKIT_SEED)");
  cmd->add_flag("--strict", f.strict, "Reject malformed recordings instead of repairing");
  cmd->add_option("--threshold-objective", f.objective, "youden or f1")
      ->check(CLI::IsMember({"youden", "f1"}));
}

RunConfig make_config(const CommonFlags& f) {
  RunConfig c = RunConfig::for_profile(*parse_profile(f.profile));
  c.manifest = f.manifest;
  c.out = f.out;
  if (!f.tasks.empty()) c.tasks = split_tasks(f.tasks);
  if (f.iterations) c.iterations = *f.iterations;
  if (f.permutations) c.permutations = *f.permutations;
  c.seed = resolve_seed(f.seed);
  c.strict = f.strict;
  c.objective = *parse_objective(f.objective);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handwriting feature extraction and classification toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
  CohortSpec spec;
  std::string synth_out = ".";
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--n-hc", spec.n_hc, "Healthy controls");
  synth->add_option("--n-lbd", spec.n_lbd, "Impaired subjects");
  synth->add_option("--delta", spec.impairment_delta, "Impairment strength (0 = null cohort)");
  synth->add_option("--seed", synth_seed, "Seed (falls back to GRAPHOKIT_SEED)");

  auto* extract = app.add_subcommand("extract", "Extract per-task feature CSVs");
  add_common(extract, flags);

  auto* analyze = app.add_subcommand("analyze", "Mann-Whitney / Spearman screening");
  std::string features_csv;
  add_common(analyze, flags);
  analyze->add_option("--features", features_csv, "Feature CSV")->required();

  auto* train = app.add_subcommand("train", "Search, tune, LOOCV and permutation test");
  bool dry_run = false;
  add_common(train, flags);
  train->add_flag("--dry-run", dry_run, "Validate the configuration and write run.json only");

  auto* evaluate = app.add_subcommand("evaluate", "Apply a saved model to a feature CSV");
  std::string model_json;
  add_common(evaluate, flags);
  evaluate->add_option("--model", model_json, "Model JSON")->required();
  evaluate->add_option("--features", features_csv, "Feature CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("UsageError", e.what(), "");
    return 2;
  }

  try {
    if (synth->parsed()) {
      spec.seed = resolve_seed(synth_seed);
      const auto manifest = cmd_synth(spec, synth_out);
      std::cout << "wrote " << manifest.entries.size() << " subjects to " << synth_out << "\n";
    } else if (extract->parsed()) {
      const auto out = cmd_extract(make_config(flags));
      for (const auto& [name, table] : out.tables) {
        std::cout << name << ": " << table.n_rows() << " x " << table.n_features() << "\n";
      }
      if (!out.warnings.empty()) std::cout << out.warnings.size() << " warnings\n";
    } else if (analyze->parsed()) {
      const auto rows = cmd_analyze(features_csv, make_config(flags));
      std::cout << "analyzed " << rows.size() << " features\n";
    } else if (train->parsed()) {
      const RunConfig config = make_config(flags);
      if (dry_run) {
        write_text_file(config.out / "run.json", run_json(config, {}));
        std::cout << "configuration valid; wrote run.json\n";
      } else {
        const auto out = cmd_train(config);
        std::cout << report_csv([&] {
          std::vector<EvaluationReport> reps;
          for (const auto& task : config.tasks) reps.push_back(out.results.at(task).report);
          return reps;
        }());
      }
    } else if (evaluate->parsed()) {
      const auto out = cmd_evaluate(model_json, features_csv, make_config(flags));
      std::cout << "BACC " << (out.metrics.bacc ? format_number(*out.metrics.bacc) : "NA") << "\n";
    }
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.what(), e.context());
    return 1;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what(), "");
    return 1;
  }
  return 0;
}
