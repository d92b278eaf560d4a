#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphokit/feature_table.hpp"
#include "graphokit/gbt.hpp"
#include "graphokit/seed.hpp"

namespace graphokit {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Metrics whose denominator is zero are std::nullopt.
struct Metrics {
  std::optional<double> mcc;
  std::optional<double> bacc;
  std::optional<double> sen;
  std::optional<double> spe;
  std::optional<double> pre;
  std::optional<double> f1;
};

// Throws EmptyMatrix when all counts are zero.
Metrics metrics(const ConfusionMatrix& cm);

// Positive prediction when prob >= threshold.
ConfusionMatrix confusion(std::span<const double> probs, std::span<const int> labels,
                          double threshold);

struct CvSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per repeat, each class is shuffled and dealt round-robin across the k
// folds (positives first, then negatives). Throws ClassTooSmall when a class
// has fewer than k members.
std::vector<CvSplit> stratified_kfold(std::span<const int> labels, std::size_t k = 5,
                                      std::size_t repeats = 10, std::uint64_t seed = 0);

struct SearchGrids {
  std::vector<double> learning_rate;
  std::vector<double> gamma;
  std::vector<int> max_depth;
  std::vector<double> subsample;
  std::vector<double> colsample_bylevel;
  std::vector<double> colsample_bytree;
  std::vector<double> min_child_weight;
  std::vector<double> scale_pos_weight;

  // The published search space.
  static SearchGrids paper();
  void validate() const;
};

struct CvSetup {
  std::size_t k = 5;
  std::size_t repeats = 10;
};

struct SearchResult {
  HyperParams best;
  double best_score = 0.0;
  std::size_t best_iteration = 0;
  std::vector<double> scores;  // one per trial
};

// Mean BACC at threshold 0.5 over the given splits.
double cv_mean_bacc(const FeatureTable& table, const HyperParams& params,
                    std::span<const CvSplit> splits);

// Trials draw each parameter uniformly from its grid and fit with their own
// derived seed. A trial whose fits throw scores 0. Ties keep the earliest
// trial.
SearchResult random_search(const FeatureTable& table, const SearchGrids& grids,
                           std::size_t iterations, std::uint64_t seed, CvSetup cv = {});
SearchResult random_search(const FeatureTable& table, const SearchGrids& grids,
                           std::size_t iterations, std::uint64_t seed, CvSetup cv,
                           int n_estimators);

// Held-out probability of each subject averaged over the repeats.
std::vector<double> cv_probabilities(const FeatureTable& table, const HyperParams& params,
                                     std::span<const CvSplit> splits);

enum class ThresholdObjective { Youden, F1 };

// Best midpoint between adjacent distinct probabilities; ties go to the
// candidate nearest 0.5. Throws DegenerateProbs when all probabilities are
// equal and SingleClass when a class is absent.
double tune_threshold(std::span<const double> probs, std::span<const int> labels,
                      ThresholdObjective objective = ThresholdObjective::Youden);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

// One point per distinct probability plus a closing point above the maximum,
// sorted by threshold ascending.
std::vector<RocPoint> roc_curve(std::span<const double> probs, std::span<const int> labels);
double auc(std::span<const RocPoint> roc);

struct EvaluationReport {
  std::string task;
  ConfusionMatrix cm;
  Metrics metrics;
  double threshold = 0.5;
  std::vector<RocPoint> roc;
  double auc = 0.0;
  std::optional<double> permutation_p;
  HyperParams params;
  std::vector<double> held_out_probs;
};

EvaluationReport loocv_evaluate(const FeatureTable& table, const HyperParams& params,
                                double threshold);

using PermutationScorer = std::function<double(const FeatureTable&)>;

// p = (b + 1) / (m + 1), b = permuted scores >= observed. Each replicate
// shuffles the labels with its own derived seed and calls `scorer`.
double permutation_test(const FeatureTable& table, double observed, std::size_t m,
                        std::uint64_t seed, const PermutationScorer& scorer);

struct PostSearchOptions {
  CvSetup cv;
  std::uint64_t seed = 0;
  ThresholdObjective objective = ThresholdObjective::Youden;
};

// CV probabilities -> tuned threshold -> LOOCV, with fixed params.
EvaluationReport evaluate_params(const FeatureTable& table, const HyperParams& params,
                                 const PostSearchOptions& options);

// LOOCV BACC of evaluate_params; failures score 0. This is the statistic the
// permutation test recomputes on shuffled labels.
double post_search_score(const FeatureTable& table, const HyperParams& params,
                         const PostSearchOptions& options);

// Column-wise concatenation over the subjects present in every table, in
// the order of the first table. Feature names gain a `<task>.` prefix unless
// they already carry it.
FeatureTable combine_tasks(const std::vector<std::pair<std::string, FeatureTable>>& tables,
                           std::vector<std::string>* warnings = nullptr);

struct ProtocolConfig {
  SearchGrids grids = SearchGrids::paper();
  std::size_t iterations = 1000;
  CvSetup cv;
  std::size_t permutations = 1000;
  std::uint64_t seed = 0;
  ThresholdObjective objective = ThresholdObjective::Youden;
  int n_estimators = 100;

  void validate() const;
};

struct ProtocolResult {
  SearchResult search;
  EvaluationReport report;
  BoostedEnsemble model;  // refit on all subjects, tuned threshold attached
};

// random_search -> tune_threshold -> loocv_evaluate -> permutation_test.
ProtocolResult run_protocol(const FeatureTable& table, const ProtocolConfig& config,
                            const std::string& task);

}  // namespace graphokit
