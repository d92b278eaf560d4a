#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphokit/feature_table.hpp"

namespace graphokit {

struct HyperParams {
  double learning_rate = 0.3;
  double gamma = 0.0;
  int max_depth = 6;
  double subsample = 1.0;
  double colsample_bylevel = 1.0;
  double colsample_bytree = 1.0;
  double min_child_weight = 1.0;
  double scale_pos_weight = 1.0;
  int n_estimators = 100;
  double lambda_l2 = 1.0;
  std::uint64_t seed = 0;

  // Throws InvalidParams naming the first violated bound.
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

struct TreeNode {
  // Internal nodes: feature >= 0, rows with x < threshold go left, missing
  // values follow default_left. Leaves: feature == -1 and `weight` is used.
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
  int left = -1;
  int right = -1;
  double weight = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double leaf_value(std::span<const double> x) const;
  int depth() const;
};

struct BoostedEnsemble {
  std::vector<RegressionTree> trees;
  double base_score_logit = 0.0;
  HyperParams params;
  std::vector<std::string> feature_names;
  double decision_threshold = 0.5;

  // base_score_logit + sum of learning_rate * leaf weight.
  double margin(std::span<const double> x) const;
};

// Throws DimensionMismatch when x does not match feature_names.
double predict_proba(const BoostedEnsemble& model, std::span<const double> x);
int predict_label(const BoostedEnsemble& model, std::span<const double> x);

// Newton boosting on the logistic loss. `rows` may contain kMissing. When
// `loss_trace` is given it receives the weighted training log-loss after each
// round.
BoostedEnsemble fit(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                    const HyperParams& params, std::vector<std::string> feature_names = {},
                    std::vector<double>* loss_trace = nullptr);
BoostedEnsemble fit(const FeatureTable& table, const HyperParams& params,
                    std::vector<double>* loss_trace = nullptr);

double sigmoid(double z);

// Mean log-loss with positives weighted by `pos_weight`.
double weighted_log_loss(std::span<const double> probs, std::span<const int> labels,
                         double pos_weight = 1.0);

std::string to_json(const HyperParams& params);
HyperParams hyper_params_from_json(std::string_view text);

std::string serialize_model(const BoostedEnsemble& model);
BoostedEnsemble parse_model(std::string_view text);

}  // namespace graphokit
