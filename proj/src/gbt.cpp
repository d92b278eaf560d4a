#include "graphokit/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include <json.hpp>

#include "graphokit/error.hpp"

namespace graphokit {

using nlohmann::json;

void HyperParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidParams, what); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(gamma >= 0.0)) fail("gamma must be >= 0");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must be in (0, 1]");
  if (!(colsample_bylevel > 0.0 && colsample_bylevel <= 1.0)) fail("colsample_bylevel must be in (0, 1]");
  if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) fail("colsample_bytree must be in (0, 1]");
  if (!(min_child_weight >= 0.0)) fail("min_child_weight must be >= 0");
  if (!(scale_pos_weight > 0.0)) fail("scale_pos_weight must be > 0");
  if (n_estimators < 1) fail("n_estimators must be >= 1");
  if (!(lambda_l2 >= 0.0)) fail("lambda_l2 must be >= 0");
}

double RegressionTree::leaf_value(std::span<const double> x) const {
  if (nodes.empty()) return 0.0;
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    const double v = x[static_cast<std::size_t>(node->feature)];
    const bool go_left = std::isnan(v) ? node->default_left : v < node->threshold;
    node = &nodes[static_cast<std::size_t>(go_left ? node->left : node->right)];
  }
  return node->weight;
}

int RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

double BoostedEnsemble::margin(std::span<const double> x) const {
  double m = base_score_logit;
  for (const auto& tree : trees) m += params.learning_rate * tree.leaf_value(x);
  return m;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double predict_proba(const BoostedEnsemble& model, std::span<const double> x) {
  if (x.size() != model.feature_names.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(model.feature_names.size()) + " features, got " +
                    std::to_string(x.size()));
  }
  // Keep the result strictly inside (0, 1) even for extreme margins.
  constexpr double eps = 1e-15;
  return std::clamp(sigmoid(model.margin(x)), eps, 1.0 - eps);
}

int predict_label(const BoostedEnsemble& model, std::span<const double> x) {
  return predict_proba(model, x) >= model.decision_threshold ? 1 : 0;
}

double weighted_log_loss(std::span<const double> probs, std::span<const int> labels,
                         double pos_weight) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "probability/label length mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], 1e-15, 1.0 - 1e-15);
    const double w = labels[i] == 1 ? pos_weight : 1.0;
    num += w * (labels[i] == 1 ? -std::log(p) : -std::log1p(-p));
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

namespace {

struct GradStats {
  double g = 0.0;
  double h = 0.0;
  void add(double gi, double hi) {
    g += gi;
    h += hi;
  }
};

struct Split {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
  GradStats left;
};

// Chooses max(1, round(ratio * pool.size())) entries of `pool`, returned in
// ascending order.
std::vector<std::uint32_t> sample_subset(const std::vector<std::uint32_t>& pool, double ratio,
                                         std::mt19937_64& rng) {
  if (ratio >= 1.0) return pool;
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pool.size()))));
  std::vector<std::uint32_t> v = pool;
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, v.size() - 1);
    std::swap(v[i], v[pick(rng)]);
  }
  v.resize(std::min(k, v.size()));
  std::sort(v.begin(), v.end());
  return v;
}

class Trainer {
 public:
  Trainer(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
          const HyperParams& params)
      : n_(rows.size()), d_(rows.front().size()), labels_(labels), p_(params), rng_(params.seed) {
    cols_.assign(d_, std::vector<double>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t f = 0; f < d_; ++f) cols_[f][i] = rows[i][f];
    }
    sorted_.resize(d_);
    sorted_vals_.resize(d_);
    missing_.resize(d_);
    for (std::size_t f = 0; f < d_; ++f) {
      const auto& c = cols_[f];
      for (std::uint32_t i = 0; i < n_; ++i) {
        (std::isnan(c[i]) ? missing_[f] : sorted_[f]).push_back(i);
      }
      std::stable_sort(sorted_[f].begin(), sorted_[f].end(),
                       [&](std::uint32_t a, std::uint32_t b) { return c[a] < c[b]; });
      const auto& s = sorted_[f];
      sorted_vals_[f].reserve(s.size());
      for (auto i : s) sorted_vals_[f].push_back(c[i]);
      if (!s.empty() && c[s.front()] < c[s.back()]) {
        usable_.push_back(static_cast<std::uint32_t>(f));
      }
    }
    usable_mask_.assign(d_, 0);
    for (auto f : usable_) usable_mask_[f] = 1;
    if (usable_.empty()) {
      throw Error(ErrorCode::NoUsableFeature, "no feature has two distinct observed values");
    }
    all_rows_.resize(n_);
    std::iota(all_rows_.begin(), all_rows_.end(), 0u);
    all_features_.resize(d_);
    std::iota(all_features_.begin(), all_features_.end(), 0u);
    grad_.resize(n_);
    hess_.resize(n_);
    pos_.resize(n_);
  }

  void set_gradients(std::span<const double> margin) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double prob = sigmoid(margin[i]);
      const double w = labels_[i] == 1 ? p_.scale_pos_weight : 1.0;
      grad_[i] = w * (prob - labels_[i]);
      hess_[i] = w * prob * (1.0 - prob);
    }
  }

  RegressionTree build_tree() {
    const auto sample_rows = sample_subset(all_rows_, p_.subsample, rng_);
    const auto tree_features = sample_subset(all_features_, p_.colsample_bytree, rng_);

    RegressionTree tree;
    std::vector<GradStats> stats(1);
    std::fill(pos_.begin(), pos_.end(), -1);
    for (auto i : sample_rows) {
      pos_[i] = 0;
      stats[0].add(grad_[i], hess_[i]);
    }
    tree.nodes.emplace_back();

    // Per tree feature, the sampled rows in value order, grouped into one
    // contiguous segment per frontier node.
    std::vector<std::uint32_t> tree_usable;
    std::set_intersection(tree_features.begin(), tree_features.end(), usable_.begin(),
                          usable_.end(), std::back_inserter(tree_usable));
    const bool all_rows = sample_rows.size() == n_;
    work_.resize(d_);
    for (auto f : tree_usable) {
      Column& col = work_[f];
      col.seg.assign({0, 0});
      if (all_rows) {
        col.idx_p = sorted_[f].data();
        col.val_p = sorted_vals_[f].data();
        col.seg[1] = sorted_[f].size();
        continue;
      }
      col.idx.clear();
      col.val.clear();
      const auto& idx = sorted_[f];
      const auto& val = sorted_vals_[f];
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (pos_[idx[j]] < 0) continue;
        col.idx.push_back(idx[j]);
        col.val.push_back(val[j]);
      }
      col.idx_p = col.idx.data();
      col.val_p = col.val.data();
      col.seg[1] = col.idx.size();
    }

    std::vector<int> frontier{0};
    for (int depth = 0; !frontier.empty(); ++depth) {
      std::vector<char> expandable(frontier.size(), 0);
      bool any = false;
      if (depth < p_.max_depth) {
        for (std::size_t k = 0; k < frontier.size(); ++k) {
          if (stats[static_cast<std::size_t>(frontier[k])].h >= 2.0 * p_.min_child_weight) {
            expandable[k] = 1;
            any = true;
          }
        }
      }
      std::vector<Split> best(frontier.size());
      if (any) {
        const auto level_features = sample_subset(tree_features, p_.colsample_bylevel, rng_);
        find_splits(level_features, frontier, expandable, stats, best);
      }

      std::vector<int> next;
      std::vector<char> split(frontier.size(), 0);
      for (std::size_t k = 0; k < frontier.size(); ++k) {
        const int node = frontier[k];
        const Split& s = best[k];
        if (s.feature < 0) {
          const auto& st = stats[static_cast<std::size_t>(node)];
          tree.nodes[static_cast<std::size_t>(node)].weight = -st.g / (st.h + p_.lambda_l2);
          continue;
        }
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        stats.push_back(s.left);
        const auto& parent = stats[static_cast<std::size_t>(node)];
        stats.push_back(GradStats{parent.g - s.left.g, parent.h - s.left.h});
        TreeNode& tn = tree.nodes[static_cast<std::size_t>(node)];
        tn.feature = s.feature;
        tn.threshold = s.threshold;
        tn.default_left = s.default_left;
        tn.left = left;
        tn.right = left + 1;
        split[k] = 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;

      std::vector<char> scan_next(next.size(), 0);
      bool any_next = false;
      if (depth + 1 < p_.max_depth) {
        for (std::size_t c = 0; c < next.size(); ++c) {
          if (stats[static_cast<std::size_t>(next[c])].h >= 2.0 * p_.min_child_weight) {
            scan_next[c] = 1;
            any_next = true;
          }
        }
      }
      if (any_next) {
        // side_: 0 left, 1 right, 2 dropped (leaf or child that will not be scanned).
        side_.assign(n_, 2);
        for (std::size_t i = 0; i < n_; ++i) {
          const int node = pos_[i];
          if (node < 0) continue;
          const TreeNode& tn = tree.nodes[static_cast<std::size_t>(node)];
          if (tn.left < 0) {
            pos_[i] = -1;
            continue;
          }
          const double v = cols_[static_cast<std::size_t>(tn.feature)][i];
          const bool go_left = std::isnan(v) ? tn.default_left : v < tn.threshold;
          const std::size_t c = child_slot(next, go_left ? tn.left : tn.right);
          pos_[i] = scan_next[c] ? next[c] : -1;
          if (scan_next[c]) side_[i] = go_left ? 0 : 1;
        }
        for (auto f : tree_usable) partition_column(work_[f], split);
      }
      frontier = std::move(next);
      if (!any_next) {
        for (int node : frontier) {
          const auto& st = stats[static_cast<std::size_t>(node)];
          tree.nodes[static_cast<std::size_t>(node)].weight = -st.g / (st.h + p_.lambda_l2);
        }
        break;
      }
    }
    return tree;
  }

 private:
  struct Column {
    const std::uint32_t* idx_p = nullptr;
    const double* val_p = nullptr;
    std::vector<std::uint32_t> idx;  // owned storage once partitioned
    std::vector<double> val;
    std::vector<std::size_t> seg;  // frontier.size() + 1 offsets
  };

  // Children of split nodes sit in `next` as consecutive pairs.
  static std::size_t child_slot(const std::vector<int>& next, int child) {
    return static_cast<std::size_t>(child - next.front());
  }

  // Splits every segment of a split node into its left then right child
  // segment, keeping value order. Dropped rows leave empty segments.
  void partition_column(Column& col, const std::vector<char>& split) {
    const std::size_t total = col.seg.back();
    scratch_idx_.resize(total);
    scratch_val_.resize(total);
    scratch_seg_.assign(1, 0);
    std::size_t w = 0;
    for (std::size_t k = 0; k + 1 < col.seg.size(); ++k) {
      if (!split[k]) continue;
      const std::size_t b = col.seg[k];
      const std::size_t e = col.seg[k + 1];
      std::size_t n_left = 0;
      std::size_t n_right = 0;
      for (std::size_t j = b; j < e; ++j) {
        const unsigned char sd = side_[col.idx_p[j]];
        n_left += sd == 0;
        n_right += sd == 1;
      }
      std::size_t wl = w;
      std::size_t wr = w + n_left;
      for (std::size_t j = b; j < e; ++j) {
        const std::uint32_t i = col.idx_p[j];
        const unsigned char sd = side_[i];
        if (sd == 2) continue;
        std::size_t& dst = sd == 0 ? wl : wr;
        scratch_idx_[dst] = i;
        scratch_val_[dst] = col.val_p[j];
        ++dst;
      }
      scratch_seg_.push_back(w + n_left);
      w += n_left + n_right;
      scratch_seg_.push_back(w);
    }
    scratch_idx_.resize(w);
    scratch_val_.resize(w);
    std::swap(col.idx, scratch_idx_);
    std::swap(col.val, scratch_val_);
    std::swap(col.seg, scratch_seg_);
    col.idx_p = col.idx.data();
    col.val_p = col.val.data();
  }

  template <bool kHasMissing>
  void scan_segment(std::uint32_t f, const Column& col, std::size_t k, const GradStats& total,
                    const GradStats& miss, Split& best) const {
    const double lambda = p_.lambda_l2;
    const double mcw = p_.min_child_weight;
    const double parent_score = total.g * total.g / (total.h + lambda);
    // Slightly loose so the exact gain below makes the final call.
    double target = (2.0 * (best.gain + p_.gamma) + parent_score) * (1.0 - 1e-9);
    const std::size_t b = col.seg[k];
    const std::size_t e = col.seg[k + 1];
    if (b == e) return;
    double g = grad_[col.idx_p[b]];
    double h = hess_[col.idx_p[b]];
    double last = col.val_p[b];
    for (std::size_t j = b + 1; j < e; ++j) {
      const double v = col.val_p[j];
      if (v > last) {
        // Without missing values both default directions give the same split.
        for (int dir = kHasMissing ? 0 : 1; dir < 2; ++dir) {
          const bool default_left = dir == 0 || !kHasMissing;
          const double lg = dir == 0 ? g + miss.g : g;
          const double lh = dir == 0 ? h + miss.h : h;
          const double rg = total.g - lg;
          const double rh = total.h - lh;
          if (lh < mcw || rh < mcw) continue;
          const double a = lh + lambda;
          const double c = rh + lambda;
          if (lg * lg * c + rg * rg * a <= target * a * c) continue;
          const double gain = 0.5 * (lg * lg / a + rg * rg / c - parent_score) - p_.gamma;
          if (gain > best.gain) {
            double thr = 0.5 * (last + v);
            if (!(last < thr)) thr = v;
            best = Split{gain, static_cast<int>(f), thr, default_left, GradStats{lg, lh}};
            target = (2.0 * (best.gain + p_.gamma) + parent_score) * (1.0 - 1e-9);
          }
        }
      }
      const std::uint32_t i = col.idx_p[j];
      g += grad_[i];
      h += hess_[i];
      last = v;
    }
  }

  void find_splits(const std::vector<std::uint32_t>& features, const std::vector<int>& frontier,
                   const std::vector<char>& expandable, const std::vector<GradStats>& stats,
                   std::vector<Split>& best) {
    const std::size_t k_nodes = frontier.size();
    std::vector<int> slot(stats.size(), -1);
    for (std::size_t k = 0; k < k_nodes; ++k) {
      slot[static_cast<std::size_t>(frontier[k])] = static_cast<int>(k);
    }
    std::vector<GradStats> miss(k_nodes);
    std::vector<char> has_miss(k_nodes);
    for (std::uint32_t f : features) {
      if (!usable_mask_[f]) continue;
      std::fill(miss.begin(), miss.end(), GradStats{});
      std::fill(has_miss.begin(), has_miss.end(), 0);
      for (auto i : missing_[f]) {
        if (pos_[i] < 0) continue;
        const auto k = static_cast<std::size_t>(slot[static_cast<std::size_t>(pos_[i])]);
        miss[k].add(grad_[i], hess_[i]);
        has_miss[k] = 1;
      }
      const Column& col = work_[f];
      for (std::size_t k = 0; k < k_nodes; ++k) {
        if (!expandable[k]) continue;
        const auto& total = stats[static_cast<std::size_t>(frontier[k])];
        if (has_miss[k]) {
          scan_segment<true>(f, col, k, total, miss[k], best[k]);
        } else {
          scan_segment<false>(f, col, k, total, miss[k], best[k]);
        }
      }
    }
  }

  std::size_t n_;
  std::size_t d_;
  std::span<const int> labels_;
  const HyperParams& p_;
  std::mt19937_64 rng_;
  std::vector<std::vector<double>> cols_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<std::vector<double>> sorted_vals_;
  std::vector<std::vector<std::uint32_t>> missing_;
  std::vector<std::uint32_t> usable_;
  std::vector<char> usable_mask_;
  std::vector<std::uint32_t> all_rows_;
  std::vector<std::uint32_t> all_features_;
  std::vector<double> grad_;
  std::vector<double> hess_;
  std::vector<int> pos_;  // current node per row, -1 once out of play
  std::vector<Column> work_;
  std::vector<unsigned char> side_;
  std::vector<std::uint32_t> scratch_idx_;
  std::vector<double> scratch_val_;
  std::vector<std::size_t> scratch_seg_;
};

}  // namespace

BoostedEnsemble fit(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                    const HyperParams& params, std::vector<std::string> feature_names,
                    std::vector<double>* loss_trace) {
  params.validate();
  if (rows.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "row/label count mismatch");
  }
  if (rows.size() < 2) throw Error(ErrorCode::SingleClass, "need at least two samples");
  const std::size_t d = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
  }
  if (d == 0) throw Error(ErrorCode::NoUsableFeature, "no features");
  if (!feature_names.empty() && feature_names.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "feature name count does not match rows");
  }
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidParams, "labels must be 0 or 1");
    (y == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClass, "both classes must be present");

  BoostedEnsemble model;
  model.params = params;
  model.feature_names = std::move(feature_names);
  if (model.feature_names.empty()) {
    for (std::size_t f = 0; f < d; ++f) model.feature_names.push_back("f" + std::to_string(f));
  }

  Trainer trainer(rows, labels, params);
  std::vector<double> margin(rows.size(), model.base_score_logit);
  std::vector<double> probs(rows.size());
  if (loss_trace) loss_trace->clear();
  for (int round = 0; round < params.n_estimators; ++round) {
    trainer.set_gradients(margin);
    model.trees.push_back(trainer.build_tree());
    const auto& tree = model.trees.back();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      margin[i] += params.learning_rate * tree.leaf_value(rows[i]);
    }
    if (loss_trace) {
      for (std::size_t i = 0; i < rows.size(); ++i) probs[i] = sigmoid(margin[i]);
      loss_trace->push_back(weighted_log_loss(probs, labels, params.scale_pos_weight));
    }
  }
  return model;
}

BoostedEnsemble fit(const FeatureTable& table, const HyperParams& params,
                    std::vector<double>* loss_trace) {
  return fit(table.rows, table.labels, params, table.feature_names, loss_trace);
}

namespace {

json params_json(const HyperParams& p) {
  return json{{"learning_rate", p.learning_rate},
              {"gamma", p.gamma},
              {"max_depth", p.max_depth},
              {"subsample", p.subsample},
              {"colsample_bylevel", p.colsample_bylevel},
              {"colsample_bytree", p.colsample_bytree},
              {"min_child_weight", p.min_child_weight},
              {"scale_pos_weight", p.scale_pos_weight},
              {"n_estimators", p.n_estimators},
              {"lambda_l2", p.lambda_l2},
              {"seed", p.seed}};
}

HyperParams params_from(const json& j) {
  HyperParams p;
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.gamma = j.value("gamma", p.gamma);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.subsample = j.value("subsample", p.subsample);
  p.colsample_bylevel = j.value("colsample_bylevel", p.colsample_bylevel);
  p.colsample_bytree = j.value("colsample_bytree", p.colsample_bytree);
  p.min_child_weight = j.value("min_child_weight", p.min_child_weight);
  p.scale_pos_weight = j.value("scale_pos_weight", p.scale_pos_weight);
  p.n_estimators = j.value("n_estimators", p.n_estimators);
  p.lambda_l2 = j.value("lambda_l2", p.lambda_l2);
  p.seed = j.value("seed", p.seed);
  return p;
}

json parse_or_throw(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string to_json(const HyperParams& params) { return params_json(params).dump(); }

HyperParams hyper_params_from_json(std::string_view text) {
  try {
    return params_from(parse_or_throw(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad hyperparameters: ") + e.what());
  }
}

std::string serialize_model(const BoostedEnsemble& model) {
  json trees = json::array();
  for (const auto& tree : model.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) {
        nodes.push_back(json{{"leaf", n.weight}});
      } else {
        nodes.push_back(json{{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"default_left", n.default_left},
                             {"left", n.left},
                             {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  json doc{{"format", "graphokit-gbt"},
           {"version", 1},
           {"base_score_logit", model.base_score_logit},
           {"decision_threshold", model.decision_threshold},
           {"feature_names", model.feature_names},
           {"params", params_json(model.params)},
           {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

BoostedEnsemble parse_model(std::string_view text) {
  const json doc = parse_or_throw(text);
  try {
    if (doc.value("format", std::string{}) != "graphokit-gbt") {
      throw Error(ErrorCode::ParseError, "not a graphokit model document");
    }
    BoostedEnsemble model;
    model.base_score_logit = doc.at("base_score_logit").get<double>();
    model.decision_threshold = doc.at("decision_threshold").get<double>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.params = params_from(doc.at("params"));
    for (const auto& jt : doc.at("trees")) {
      RegressionTree tree;
      for (const auto& jn : jt) {
        TreeNode n;
        if (jn.contains("leaf")) {
          n.weight = jn.at("leaf").get<double>();
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.default_left = jn.at("default_left").get<bool>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        tree.nodes.push_back(n);
      }
      const auto count = static_cast<int>(tree.nodes.size());
      for (int i = 0; i < count; ++i) {
        const auto& n = tree.nodes[static_cast<std::size_t>(i)];
        if (n.is_leaf()) continue;
        if (n.left <= i || n.left >= count || n.right <= i || n.right >= count ||
            n.feature >= static_cast<int>(model.feature_names.size())) {
          throw Error(ErrorCode::ParseError, "tree node references out of range");
        }
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed model: ") + e.what());
  }
}

}  // namespace graphokit
