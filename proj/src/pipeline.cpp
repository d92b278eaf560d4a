#include "graphokit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "graphokit/error.hpp"
#include "graphokit/parallel.hpp"

namespace graphokit {

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double tn = static_cast<double>(cm.tn), fn = static_cast<double>(cm.fn);
  Metrics m;
  if (tp + fn > 0) m.sen = tp / (tp + fn);
  if (tn + fp > 0) m.spe = tn / (tn + fp);
  if (tp + fp > 0) m.pre = tp / (tp + fp);
  if (m.sen && m.spe) m.bacc = 0.5 * (*m.sen + *m.spe);
  if (m.pre && m.sen && *m.pre + *m.sen > 0.0) m.f1 = 2.0 * *m.pre * *m.sen / (*m.pre + *m.sen);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den > 0.0) m.mcc = (tp * tn - fp * fn) / std::sqrt(den);
  return m;
}

ConfusionMatrix confusion(std::span<const double> probs, std::span<const int> labels,
                          double threshold) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "probability/label length mismatch");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] >= threshold;
    if (labels[i] == 1) {
      (pred ? cm.tp : cm.fn)++;
    } else {
      (pred ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

namespace {

void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  // Explicit Fisher-Yates so the permutation does not depend on the standard
  // library's shuffle implementation.
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

void require_both_classes(std::span<const int> labels) {
  bool pos = false, neg = false;
  for (int y : labels) (y == 1 ? pos : neg) = true;
  if (!pos || !neg) throw Error(ErrorCode::SingleClass, "both classes must be present");
}

}  // namespace

std::vector<CvSplit> stratified_kfold(std::span<const int> labels, std::size_t k,
                                      std::size_t repeats, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "k must be >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k) {
    throw Error(ErrorCode::ClassTooSmall,
                "each class needs at least " + std::to_string(k) + " subjects");
  }
  std::mt19937_64 rng(seed);
  std::vector<CvSplit> splits;
  splits.reserve(k * repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    auto p = pos, n = neg;
    shuffle_indices(p, rng);
    shuffle_indices(n, rng);
    std::vector<std::size_t> order = p;
    order.insert(order.end(), n.begin(), n.end());
    std::vector<std::size_t> fold_of(labels.size());
    for (std::size_t j = 0; j < order.size(); ++j) fold_of[order[j]] = j % k;
    for (std::size_t f = 0; f < k; ++f) {
      CvSplit s;
      for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? s.test : s.train).push_back(i);
      splits.push_back(std::move(s));
    }
  }
  return splits;
}

SearchGrids SearchGrids::paper() {
  SearchGrids g;
  g.learning_rate = {0.001, 0.01, 0.1, 0.2, 0.3};
  g.gamma = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.5};
  g.max_depth = {6, 8, 10, 12, 15};
  g.subsample = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  g.colsample_bylevel = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  g.colsample_bytree = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  g.min_child_weight = {0.5, 1.0, 3.0, 5.0, 7.0, 10.0};
  g.scale_pos_weight = {1.0, 2.0, 3.0, 4.0};
  return g;
}

void SearchGrids::validate() const {
  if (learning_rate.empty() || gamma.empty() || max_depth.empty() || subsample.empty() ||
      colsample_bylevel.empty() || colsample_bytree.empty() || min_child_weight.empty() ||
      scale_pos_weight.empty()) {
    throw Error(ErrorCode::InvalidConfig, "every search grid needs at least one value");
  }
}

double cv_mean_bacc(const FeatureTable& table, const HyperParams& params,
                    std::span<const CvSplit> splits) {
  if (splits.empty()) throw Error(ErrorCode::InvalidConfig, "no CV splits");
  std::vector<double> bacc(splits.size());
  for (std::size_t s = 0; s < splits.size(); ++s) {
    const auto& split = splits[s];
    const auto train = table.select_rows(split.train);
    const auto model = fit(train, params);
    ConfusionMatrix cm;
    for (auto i : split.test) {
      const bool pred = predict_proba(model, table.rows[i]) >= 0.5;
      if (table.labels[i] == 1) {
        (pred ? cm.tp : cm.fn)++;
      } else {
        (pred ? cm.fp : cm.tn)++;
      }
    }
    bacc[s] = metrics(cm).bacc.value_or(0.0);
  }
  return std::accumulate(bacc.begin(), bacc.end(), 0.0) / static_cast<double>(bacc.size());
}

SearchResult random_search(const FeatureTable& table, const SearchGrids& grids,
                           std::size_t iterations, std::uint64_t seed, CvSetup cv) {
  return random_search(table, grids, iterations, seed, cv, 100);
}

SearchResult random_search(const FeatureTable& table, const SearchGrids& grids,
                           std::size_t iterations, std::uint64_t seed, CvSetup cv,
                           int n_estimators) {
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
  grids.validate();
  table.check();
  const auto splits = stratified_kfold(table.labels, cv.k, cv.repeats, seed);

  std::mt19937_64 rng(derive_seed(seed, 1));
  auto pick = [&rng](const auto& grid) { return grid[static_cast<std::size_t>(rng() % grid.size())]; };
  std::vector<HyperParams> trials(iterations);
  for (std::size_t t = 0; t < iterations; ++t) {
    HyperParams& p = trials[t];
    p.learning_rate = pick(grids.learning_rate);
    p.gamma = pick(grids.gamma);
    p.max_depth = pick(grids.max_depth);
    p.subsample = pick(grids.subsample);
    p.colsample_bylevel = pick(grids.colsample_bylevel);
    p.colsample_bytree = pick(grids.colsample_bytree);
    p.min_child_weight = pick(grids.min_child_weight);
    p.scale_pos_weight = pick(grids.scale_pos_weight);
    p.n_estimators = n_estimators;
    p.seed = derive_seed(seed, 1000 + t);
  }

  SearchResult result;
  result.scores.assign(iterations, 0.0);
  parallel_for(iterations, [&](std::size_t t) {
    try {
      result.scores[t] = cv_mean_bacc(table, trials[t], splits);
    } catch (const Error&) {
      result.scores[t] = 0.0;
    }
  });
  result.best_iteration = 0;
  for (std::size_t t = 1; t < iterations; ++t) {
    if (result.scores[t] > result.scores[result.best_iteration]) result.best_iteration = t;
  }
  result.best = trials[result.best_iteration];
  result.best_score = result.scores[result.best_iteration];
  return result;
}

std::vector<double> cv_probabilities(const FeatureTable& table, const HyperParams& params,
                                     std::span<const CvSplit> splits) {
  const std::size_t n = table.n_rows();
  std::vector<std::vector<std::pair<std::size_t, double>>> per_split(splits.size());
  parallel_for(splits.size(), [&](std::size_t s) {
    const auto model = fit(table.select_rows(splits[s].train), params);
    for (auto i : splits[s].test) per_split[s].emplace_back(i, predict_proba(model, table.rows[i]));
  });
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (const auto& preds : per_split) {
    for (const auto& [i, p] : preds) {
      sum[i] += p;
      ++count[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] == 0) throw Error(ErrorCode::InvalidConfig, "subject never held out");
    sum[i] /= static_cast<double>(count[i]);
  }
  return sum;
}

double tune_threshold(std::span<const double> probs, std::span<const int> labels,
                      ThresholdObjective objective) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "probability/label length mismatch");
  }
  require_both_classes(labels);
  std::vector<double> distinct(probs.begin(), probs.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw Error(ErrorCode::DegenerateProbs, "all probabilities are equal");

  // Sweep candidates in ascending order; counts of positives/negatives at or
  // below each distinct value give the confusion matrix in O(n log n).
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg)++;
  std::vector<std::pair<double, int>> sorted;
  for (std::size_t i = 0; i < probs.size(); ++i) sorted.emplace_back(probs[i], labels[i]);
  std::sort(sorted.begin(), sorted.end());

  double best_thr = 0.0, best_score = -std::numeric_limits<double>::infinity();
  std::size_t pos_below = 0, neg_below = 0, j = 0;
  for (std::size_t c = 0; c + 1 < distinct.size(); ++c) {
    while (j < sorted.size() && sorted[j].first <= distinct[c]) {
      (sorted[j].second == 1 ? pos_below : neg_below)++;
      ++j;
    }
    const double thr = 0.5 * (distinct[c] + distinct[c + 1]);
    const ConfusionMatrix cm{n_pos - pos_below, n_neg - neg_below, neg_below, pos_below};
    const Metrics m = metrics(cm);
    const double score = objective == ThresholdObjective::Youden
                             ? *m.sen + *m.spe - 1.0
                             : m.f1.value_or(0.0);
    constexpr double tol = 1e-12;
    if (score > best_score + tol ||
        (score > best_score - tol && std::abs(thr - 0.5) < std::abs(best_thr - 0.5))) {
      best_score = std::max(score, best_score);
      best_thr = thr;
    }
  }
  return best_thr;
}

std::vector<RocPoint> roc_curve(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "probability/label length mismatch");
  }
  require_both_classes(labels);
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg)++;
  std::vector<std::pair<double, int>> sorted;
  for (std::size_t i = 0; i < probs.size(); ++i) sorted.emplace_back(probs[i], labels[i]);
  std::sort(sorted.begin(), sorted.end());

  std::vector<RocPoint> roc;
  std::size_t pos_below = 0, neg_below = 0;
  for (std::size_t j = 0; j < sorted.size();) {
    const double thr = sorted[j].first;
    roc.push_back(RocPoint{thr, static_cast<double>(n_neg - neg_below) / n_neg,
                           static_cast<double>(n_pos - pos_below) / n_pos});
    while (j < sorted.size() && sorted[j].first == thr) {
      (sorted[j].second == 1 ? pos_below : neg_below)++;
      ++j;
    }
  }
  const double top = sorted.back().first;
  roc.push_back(RocPoint{top < 1.0 ? 1.0 : std::nextafter(top, 2.0), 0.0, 0.0});
  return roc;
}

double auc(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i + 1].fpr) * (roc[i].tpr + roc[i + 1].tpr) / 2.0;
  }
  return area;
}

EvaluationReport loocv_evaluate(const FeatureTable& table, const HyperParams& params,
                                double threshold) {
  table.check();
  const std::size_t n = table.n_rows();
  if (n < 3) throw Error(ErrorCode::ClassTooSmall, "LOOCV needs at least 3 subjects");
  std::size_t n_pos = 0;
  for (int y : table.labels) n_pos += y == 1;
  if (n_pos < 2 || n - n_pos < 2) {
    throw Error(ErrorCode::ClassTooSmall, "LOOCV needs at least 2 subjects per class");
  }
  EvaluationReport rep;
  rep.params = params;
  rep.threshold = threshold;
  rep.held_out_probs.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> train;
    train.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) train.push_back(j);
    }
    const auto model = fit(table.select_rows(train), params);
    rep.held_out_probs[i] = predict_proba(model, table.rows[i]);
  });
  rep.cm = confusion(rep.held_out_probs, table.labels, threshold);
  rep.metrics = metrics(rep.cm);
  rep.roc = roc_curve(rep.held_out_probs, table.labels);
  rep.auc = auc(rep.roc);
  return rep;
}

double permutation_test(const FeatureTable& table, double observed, std::size_t m,
                        std::uint64_t seed, const PermutationScorer& scorer) {
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "permutations must be >= 1");
  std::vector<double> scores(m);
  parallel_for(m, [&](std::size_t r) {
    FeatureTable shuffled = table;
    std::vector<std::size_t> order(table.n_rows());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(seed, r));
    shuffle_indices(order, rng);
    for (std::size_t i = 0; i < order.size(); ++i) shuffled.labels[i] = table.labels[order[i]];
    scores[r] = scorer(shuffled);
  });
  const auto b = static_cast<std::size_t>(
      std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= observed; }));
  return static_cast<double>(b + 1) / static_cast<double>(m + 1);
}

EvaluationReport evaluate_params(const FeatureTable& table, const HyperParams& params,
                                 const PostSearchOptions& options) {
  const auto splits = stratified_kfold(table.labels, options.cv.k, options.cv.repeats, options.seed);
  const auto probs = cv_probabilities(table, params, splits);
  const double thr = tune_threshold(probs, table.labels, options.objective);
  return loocv_evaluate(table, params, thr);
}

double post_search_score(const FeatureTable& table, const HyperParams& params,
                         const PostSearchOptions& options) {
  try {
    return evaluate_params(table, params, options).metrics.bacc.value_or(0.0);
  } catch (const Error&) {
    return 0.0;
  }
}

FeatureTable combine_tasks(const std::vector<std::pair<std::string, FeatureTable>>& tables,
                           std::vector<std::string>* warnings) {
  if (tables.empty()) throw Error(ErrorCode::EmptyIntersection, "no tables to combine");
  std::vector<std::map<std::string, std::size_t>> index(tables.size());
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const auto& tab = tables[t].second;
    for (std::size_t r = 0; r < tab.n_rows(); ++r) index[t][tab.subject_ids[r]] = r;
  }
  FeatureTable out;
  for (const auto& [task, tab] : tables) {
    const std::string prefix = task + ".";
    for (const auto& name : tab.feature_names) {
      out.feature_names.push_back(name.starts_with(prefix) ? name : prefix + name);
    }
  }
  std::set<std::string> all_subjects;
  for (const auto& [task, tab] : tables) all_subjects.insert(tab.subject_ids.begin(), tab.subject_ids.end());

  const auto& first = tables.front().second;
  std::set<std::string> kept;
  for (std::size_t r = 0; r < first.n_rows(); ++r) {
    const auto& id = first.subject_ids[r];
    std::vector<double> values;
    bool present = true;
    for (std::size_t t = 0; t < tables.size() && present; ++t) {
      const auto it = index[t].find(id);
      if (it == index[t].end()) {
        present = false;
        break;
      }
      const auto& tab = tables[t].second;
      if (tab.labels[it->second] != first.labels[r]) {
        throw Error(ErrorCode::InvalidConfig, "label of " + id + " differs between tasks");
      }
      const auto& row = tab.rows[it->second];
      values.insert(values.end(), row.begin(), row.end());
    }
    if (!present) continue;
    kept.insert(id);
    out.add_row(id, first.labels[r], std::move(values));
  }
  if (out.n_rows() == 0) throw Error(ErrorCode::EmptyIntersection, "no subject has every task");
  if (warnings) {
    for (const auto& id : all_subjects) {
      if (!kept.contains(id)) {
        warnings->push_back("combined: dropped subject " + id + " (missing at least one task)");
      }
    }
  }
  return out;
}

void ProtocolConfig::validate() const {
  grids.validate();
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
  if (cv.k < 2) throw Error(ErrorCode::InvalidConfig, "k must be >= 2");
  if (cv.repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be >= 1");
  if (permutations < 1) throw Error(ErrorCode::InvalidConfig, "permutations must be >= 1");
  if (n_estimators < 1) throw Error(ErrorCode::InvalidConfig, "n_estimators must be >= 1");
}

ProtocolResult run_protocol(const FeatureTable& table, const ProtocolConfig& config,
                            const std::string& task) {
  config.validate();
  try {
    ProtocolResult res;
    res.search = random_search(table, config.grids, config.iterations, config.seed, config.cv,
                               config.n_estimators);
    const HyperParams& best = res.search.best;
    PostSearchOptions post{config.cv, config.seed, config.objective};
    res.report = evaluate_params(table, best, post);
    res.report.task = task;
    const double observed = res.report.metrics.bacc.value_or(0.0);
    res.report.permutation_p = permutation_test(
        table, observed, config.permutations, derive_seed(config.seed, 2),
        [&](const FeatureTable& shuffled) { return post_search_score(shuffled, best, post); });
    res.model = fit(table, best);
    res.model.decision_threshold = res.report.threshold;
    return res;
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), e.context().empty() ? task : task + ": " + e.context());
  }
}

}  // namespace graphokit
