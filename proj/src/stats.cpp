#include "graphokit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "graphokit/error.hpp"

namespace graphokit {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

namespace {

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

bool has_ties(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

void require_groups(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyGroup, "Mann-Whitney needs two non-empty groups");
}

}  // namespace

double mann_whitney_u_a(std::span<const double> a, std::span<const double> b) {
  require_groups(a, b);
  const auto ranks = average_ranks(pooled(a, b));
  double r_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r_a += ranks[i];
  const double na = static_cast<double>(a.size());
  return r_a - na * (na + 1.0) / 2.0;
}

double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b) {
  require_groups(a, b);
  const auto all = pooled(a, b);
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double u = mann_whitney_u_a(a, b);

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double z = std::max(std::abs(u - mu) - 0.5, 0.0) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b) {
  require_groups(a, b);
  const auto ranks = average_ranks(pooled(a, b));
  const std::size_t n = ranks.size(), k = a.size();
  const double mu = static_cast<double>(k) * static_cast<double>(b.size()) / 2.0;
  const double offset = static_cast<double>(k) * (static_cast<double>(k) + 1.0) / 2.0;
  double observed = 0.0;
  for (std::size_t i = 0; i < k; ++i) observed += ranks[i];
  const double obs_dev = std::abs(observed - offset - mu);

  // Enumerate k-subsets via a boolean selection mask in lexicographic order.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  std::size_t total = 0, extreme = 0;
  do {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) r += ranks[i];
    }
    ++total;
    if (std::abs(r - offset - mu) >= obs_dev - 1e-9) ++extreme;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  require_groups(a, b);
  TestResult res;
  res.n1 = a.size();
  res.n2 = b.size();
  const double u_a = mann_whitney_u_a(a, b);
  const double u_b = static_cast<double>(a.size() * b.size()) - u_a;
  res.statistic = std::min(u_a, u_b);
  if (a.size() + b.size() <= kMannWhitneyExactLimit && !has_ties(pooled(a, b))) {
    res.method = TestMethod::Exact;
    res.p_value = mann_whitney_exact_p(a, b);
  } else {
    res.method = TestMethod::NormalApprox;
    res.p_value = mann_whitney_normal_p(a, b);
  }
  return res;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

TestResult spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "Spearman inputs differ in length");
  }
  if (x.size() < 3) throw Error(ErrorCode::LengthMismatch, "Spearman needs at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::ConstantInput, "Spearman input is constant after ranking");
  }
  TestResult res;
  res.n1 = res.n2 = x.size();
  res.method = TestMethod::TDistApprox;
  res.statistic = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double rho = res.statistic;
  if (std::abs(rho) >= 1.0) {
    res.p_value = 0.0;
  } else {
    const double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
    res.p_value = student_t_two_sided_p(t, n - 2.0);
  }
  return res;
}

std::vector<double> benjamini_hochberg(std::span<const double> p_values) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (!std::isnan(p_values[i])) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> q(p_values.size(), std::nan(""));
  const double m = static_cast<double>(idx.size());
  double running = 1.0;
  for (std::size_t k = idx.size(); k-- > 0;) {
    const double adj = p_values[idx[k]] * m / static_cast<double>(k + 1);
    running = std::min(running, adj);
    q[idx[k]] = running;
  }
  return q;
}

}  // namespace graphokit
