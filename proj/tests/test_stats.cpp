#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "graphokit/error.hpp"
#include "graphokit/stats.hpp"

namespace graphokit {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidConfig;
}

// U_a by pair counting.
double u_pairs(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

// Two-sided exact p over all labelings of the pooled tie-free sample.
double exact_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), n1 = a.size();
  const double centre = static_cast<double>(a.size() * b.size()) / 2.0;
  const double observed = std::abs(u_pairs(a, b) - centre);
  std::size_t extreme = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? ga : gb).push_back(pooled[i]);
    ++total;
    if (std::abs(u_pairs(ga, gb) - centre) >= observed - 1e-9) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

std::vector<double> distinct_draw(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> pool(40);
  std::iota(pool.begin(), pool.end(), 1.0);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n);
  return pool;
}

TEST(MannWhitney, SeparatedGroups) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.method, TestMethod::Exact);
  EXPECT_NEAR(r.p_value, 0.1, 1e-15);
  EXPECT_NEAR(exact_oracle(a, b), 0.1, 1e-15);
}

TEST(MannWhitney, IdenticalMultisets) {
  const std::vector<double> a{3, 1, 4, 1, 5, 9, 2, 6}, b{3, 1, 4, 1, 5, 9, 2, 6};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.statistic, 32.0);
  EXPECT_GE(r.p_value, 0.95);
}

TEST(MannWhitney, UMatchesPairCounting) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 9);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(1 + rng() % 15), b(1 + rng() % 15);
    for (auto& x : a) x = v(rng);
    for (auto& x : b) x = v(rng);
    const double ua = u_pairs(a, b);
    EXPECT_DOUBLE_EQ(mann_whitney_u_a(a, b), ua);
    EXPECT_DOUBLE_EQ(mann_whitney_u(a, b).statistic,
                     std::min(ua, static_cast<double>(a.size() * b.size()) - ua));
  }
}

TEST(MannWhitney, ExactMatchesEnumeration) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n1 = 1 + rng() % 6, n2 = 1 + rng() % 6;
    const auto pooled = distinct_draw(rng, n1 + n2);
    const std::vector<double> a(pooled.begin(), pooled.begin() + n1);
    const std::vector<double> b(pooled.begin() + n1, pooled.end());
    const double want = exact_oracle(a, b);
    EXPECT_NEAR(mann_whitney_exact_p(a, b), want, 1e-12);
    const auto r = mann_whitney_u(a, b);
    EXPECT_EQ(r.method, TestMethod::Exact);
    EXPECT_NEAR(r.p_value, want, 1e-12);
  }
}

TEST(MannWhitney, SixBySixApproximationWithinTwoPoints) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const auto pooled = distinct_draw(rng, 12);
    const std::vector<double> a(pooled.begin(), pooled.begin() + 6);
    const std::vector<double> b(pooled.begin() + 6, pooled.end());
    EXPECT_NEAR(mann_whitney_normal_p(a, b), exact_oracle(a, b), 0.02);
  }
}

TEST(MannWhitney, MethodSelection) {
  const std::vector<double> tied_a{1, 2, 2}, tied_b{2, 3, 4};
  EXPECT_EQ(mann_whitney_u(tied_a, tied_b).method, TestMethod::NormalApprox);
  std::vector<double> a(7), b(6);
  std::iota(a.begin(), a.end(), 0.0);
  std::iota(b.begin(), b.end(), 100.0);
  EXPECT_EQ(mann_whitney_u(a, b).method, TestMethod::NormalApprox);
  a.pop_back();
  EXPECT_EQ(mann_whitney_u(a, b).method, TestMethod::Exact);
}

TEST(MannWhitney, SymmetricAndRankInvariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(2 + rng() % 25), b(2 + rng() % 25);
    for (auto& x : a) x = std::round(z(rng) * 3.0);
    for (auto& x : b) x = std::round(z(rng) * 3.0 + 0.5);
    const auto ab = mann_whitney_u(a, b);
    EXPECT_EQ(ab.p_value, mann_whitney_u(b, a).p_value);
    auto ea = a, eb = b;
    for (auto& x : ea) x = std::exp(x);
    for (auto& x : eb) x = std::exp(x);
    const auto e = mann_whitney_u(ea, eb);
    EXPECT_EQ(e.statistic, ab.statistic);
    EXPECT_EQ(e.p_value, ab.p_value);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(MannWhitney, NullCalibration) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z(0.0, 1.0);
  int rejections = 0;
  std::vector<double> a(500), b(500);
  for (int rep = 0; rep < 1000; ++rep) {
    for (auto& x : a) x = z(rng);
    for (auto& x : b) x = z(rng);
    if (mann_whitney_u(a, b).p_value < 0.05) ++rejections;
  }
  EXPECT_GE(rejections, 30);
  EXPECT_LE(rejections, 70);
}

TEST(MannWhitney, EmptyGroup) {
  const std::vector<double> a{1, 2}, none;
  EXPECT_EQ(code_of([&] { mann_whitney_u(a, none); }), ErrorCode::EmptyGroup);
  EXPECT_EQ(code_of([&] { mann_whitney_u(none, a); }), ErrorCode::EmptyGroup);
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v{10, 20, 20, 5, 20};
  const std::vector<double> want{2, 4, 4, 1, 4};
  EXPECT_EQ(average_ranks(v), want);
}

// P(|T| >= t) in closed form for small degrees of freedom.
double t_tail_closed(double t, int df) {
  t = std::abs(t);
  switch (df) {
    case 1: return 1.0 - 2.0 / std::numbers::pi * std::atan(t);
    case 2: return 1.0 - t / std::sqrt(2.0 + t * t);
    case 3: {
      const double u = t / std::sqrt(3.0);
      return 1.0 - 2.0 / std::numbers::pi * (std::atan(u) + u / (1.0 + u * u));
    }
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

TEST(StudentT, ClosedFormTails) {
  for (int df = 1; df <= 3; ++df) {
    for (double t : {0.0, 0.3, 1.0, 2.3094, 5.0, 40.0}) {
      EXPECT_NEAR(student_t_two_sided_p(t, df), t_tail_closed(t, df), 1e-12) << df << " " << t;
      EXPECT_EQ(student_t_two_sided_p(-t, df), student_t_two_sided_p(t, df));
    }
  }
}

TEST(Spearman, PerfectMonotone) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> up{0.1, 0.5, 2, 9, 10, 300};
  const std::vector<double> down{6, 5, 4, 3, 2, 1};
  const auto a = spearman_rho(x, up);
  EXPECT_DOUBLE_EQ(a.statistic, 1.0);
  EXPECT_EQ(a.p_value, 0.0);
  EXPECT_DOUBLE_EQ(spearman_rho(x, down).statistic, -1.0);
  EXPECT_EQ(a.method, TestMethod::TDistApprox);
}

TEST(Spearman, FiveByHand) {
  // rank differences 0,1,1,1,1: rho = 1 - 6*4 / (5*24) = 0.8
  const std::vector<double> x{1, 2, 3, 4, 5}, y{1, 3, 2, 5, 4};
  const auto r = spearman_rho(x, y);
  EXPECT_NEAR(r.statistic, 0.8, 1e-15);
  const double t = 0.8 * std::sqrt(3.0 / (1.0 - 0.64));
  EXPECT_NEAR(r.p_value, t_tail_closed(t, 3), 1e-12);
  EXPECT_NEAR(r.p_value, 0.1041, 5e-4);
}

TEST(Spearman, PearsonOfAverageRanks) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> v(0, 6);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng() % 30;
    std::vector<double> x(n), y(n);
    for (auto& e : x) e = v(rng);
    for (auto& e : y) e = v(rng);
    const auto rx = average_ranks(x), ry = average_ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (rx[i] - mx) * (ry[i] - my);
      sxx += (rx[i] - mx) * (rx[i] - mx);
      syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) {
      EXPECT_EQ(code_of([&] { spearman_rho(x, y); }), ErrorCode::ConstantInput);
      continue;
    }
    const auto r = spearman_rho(x, y);
    EXPECT_NEAR(r.statistic, sxy / std::sqrt(sxx * syy), 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Spearman, Errors) {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, c{4, 4, 4};
  EXPECT_EQ(code_of([&] { spearman_rho(a, b); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { spearman_rho(b, b); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { spearman_rho(a, c); }), ErrorCode::ConstantInput);
}

std::vector<double> bh_oracle(const std::vector<double>& p) {
  std::size_t m = 0;
  for (double v : p) m += std::isnan(v) ? 0 : 1;
  std::vector<double> q(p.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::isnan(p[i])) continue;
    double best = 1.0;
    for (double pj : p) {
      if (std::isnan(pj) || pj < p[i]) continue;
      std::size_t rank = 0;
      for (double pl : p) rank += (!std::isnan(pl) && pl <= pj) ? 1 : 0;
      best = std::min(best, static_cast<double>(m) * pj / static_cast<double>(rank));
    }
    q[i] = best;
  }
  return q;
}

TEST(BenjaminiHochberg, Example) {
  const std::vector<double> p{0.01, 0.04, 0.03, 0.2};
  const auto q = benjamini_hochberg(p);
  EXPECT_NEAR(q[0], 0.04, 1e-15);
  EXPECT_NEAR(q[1], 0.04 * 4 / 3, 1e-15);
  EXPECT_NEAR(q[2], 0.04 * 4 / 3, 1e-15);
  EXPECT_NEAR(q[3], 0.2, 1e-15);
}

TEST(BenjaminiHochberg, MatchesDefinition) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> p(1 + rng() % 25);
    for (auto& v : p) {
      const double r = u(rng);
      v = r < 0.1 ? std::numeric_limits<double>::quiet_NaN() : std::round(u(rng) * 20) / 20;
    }
    const auto got = benjamini_hochberg(p);
    const auto want = bh_oracle(p);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::isnan(want[i])) {
        EXPECT_TRUE(std::isnan(got[i]));
      } else {
        EXPECT_NEAR(got[i], want[i], 1e-12);
        EXPECT_GE(got[i], p[i] * (1.0 - 1e-15));
      }
    }
  }
}

}  // namespace
}  // namespace graphokit
