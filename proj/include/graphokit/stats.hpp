#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace graphokit {

enum class TestMethod { Exact, NormalApprox, TDistApprox };

struct TestResult {
  double statistic = 0.0;  // U or rho
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  TestMethod method = TestMethod::NormalApprox;
};

// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Largest total sample size that uses the exact null distribution (tie-free
// inputs only).
inline constexpr std::size_t kMannWhitneyExactLimit = 12;

// Two-sided Mann-Whitney U test. statistic = min(U_a, U_b).
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// U_a = R_a - n_a (n_a + 1) / 2 with average ranks.
double mann_whitney_u_a(std::span<const double> a, std::span<const double> b);

// Normal approximation with tie and 0.5 continuity correction, regardless of
// sample size.
double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b);

// Exact two-sided p by enumeration of every labelling; ties are ranked with
// average ranks. Intended for n1 + n2 <= ~20.
double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation with a two-sided t-approximation p-value.
TestResult spearman_rho(std::span<const double> x, std::span<const double> y);

// Two-sided Student-t tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

// Benjamini-Hochberg adjusted q-values. NaN p-values stay NaN and are not
// counted in the number of hypotheses.
std::vector<double> benjamini_hochberg(std::span<const double> p_values);

}  // namespace graphokit
