#pragma once

#include <span>

namespace dea::stats {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1 denominator). Needs at least two values.
double sample_stddev(std::span<const double> xs);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-tailed p-value of a Student t statistic with `dof` degrees of freedom.
double t_two_tailed_p(double t, double dof);

/// Critical |t| for a two-tailed test at the given confidence (e.g. 0.95).
double t_critical(double dof, double confidence);

struct TTestResult {
  double t = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  bool significant = false;
  /// Both samples had zero variance; t is 0 (equal means) or infinite.
  bool degenerate = false;
};

/// Welch's unequal-variance two-sample t-test, two-tailed.
/// Throws std::invalid_argument when either sample has fewer than two values.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, double confidence = 0.95);

/// (f_ave - f_o) / f_o. Throws std::invalid_argument for f_o <= 0.
double difficulty(double f_ave, double f_opt);

}  // namespace dea::stats
