#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pagefuse {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-tailed
};

/// Welch's unequal-variance t-test with the Welch-Satterthwaite degrees of
/// freedom and a two-tailed p-value from the Student-t CDF. Requires at
/// least two observations per sample and a nonzero pooled variance.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Student-t CDF at x with df degrees of freedom (accurate to ~1e-10).
double student_t_cdf(double x, double df);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// "" | "*" | "**" | "***" | "****" at the inclusive cutoffs
/// 0.05 / 0.01 / 0.001 / 0.0001.
std::string significance_stars(double p);

}  // namespace pagefuse
