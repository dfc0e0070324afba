#pragma once

#include <span>

namespace codedq {

// Student-t quantiles for replication confidence intervals (tabulated for
// df <= 30, normal limit beyond).
double student_t_975(int df);  // two-sided 95%
double student_t_95(int df);   // one-sided 95%

struct MeanCI {
  double mean = 0.0;
  double halfwidth = 0.0;  // 95% two-sided, t-based
  int n = 0;

  bool contains(double x) const {
    return x >= mean - halfwidth && x <= mean + halfwidth;
  }
};

MeanCI replication_ci(std::span<const double> xs);

// mean + t_{0.95, n-1} * s / sqrt(n); used for one-sided ordering claims.
double one_sided_upper_95(std::span<const double> xs);

// Least-squares slope of y against t, with t centered for conditioning.
double least_squares_slope(std::span<const double> t,
                           std::span<const double> y);

}  // namespace codedq
