#include "codedq/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace codedq {

namespace {

// Two-sided 95% (upper 0.975 quantile), df = 1..30.
constexpr double kT975[30] = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};

// One-sided 95% (upper 0.95 quantile), df = 1..30.
constexpr double kT95[30] = {
    6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
    1.796, 1.782, 1.771, 1.761, 1.753, 1.746, 1.740, 1.734, 1.729, 1.725,
    1.721, 1.717, 1.714, 1.711, 1.708, 1.706, 1.703, 1.701, 1.699, 1.697};

}  // namespace

double student_t_975(int df) {
  if (df < 1) throw std::invalid_argument("student_t_975: df must be >= 1");
  return df <= 30 ? kT975[df - 1] : 1.960;
}

double student_t_95(int df) {
  if (df < 1) throw std::invalid_argument("student_t_95: df must be >= 1");
  return df <= 30 ? kT95[df - 1] : 1.645;
}

MeanCI replication_ci(std::span<const double> xs) {
  const int n = static_cast<int>(xs.size());
  if (n < 2)
    throw std::invalid_argument("replication_ci: need at least 2 replications");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  return MeanCI{mean, student_t_975(n - 1) * sd / std::sqrt(double(n)), n};
}

double one_sided_upper_95(std::span<const double> xs) {
  const int n = static_cast<int>(xs.size());
  if (n < 2)
    throw std::invalid_argument("one_sided_upper_95: need at least 2 values");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  return mean + student_t_95(n - 1) * sd / std::sqrt(double(n));
}

double least_squares_slope(std::span<const double> t,
                           std::span<const double> y) {
  if (t.size() != y.size())
    throw std::invalid_argument("least_squares_slope: size mismatch");
  const std::size_t n = t.size();
  if (n < 2) return 0.0;
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tbar += t[i];
    ybar += y[i];
  }
  tbar /= double(n);
  ybar /= double(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = t[i] - tbar;
    stt += dt * dt;
    sty += dt * (y[i] - ybar);
  }
  return stt > 0.0 ? sty / stt : 0.0;
}

}  // namespace codedq
