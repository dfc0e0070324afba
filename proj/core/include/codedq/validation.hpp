#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace codedq {

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Test-harness hook: deliberately corrupts one quantity so the suite's
// negative path (a named failing check) can be exercised end to end.
enum class Corruption { none, eta, pi_zero };

struct ValidationOptions {
  std::vector<int> rs = {2, 3, 4};
  std::vector<double> capacity_fractions = {0.3, 0.6, 0.9};
  bool with_simulation = true;
  long horizon = 33000;
  long warmup = 3000;
  int reps = 5;
  std::uint64_t seed = 20260801;
  double tol = 1e-12;           // analytic truncation tolerance
  bool near_capacity = true;    // include the lambda = 0.999*capacity checks
  Corruption corruption = Corruption::none;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  int failures() const;
};

// Cross-validation suite: closed forms vs. the direct generator solve, cut
// residuals, simulation vs. analytic confidence intervals, the request-delay
// offset, and the max-of-services distribution.
ValidationReport run_validation(const ValidationOptions& opt);

}  // namespace codedq
