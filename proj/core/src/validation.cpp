#include "codedq/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "codedq/bos.hpp"
#include "codedq/chain.hpp"
#include "codedq/mmr.hpp"
#include "codedq/rng.hpp"
#include "codedq/simulator.hpp"
#include "codedq/stats.hpp"

namespace codedq {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

int ValidationReport::failures() const {
  return static_cast<int>(std::count_if(
      checks.begin(), checks.end(),
      [](const CheckResult& c) { return !c.passed; }));
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void push_check(ValidationReport& rep, const std::string& name,
                double observed, double expected, double tolerance,
                std::string detail = "") {
  CheckResult c;
  c.name = name;
  c.observed = observed;
  c.expected = expected;
  c.tolerance = tolerance;
  c.passed = std::abs(observed - expected) <= tolerance;
  c.detail = std::move(detail);
  rep.checks.push_back(std::move(c));
}

void push_bound_check(ValidationReport& rep, const std::string& name,
                      double observed, double bound,
                      std::string detail = "") {
  CheckResult c;
  c.name = name;
  c.observed = observed;
  c.expected = 0.0;
  c.tolerance = bound;
  c.passed = observed <= bound;
  c.detail = std::move(detail);
  rep.checks.push_back(std::move(c));
}

void push_ci_check(ValidationReport& rep, const std::string& name,
                   const MeanCI& ci, double target) {
  CheckResult c;
  c.name = name;
  c.observed = ci.mean;
  c.expected = target;
  c.tolerance = ci.halfwidth;
  c.passed = ci.contains(target);
  c.detail = "95% CI halfwidth " + fmt(ci.halfwidth) + " from " +
             std::to_string(ci.n) + " replications";
  rep.checks.push_back(std::move(c));
}

// Composite Simpson rule; the integrand is smooth and decays exponentially.
double simpson(double a, double b, int intervals, double (*f)(int, double, double),
               int r, double mu) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(r, mu, a) + f(r, mu, b);
  for (int i = 1; i < intervals; ++i)
    s += f(r, mu, a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

int levels_for(const BosDistribution& dist) {
  return std::max(dist.levels() + 2, 8);
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& opt) {
  ValidationReport rep;

  // Closed forms for the replication branch vs. a direct birth-death solve.
  for (int r : opt.rs) {
    for (double f : opt.capacity_fractions) {
      const double lambda = f * r;  // mu = 1, rho = f
      const SystemConfig cfg(r, lambda, 1.0);
      const MmrDistribution mmr = mmr_stationary(cfg, opt.tol);
      const GeneratorMatrix bd =
          build_birth_death(r, lambda, 1.0, mmr.truncation_index + 200);
      const StationaryDistribution direct = solve_stationary_direct(bd);
      double gap = 0.0;
      for (int m = 0; m <= mmr.truncation_index; ++m)
        gap = std::max(gap, std::abs(mmr.probs[m] - direct.probs[m]));
      push_bound_check(rep,
                       "mmr_vs_birthdeath_r" + std::to_string(r) + "_rho" + fmt(f),
                       gap, 1e-10);
    }
  }

  // Iterative coded-system distribution vs. the truncated-generator solve,
  // plus balance residuals of the computed distribution.
  for (int r : opt.rs) {
    const double cap = bos_capacity(r, 1.0);
    for (double f : opt.capacity_fractions) {
      const SystemConfig cfg(r, f * cap, 1.0);
      const std::string suffix = "_r" + std::to_string(r) + "_f" + fmt(f);

      BosDistribution dist = bos_stationary(cfg, opt.tol);
      if (opt.corruption == Corruption::pi_zero) dist.pi_low[0] *= 1.001;

      const int levels = levels_for(dist);
      const StationaryDistribution analytic = to_stationary(dist, cfg, levels);
      const StationaryDistribution direct =
          solve_stationary_direct(build_generator(cfg, levels));
      const DistributionGap gap = compare_distributions(analytic, direct);
      push_bound_check(rep, "bos_vs_oracle" + suffix, gap.max_abs_diff, 1e-8,
                       "worst state " + to_string(gap.argmax_state));

      push_bound_check(rep, "bos_generator_residual" + suffix,
                       generator_residual_inf(analytic, cfg, levels), 1e-8);

      const CutResiduals cuts = cut_residuals(dist, cfg);
      push_bound_check(rep, "bos_cut_residuals" + suffix, cuts.max(), 1e-8,
                       "odd " + fmt(cuts.odd_balance) + ", diagonal " +
                           fmt(cuts.diagonal) + ", pair " + fmt(cuts.pair_set) +
                           ", low " + fmt(cuts.low_balance));

      const CutResiduals oracle_cuts =
          cut_residuals(to_level_form(direct, cfg), cfg);
      push_bound_check(rep, "oracle_cut_residuals" + suffix, oracle_cuts.max(),
                       1e-8);
    }
  }

  // Small-case closed-form identities.
  {
    const SystemConfig cfg(2, 1.0, 1.0);
    BosCoefficients c = bos_coefficients(cfg);
    if (opt.corruption == Corruption::eta) c.eta += 1e-6;
    // Recompute eta from its three summands with independently formed terms.
    const double n = 4.0;
    const double eta_again =
        1.0 / n + (n - 1) / (n * n) + 1.0 / ((n - 1) * n);
    push_check(rep, "eta_term_consistency_r2", c.eta, eta_again, 1e-15);
    push_check(rep, "golden_pi0_r2", bos_stationary(cfg, opt.tol).pi_low[0],
               23.0 / 113.0, 1e-13);
    push_check(rep, "capacity_fraction_r2", bos_capacity(2, 1.0) / 2.0, 0.96,
               1e-12);
  }

  // Convergence just below the capacity boundary (no dense solve; the level
  // count is large there and the streamed residual covers it).
  if (opt.near_capacity) {
    const int r = opt.rs.empty() ? 2 : opt.rs.front();
    const SystemConfig cfg(r, 0.999 * bos_capacity(r, 1.0), 1.0);
    const BosDistribution dist = bos_stationary(cfg, opt.tol);
    push_check(rep, "near_capacity_mass_r" + std::to_string(r),
               dist.total_mass(), 1.0, 1e-9,
               std::to_string(dist.levels()) + " levels retained");
    const int levels = levels_for(dist);
    push_bound_check(rep, "near_capacity_residual_r" + std::to_string(r),
                     generator_residual_inf(to_stationary(dist, cfg, levels),
                                            cfg, levels),
                     1e-8);
  }

  // Request-minus-packet delay offset: positive, decreasing, limit 1/(2 mu).
  {
    double prev = bos_request_delay_offset(2, 1.0);
    bool monotone = prev > 0.5;
    for (int r = 3; r <= 50; ++r) {
      const double off = bos_request_delay_offset(r, 1.0);
      monotone = monotone && off < prev && off > 0.5;
      prev = off;
    }
    push_check(rep, "offset_monotone_to_half", monotone ? 1.0 : 0.0, 1.0, 0.0);
  }

  // Max-of-services distribution: density normalization and Monte Carlo mean.
  {
    RandomStream rng(opt.seed, 0xE2);
    for (int r : {2, 4, 10}) {
      const double quad = simpson(
          0.0, 50.0, 200000,
          [](int rr, double mu, double z) { return max_service_density(rr, mu, z); },
          r, 1.0);
      push_check(rep, "max_service_density_norm_r" + std::to_string(r), quad,
                 1.0, 1e-6);

      const int samples = 1'000'000;
      double acc = 0.0;
      for (int i = 0; i < samples; ++i) {
        const double s1 = rng.exponential(1.0);
        const double s2 = rng.exponential(1.0);
        const double tau = rng.exponential((2.0 * r - 1));
        acc += std::max(s1, s2 + tau);
      }
      push_check(rep, "max_service_mc_r" + std::to_string(r), acc / samples,
                 max_service_expectation(r, 1.0), 1e-2);
    }
  }

  // Simulation vs. analytic values.
  if (opt.with_simulation) {
    SimOptions sim;
    sim.horizon = opt.horizon;
    sim.warmup = opt.warmup;
    sim.seed = opt.seed;

    {
      const SystemConfig cfg(2, 1.5, 1.0);
      const ReplicatedResult res =
          run_replications(SchedulerKind::bos, cfg, sim, opt.reps);
      const double analytic =
          bos_mean_packet_delay(bos_stationary(cfg, opt.tol), cfg).value;
      push_ci_check(rep, "sim_bos_packet_delay_r2", res.packet_delay, analytic);
      push_ci_check(rep, "sim_bos_offset_r2", res.offset,
                    bos_request_delay_offset(2, 1.0));
    }
    {
      const SystemConfig cfg(2, 1.0, 1.0);
      const ReplicatedResult res =
          run_replications(SchedulerKind::uncoded, cfg, sim, opt.reps);
      const double analytic =
          mmr_mean_packet_delay(mmr_stationary(cfg, opt.tol), cfg.lambda);
      push_ci_check(rep, "sim_uncoded_packet_delay_r2", res.packet_delay,
                    analytic);
    }
  }

  return rep;
}

}  // namespace codedq
