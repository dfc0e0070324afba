#pragma once

#include <vector>

#include "codedq/system_config.hpp"

namespace codedq {

// Largest arrival rate the coded system sustains under blocking-one
// scheduling: r*mu*(1 - 1/(8r^2 - 4r + 1)). The bound is open; lambda equal
// to it is treated as unstable.
double bos_capacity(int r, double mu);

// Closed-form ingredients of the stationary recursion for the blocking-one
// chain. eta < 1 is exactly the stability condition; the a_l sequence links
// the low states to pi_0 via pi_l = a_l * pi_0.
struct BosCoefficients {
  double eta = 0.0;
  double gamma_p = 0.0;  // > 0
  double gamma_g = 0.0;  // < 0
  double beta_p = 0.0;   // > 0
  double beta_g = 0.0;   // <= 0
  std::vector<double> a;  // a_0 .. a_{2r-1}
};

BosCoefficients bos_coefficients(const SystemConfig& config);

// Stationary distribution of the coded system under blocking-one scheduling.
// Level m groups the perfect and good states holding 2r+2m packet requests
// and the odd state holding 2r+2m+1.
struct BosDistribution {
  std::vector<double> pi_low;      // pi_0 .. pi_{2r-1}
  std::vector<double> pi_perfect;  // indexed by level m
  std::vector<double> pi_good;
  std::vector<double> pi_odd;
  double tail_mass = 0.0;  // geometric estimate of mass beyond the last level

  int levels() const { return static_cast<int>(pi_perfect.size()); }
  double total_mass() const;
};

// Runs the level-by-level recursion until the combined mass of a level drops
// below tol, then extrapolates the remaining tail geometrically from the last
// two level-mass ratios. Throws UnstableSystem when lambda is at or above
// capacity (1 - eta <= 0) and NumericalBreakdown if an iterate goes negative
// beyond -1e-12 (values inside that band are floored at zero).
BosDistribution bos_stationary(const SystemConfig& config, double tol = 1e-12);

// A mean together with a bound on how much the level cutoff can still move it.
struct TruncatedMean {
  double value = 0.0;
  double truncation_error = 0.0;
};

// Mean packet sojourn: the packet-count-weighted state mass divided by the
// packet arrival rate 2*lambda. The tail beyond the last computed level is
// added by geometric extrapolation and the same quantity is reported as the
// truncation error. Throws DivisionByZero when lambda == 0.
TruncatedMean bos_mean_packet_delay(const BosDistribution& dist,
                                    const SystemConfig& config);

// Exact gap between mean request delay and mean packet delay under
// blocking-one scheduling. Positive for every r >= 2 and decreasing toward
// 1/(2 mu) as r grows.
double bos_request_delay_offset(int r, double mu);

double bos_mean_request_delay(double packet_delay, const SystemConfig& config);

// (d_uncoded - d_coded) / d_uncoded; negative when coding is slower.
double delay_gain(double d_uncoded, double d_coded);

// Z = max(s1, s2 + tau): the later of the two packet completions measured
// from the first packet's assignment, where s1, s2 ~ exp(mu) are the service
// times and tau ~ exp((2r-1) mu) is the lag until a second distinct unit
// frees up.
double max_service_expectation(int r, double mu);
double max_service_density(int r, double mu, double z);

enum class DelaySource { analytic, simulation };

// Point estimates for one analysis or simulation run. Confidence halfwidths
// are zero for analytic sources.
struct DelayReport {
  double mean_packet_delay = 0.0;
  double mean_request_delay = 0.0;
  DelaySource source = DelaySource::analytic;
  double ci_halfwidth_packet = 0.0;
  double ci_halfwidth_request = 0.0;
  long n_samples = 0;
};

}  // namespace codedq
