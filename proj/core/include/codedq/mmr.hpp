#pragma once

#include <vector>

#include "codedq/system_config.hpp"

namespace codedq {

// Stationary distribution of one M/M/r branch of the replication system.
// probs holds pi_0..pi_M. Beyond the truncation index the chain is exactly
// geometric, pi_{M+j} = rho^j * pi_M, so the remainder is kept in closed form
// as tail_mass instead of being summed term by term.
struct MmrDistribution {
  std::vector<double> probs;
  double rho = 0.0;          // lambda / (r mu)
  int truncation_index = 0;  // M = probs.size() - 1
  double tail_mass = 0.0;    // mass of states M+1, M+2, ...

  double total_mass() const;
};

// Exact M/M/r stationary probabilities for one branch fed at rate lambda.
// The truncation index is the smallest M >= r whose remaining geometric mass
// is below tol. Throws UnstableSystem when lambda >= r*mu.
MmrDistribution mmr_stationary(const SystemConfig& config, double tol = 1e-12);

// Mean packet sojourn E[N] / lambda, with the geometric tail beyond the
// truncation index contributed in closed form rather than dropped.
// Throws DivisionByZero when lambda == 0.
double mmr_mean_packet_delay(const MmrDistribution& dist, double lambda);

}  // namespace codedq
