#include "codedq/mmr.hpp"

#include <cmath>

namespace codedq {

double MmrDistribution::total_mass() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s + tail_mass;
}

MmrDistribution mmr_stationary(const SystemConfig& config, double tol) {
  if (!(tol > 0)) throw InvalidConfig("mmr_stationary: tol must be > 0");
  const int r = config.r;
  const double lambda = config.lambda;
  const double mu = config.mu;
  if (lambda >= r * mu)
    throw UnstableSystem("mmr_stationary: lambda >= r*mu, branch unstable");

  const double rho = lambda / (r * mu);

  // term_m = (r rho)^m / m!, built multiplicatively to avoid overflow.
  std::vector<double> term(static_cast<std::size_t>(r) + 1);
  term[0] = 1.0;
  for (int m = 1; m <= r; ++m) term[m] = term[m - 1] * (r * rho) / m;

  double denom = 0.0;
  for (int m = 0; m < r; ++m) denom += term[m];
  denom += term[r] / (1.0 - rho);
  const double pi0 = 1.0 / denom;

  const double pi_r = term[r] * pi0;

  // Smallest M >= r whose remaining geometric mass pi_r rho^{M-r}/(1-rho)
  // is below tol.
  int M = r;
  double mass_from_M = pi_r / (1.0 - rho);
  constexpr int kMaxIndex = 10'000'000;
  while (mass_from_M >= tol && M < kMaxIndex) {
    mass_from_M *= rho;
    ++M;
  }

  MmrDistribution dist;
  dist.rho = rho;
  dist.truncation_index = M;
  dist.probs.resize(static_cast<std::size_t>(M) + 1);
  for (int m = 0; m <= r; ++m) dist.probs[m] = term[m] * pi0;
  for (int m = r + 1; m <= M; ++m) dist.probs[m] = dist.probs[m - 1] * rho;
  dist.tail_mass = dist.probs[M] * rho / (1.0 - rho);
  return dist;
}

double mmr_mean_packet_delay(const MmrDistribution& dist, double lambda) {
  if (lambda == 0.0)
    throw DivisionByZero("mmr_mean_packet_delay: lambda == 0, delay undefined");
  if (!(lambda > 0)) throw InvalidConfig("mmr_mean_packet_delay: lambda < 0");

  const int M = dist.truncation_index;
  double en = 0.0;
  for (int m = 0; m <= M; ++m) en += m * dist.probs[m];

  // Geometric tail: sum_{j >= M+1} j pi_j with pi_j = rho^{j-M} pi_M, i.e.
  // pi_{M+1} ((M+1) - M rho) / (1-rho)^2, added in closed form.
  const double rho = dist.rho;
  const double pi_next = dist.probs[M] * rho;
  en += pi_next * ((M + 1) - M * rho) / ((1.0 - rho) * (1.0 - rho));

  return en / lambda;
}

}  // namespace codedq
