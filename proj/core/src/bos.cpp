#include "codedq/bos.hpp"

#include <cmath>
#include <string>

namespace codedq {

namespace {

constexpr double kNegativeIterateTol = -1e-12;
constexpr int kMaxLevels = 10'000'000;

// Iterates within rounding of zero are floored; anything more negative means
// the coupled recursion has lost the solution.
double checked_mass(double x, const char* what, int level) {
  if (x < kNegativeIterateTol)
    throw NumericalBreakdown(std::string("bos_stationary: ") + what +
                             " went negative at level " +
                             std::to_string(level));
  return x < 0.0 ? 0.0 : x;
}

}  // namespace

double bos_capacity(int r, double mu) {
  if (r < 2) throw InvalidConfig("bos_capacity: r must be >= 2");
  if (!(mu > 0)) throw InvalidConfig("bos_capacity: mu must be > 0");
  const double denom = 8.0 * r * r - 4.0 * r + 1.0;
  return r * mu * (1.0 - 1.0 / denom);
}

BosCoefficients bos_coefficients(const SystemConfig& config) {
  const int r = config.r;
  const double lambda = config.lambda;
  const double mu = config.mu;
  const double n = 2.0 * r;  // storage units

  BosCoefficients c;
  c.eta = lambda / (n * mu) + lambda * (n - 1) * mu / ((n * mu) * (n * mu)) +
          lambda * mu / ((n - 1) * mu * n * mu);
  c.gamma_p = n * mu * (lambda + (n - 1) * mu) / mu + (lambda + n * mu);
  c.gamma_g = -(n - 1) * mu * (lambda + n * mu) / (n * mu) -
              (n - 1) * (lambda + (n - 1) * mu);
  c.beta_p = lambda * (lambda + (n - 1) * mu) / mu;
  c.beta_g = -lambda * (lambda + n * mu) / (n * mu);

  c.a.resize(static_cast<std::size_t>(2 * r));
  c.a[0] = 1.0;
  c.a[1] = lambda / mu;
  for (int l = 2; l < 2 * r; ++l)
    c.a[l] = lambda / (l * mu) * (c.a[l - 1] + c.a[l - 2]);
  return c;
}

double BosDistribution::total_mass() const {
  double s = 0.0;
  for (double p : pi_low) s += p;
  for (double p : pi_perfect) s += p;
  for (double p : pi_good) s += p;
  for (double p : pi_odd) s += p;
  return s + tail_mass;
}

BosDistribution bos_stationary(const SystemConfig& config, double tol) {
  if (!(tol > 0)) throw InvalidConfig("bos_stationary: tol must be > 0");
  const int r = config.r;
  const double lambda = config.lambda;
  const double mu = config.mu;
  const double n = 2.0 * r;

  const BosCoefficients c = bos_coefficients(config);
  if (1.0 - c.eta <= 0.0)
    throw UnstableSystem("bos_stationary: lambda at or above capacity");

  double low_sum = 0.0;  // a_0 + ... + a_{2r-2}
  for (int l = 0; l <= 2 * r - 2; ++l) low_sum += c.a[l];
  const double pi0 =
      (1.0 - c.eta) /
      ((1.0 - c.eta) * low_sum + lambda * c.a[2 * r - 2] / (n * mu) +
       c.a[2 * r - 1]);

  BosDistribution dist;
  dist.pi_low.resize(static_cast<std::size_t>(2 * r));
  for (int l = 0; l < 2 * r; ++l) dist.pi_low[l] = c.a[l] * pi0;

  // Level 0 closed forms; both share the inhomogeneous term lambda*pi_{2r-2}.
  const double x0 = dist.pi_low[2 * r - 1] + dist.pi_low[2 * r - 2];
  const double t0 = lambda * dist.pi_low[2 * r - 2];
  dist.pi_perfect.push_back(
      checked_mass((c.beta_p * x0 + t0) / c.gamma_p, "perfect", 0));
  dist.pi_good.push_back(
      checked_mass((c.beta_g * x0 + t0) / c.gamma_g, "good", 0));

  for (int m = 0;; ++m) {
    const double prev_odd = m > 0 ? dist.pi_odd[m - 1] : dist.pi_low[2 * r - 1];
    dist.pi_odd.push_back(checked_mass(
        lambda / (n * mu) * (dist.pi_perfect[m] + dist.pi_good[m] + prev_odd),
        "odd", m));

    const double level_mass =
        dist.pi_perfect[m] + dist.pi_good[m] + dist.pi_odd[m];
    if (level_mass < tol) break;
    if (m + 1 >= kMaxLevels)
      throw NumericalBreakdown(
          "bos_stationary: level budget exhausted before reaching tol");

    const double x = level_mass;
    const double t =
        lambda * dist.pi_perfect[m] - (n - 1) * lambda * dist.pi_good[m];
    dist.pi_perfect.push_back(
        checked_mass((c.beta_p * x + t) / c.gamma_p, "perfect", m + 1));
    dist.pi_good.push_back(
        checked_mass((c.beta_g * x + t) / c.gamma_g, "good", m + 1));
  }

  // Tail beyond the last level, extrapolated from the final mass ratio.
  const int M = dist.levels() - 1;
  if (M >= 1) {
    const double last = dist.pi_perfect[M] + dist.pi_good[M] + dist.pi_odd[M];
    const double prev =
        dist.pi_perfect[M - 1] + dist.pi_good[M - 1] + dist.pi_odd[M - 1];
    if (last > 0.0 && prev > 0.0) {
      const double q = last / prev;
      if (q >= 1.0)
        throw NumericalBreakdown(
            "bos_stationary: level masses not decaying at truncation");
      dist.tail_mass = last * q / (1.0 - q);
    }
  }
  return dist;
}

TruncatedMean bos_mean_packet_delay(const BosDistribution& dist,
                                    const SystemConfig& config) {
  if (config.lambda == 0.0)
    throw DivisionByZero(
        "bos_mean_packet_delay: lambda == 0, delay undefined");
  const int r = config.r;

  double weighted = 0.0;
  for (int l = 0; l < 2 * r; ++l) weighted += l * dist.pi_low[l];
  for (int m = 0; m < dist.levels(); ++m) {
    weighted += (2.0 * r + 2 * m) * (dist.pi_perfect[m] + dist.pi_good[m]);
    weighted += (2.0 * r + 2 * m + 1) * dist.pi_odd[m];
  }

  // Tail levels m > M carry mass ~ last * q^j at packet counts 2r+2(M+j)+1;
  // their weighted sum has the closed form below. It is added to the value
  // and reported as the truncation error (the counts in a level differ by at
  // most one, which is what the extra last*q/(1-q) term in the bound covers).
  double tail_weighted = 0.0;
  double tail_bound = 0.0;
  const int M = dist.levels() - 1;
  if (M >= 1) {
    const double last = dist.pi_perfect[M] + dist.pi_good[M] + dist.pi_odd[M];
    const double prev =
        dist.pi_perfect[M - 1] + dist.pi_good[M - 1] + dist.pi_odd[M - 1];
    if (last > 0.0 && prev > 0.0) {
      const double q = last / prev;
      const double geo = q / (1.0 - q);        // sum q^j
      const double geo1 = q / ((1.0 - q) * (1.0 - q));  // sum j q^j
      tail_weighted = last * ((2.0 * r + 2 * M + 1) * geo + 2.0 * geo1);
      tail_bound = tail_weighted + last * geo;
    }
  }

  const double denom = 2.0 * config.lambda;
  return TruncatedMean{(weighted + tail_weighted) / denom, tail_bound / denom};
}

double bos_request_delay_offset(int r, double mu) {
  if (r < 2) throw InvalidConfig("bos_request_delay_offset: r must be >= 2");
  if (!(mu > 0)) throw InvalidConfig("bos_request_delay_offset: mu must be > 0");
  const double n = 2.0 * r;
  return (n - 1) / (n - 2) / (2.0 * mu) - 1.0 / ((n - 2) * (n - 1) * n * mu) -
         1.0 / (2.0 * (n - 1) * mu);
}

double bos_mean_request_delay(double packet_delay, const SystemConfig& config) {
  return packet_delay + bos_request_delay_offset(config.r, config.mu);
}

double delay_gain(double d_uncoded, double d_coded) {
  if (d_uncoded == 0.0)
    throw DivisionByZero("delay_gain: d_uncoded == 0, gain undefined");
  return (d_uncoded - d_coded) / d_uncoded;
}

double max_service_expectation(int r, double mu) {
  if (r < 2) throw InvalidConfig("max_service_expectation: r must be >= 2");
  if (!(mu > 0)) throw InvalidConfig("max_service_expectation: mu must be > 0");
  const double n = 2.0 * r;
  return 1.0 / mu + (n - 1) / (n - 2) / (2.0 * mu) -
         1.0 / ((n - 2) * (n - 1) * n * mu);
}

double max_service_density(int r, double mu, double z) {
  if (r < 2) throw InvalidConfig("max_service_density: r must be >= 2");
  if (!(mu > 0)) throw InvalidConfig("max_service_density: mu must be > 0");
  if (z < 0.0) return 0.0;
  const double n = 2.0 * r;
  const double c = (n - 1) / (n - 2);
  return c * mu * std::exp(-mu * z) - c * mu * std::exp(-(n - 1) * mu * z) +
         mu * std::exp(-mu * z) - 2.0 * c * mu * std::exp(-2.0 * mu * z) +
         n / (n - 2) * mu * std::exp(-n * mu * z);
}

}  // namespace codedq
