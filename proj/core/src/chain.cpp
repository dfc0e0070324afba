#include "codedq/chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace codedq {

int packet_count(ChainState s, int r) {
  switch (s.kind) {
    case StateKind::low:
      return s.index;
    case StateKind::perfect:
    case StateKind::good:
      return 2 * r + 2 * s.index;
    case StateKind::odd:
      return 2 * r + 2 * s.index + 1;
  }
  return 0;
}

std::string to_string(ChainState s) {
  switch (s.kind) {
    case StateKind::low:
      return "L" + std::to_string(s.index);
    case StateKind::perfect:
      return "P" + std::to_string(s.index);
    case StateKind::good:
      return "G" + std::to_string(s.index);
    case StateKind::odd:
      return "O" + std::to_string(s.index);
  }
  return "?";
}

std::vector<std::pair<ChainState, double>> transitions_from(
    ChainState s, const SystemConfig& config) {
  const int r = config.r;
  const double lambda = config.lambda;
  const double mu = config.mu;
  const int n = 2 * r;

  std::vector<std::pair<ChainState, double>> out;
  switch (s.kind) {
    case StateKind::low: {
      const int l = s.index;
      if (l < 0 || l >= n) throw InvalidConfig("transitions_from: bad low state");
      if (l >= 1) out.push_back({ChainState{StateKind::low, l - 1}, l * mu});
      if (lambda > 0) {
        if (l <= n - 3)
          out.push_back({ChainState{StateKind::low, l + 2}, lambda});
        else if (l == n - 2)
          out.push_back({ChainState{StateKind::perfect, 0}, lambda});
        else  // l == n-1: one packet queues behind the full units
          out.push_back({ChainState{StateKind::odd, 0}, lambda});
      }
      break;
    }
    case StateKind::perfect: {
      const int m = s.index;
      const ChainState down = m >= 1 ? ChainState{StateKind::odd, m - 1}
                                     : ChainState{StateKind::low, n - 1};
      out.push_back({down, n * mu});
      if (lambda > 0)
        out.push_back({ChainState{StateKind::perfect, m + 1}, lambda});
      break;
    }
    case StateKind::good: {
      const int m = s.index;
      const ChainState down = m >= 1 ? ChainState{StateKind::odd, m - 1}
                                     : ChainState{StateKind::low, n - 1};
      out.push_back({down, (n - 1) * mu});
      if (lambda > 0)
        out.push_back({ChainState{StateKind::good, m + 1}, lambda});
      break;
    }
    case StateKind::odd: {
      const int m = s.index;
      out.push_back({ChainState{StateKind::perfect, m}, (n - 1) * mu});
      out.push_back({ChainState{StateKind::good, m}, mu});
      if (lambda > 0) out.push_back({ChainState{StateKind::odd, m + 1}, lambda});
      break;
    }
  }
  return out;
}

namespace {

// Canonical state order: Low(0..2r-1), then (P,G,O) per level.
int state_index(ChainState s, int r, int levels) {
  switch (s.kind) {
    case StateKind::low:
      return s.index < 2 * r ? s.index : -1;
    case StateKind::perfect:
      return s.index < levels ? 2 * r + 3 * s.index : -1;
    case StateKind::good:
      return s.index < levels ? 2 * r + 3 * s.index + 1 : -1;
    case StateKind::odd:
      return s.index < levels ? 2 * r + 3 * s.index + 2 : -1;
  }
  return -1;
}

std::vector<ChainState> canonical_states(int r, int levels) {
  std::vector<ChainState> states;
  states.reserve(static_cast<std::size_t>(2 * r + 3 * levels));
  for (int l = 0; l < 2 * r; ++l)
    states.push_back(ChainState{StateKind::low, l});
  for (int m = 0; m < levels; ++m) {
    states.push_back(ChainState{StateKind::perfect, m});
    states.push_back(ChainState{StateKind::good, m});
    states.push_back(ChainState{StateKind::odd, m});
  }
  return states;
}

StationaryDistribution solve_generator(const GeneratorMatrix& gen) {
  const int n = gen.size();
  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;

  // pi Q = 0 with one balance equation traded for normalization.
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = gen.rate(j, i);
  A.row(0).setOnes();
  Vec b = Vec::Zero(n);
  b(0) = 1.0;

  Vec pi = A.partialPivLu().solve(b);

  StationaryDistribution dist;
  dist.states = gen.states;
  dist.probs.assign(pi.data(), pi.data() + n);

  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double flow = 0.0;
    for (int i = 0; i < n; ++i) flow += dist.probs[i] * gen.rate(i, j);
    worst = std::max(worst, std::abs(flow));
  }
  dist.residual = worst;

  double minp = 0.0;
  for (double p : dist.probs) minp = std::min(minp, p);
  if (minp < -1e-10 || !(dist.residual < 1e-7))
    throw SingularSystem("solve_stationary_direct: solve failed (residual " +
                         std::to_string(dist.residual) + ", min prob " +
                         std::to_string(minp) + ")");
  for (double& p : dist.probs) p = std::max(p, 0.0);
  return dist;
}

}  // namespace

GeneratorMatrix build_generator(const SystemConfig& config, int levels) {
  if (levels < 1) throw InvalidConfig("build_generator: levels must be >= 1");
  const int r = config.r;

  GeneratorMatrix gen;
  gen.levels = levels;
  gen.states = canonical_states(r, levels);
  const int n = gen.size();
  gen.rates.assign(static_cast<std::size_t>(n) * n, 0.0);

  for (int i = 0; i < n; ++i) {
    double out_rate = 0.0;
    for (const auto& [to, rate] : transitions_from(gen.states[i], config)) {
      const int j = state_index(to, r, levels);
      if (j < 0) continue;  // arrival past the top level: dropped (reflecting)
      gen.rates[static_cast<std::size_t>(i) * n + j] += rate;
      out_rate += rate;
    }
    gen.rates[static_cast<std::size_t>(i) * n + i] = -out_rate;
  }
  return gen;
}

GeneratorMatrix build_birth_death(int servers, double lambda, double mu,
                                  int max_state) {
  if (servers < 1) throw InvalidConfig("build_birth_death: servers must be >= 1");
  if (max_state < 1) throw InvalidConfig("build_birth_death: max_state must be >= 1");
  if (!(mu > 0) || !(lambda >= 0))
    throw InvalidConfig("build_birth_death: bad rates");

  GeneratorMatrix gen;
  gen.levels = 0;
  const int n = max_state + 1;
  gen.states.reserve(n);
  for (int m = 0; m < n; ++m)
    gen.states.push_back(ChainState{StateKind::low, m});
  gen.rates.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int m = 0; m < n; ++m) {
    double out_rate = 0.0;
    if (m < max_state) {
      gen.rates[static_cast<std::size_t>(m) * n + m + 1] = lambda;
      out_rate += lambda;
    }
    if (m > 0) {
      const double svc = std::min(m, servers) * mu;
      gen.rates[static_cast<std::size_t>(m) * n + m - 1] = svc;
      out_rate += svc;
    }
    gen.rates[static_cast<std::size_t>(m) * n + m] = -out_rate;
  }
  return gen;
}

StationaryDistribution solve_stationary_direct(const GeneratorMatrix& gen) {
  if (gen.size() == 0)
    throw InvalidConfig("solve_stationary_direct: empty generator");
  return solve_generator(gen);
}

DistributionGap compare_distributions(const StationaryDistribution& a,
                                      const StationaryDistribution& b) {
  if (a.states != b.states || a.probs.size() != b.probs.size())
    throw ShapeMismatch("compare_distributions: state spaces differ");
  DistributionGap gap;
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    const double d = std::abs(a.probs[i] - b.probs[i]);
    if (d > gap.max_abs_diff) {
      gap.max_abs_diff = d;
      gap.argmax_index = static_cast<int>(i);
      gap.argmax_state = a.states[i];
    }
  }
  return gap;
}

StationaryDistribution to_stationary(const BosDistribution& dist,
                                     const SystemConfig& config, int levels) {
  if (levels < 1) throw InvalidConfig("to_stationary: levels must be >= 1");
  const int r = config.r;
  StationaryDistribution out;
  out.states = canonical_states(r, levels);
  out.probs.assign(out.states.size(), 0.0);
  for (int l = 0; l < 2 * r; ++l) out.probs[l] = dist.pi_low[l];
  const int have = std::min(levels, dist.levels());
  for (int m = 0; m < have; ++m) {
    out.probs[static_cast<std::size_t>(2 * r + 3 * m)] = dist.pi_perfect[m];
    out.probs[static_cast<std::size_t>(2 * r + 3 * m + 1)] = dist.pi_good[m];
    out.probs[static_cast<std::size_t>(2 * r + 3 * m + 2)] = dist.pi_odd[m];
  }
  return out;
}

BosDistribution to_level_form(const StationaryDistribution& dist,
                              const SystemConfig& config) {
  const int r = config.r;
  const int n = static_cast<int>(dist.probs.size());
  if (n < 2 * r || (n - 2 * r) % 3 != 0)
    throw ShapeMismatch("to_level_form: not a canonical chain layout");
  const int levels = (n - 2 * r) / 3;
  if (dist.states != canonical_states(r, levels))
    throw ShapeMismatch("to_level_form: states not in canonical order");

  BosDistribution out;
  out.pi_low.assign(dist.probs.begin(), dist.probs.begin() + 2 * r);
  out.pi_perfect.resize(levels);
  out.pi_good.resize(levels);
  out.pi_odd.resize(levels);
  for (int m = 0; m < levels; ++m) {
    out.pi_perfect[m] = dist.probs[static_cast<std::size_t>(2 * r + 3 * m)];
    out.pi_good[m] = dist.probs[static_cast<std::size_t>(2 * r + 3 * m + 1)];
    out.pi_odd[m] = dist.probs[static_cast<std::size_t>(2 * r + 3 * m + 2)];
  }
  return out;
}

double generator_residual_inf(const StationaryDistribution& dist,
                              const SystemConfig& config, int levels) {
  const int r = config.r;
  const int n = 2 * r + 3 * levels;
  if (static_cast<int>(dist.probs.size()) != n)
    throw ShapeMismatch("generator_residual_inf: size != 2r + 3*levels");

  std::vector<double> flow(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double p = dist.probs[i];
    double out_rate = 0.0;
    for (const auto& [to, rate] : transitions_from(dist.states[i], config)) {
      const int j = state_index(to, r, levels);
      if (j < 0) continue;
      flow[j] += p * rate;
      out_rate += rate;
    }
    flow[i] -= p * out_rate;
  }
  double worst = 0.0;
  for (double f : flow) worst = std::max(worst, std::abs(f));
  return worst;
}

double CutResiduals::max() const {
  return std::max(std::max(odd_balance, diagonal),
                  std::max(pair_set, low_balance));
}

CutResiduals cut_residuals(const BosDistribution& dist,
                           const SystemConfig& config) {
  const int r = config.r;
  const double lambda = config.lambda;
  const double mu = config.mu;
  const double n = 2.0 * r;
  const auto& low = dist.pi_low;
  const auto& p = dist.pi_perfect;
  const auto& g = dist.pi_good;
  const auto& o = dist.pi_odd;
  const int M = dist.levels();

  CutResiduals res;
  auto track = [](double& worst, double lhs, double rhs) {
    worst = std::max(worst, std::abs(lhs - rhs));
  };

  // Low-state cuts: pi_1 = (lambda/mu) pi_0, then the paired even/odd cuts.
  track(res.low_balance, mu * low[1], lambda * low[0]);
  for (int i = 1; 2 * i < 2 * r; ++i)
    track(res.low_balance, 2 * i * mu * low[2 * i],
          lambda * (low[2 * i - 2] + low[2 * i - 1]));
  for (int i = 1; 2 * i + 1 < 2 * r; ++i)
    track(res.low_balance, (2 * i + 1) * mu * low[2 * i + 1],
          lambda * (low[2 * i - 1] + low[2 * i]));

  // Flow into each odd state: 2r*mu pi_odd(m) = lambda (p + g + odd_below).
  for (int m = 0; m < M; ++m) {
    const double below = m > 0 ? o[m - 1] : low[2 * r - 1];
    track(res.odd_balance, n * mu * o[m], lambda * (p[m] + g[m] + below));
  }

  // Diagonal cuts past each (perfect, good) pair.
  track(res.diagonal, lambda * (low[2 * r - 2] + low[2 * r - 1]),
        p[0] * n * mu + g[0] * (n - 1) * mu);
  for (int m = 0; m + 1 < M; ++m)
    track(res.diagonal, lambda * (p[m] + g[m] + o[m]),
          p[m + 1] * n * mu + g[m + 1] * (n - 1) * mu);

  // Total flow around each {perfect, good} pair.
  if (M > 0)
    track(res.pair_set,
          p[0] * (lambda + n * mu) + g[0] * (lambda + (n - 1) * mu),
          lambda * low[2 * r - 2] + o[0] * n * mu);
  for (int m = 1; m < M; ++m)
    track(res.pair_set,
          p[m] * (lambda + n * mu) + g[m] * (lambda + (n - 1) * mu),
          lambda * (p[m - 1] + g[m - 1]) + o[m] * n * mu);

  return res;
}

}  // namespace codedq
