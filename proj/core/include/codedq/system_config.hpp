#pragma once

#include "codedq/errors.hpp"

namespace codedq {

// Parameters shared by every analysis and simulation. The storage system
// always has n = 2r units and each content request spawns exactly two packet
// requests; both are constants of the model, so only (r, lambda, mu) vary.
struct SystemConfig {
  int r;          // redundancy factor; n = 2r storage units
  double lambda;  // content-request arrival rate
  double mu;      // per-unit service rate

  SystemConfig(int r_, double lambda_, double mu_)
      : r(r_), lambda(lambda_), mu(mu_) {
    if (r < 2) throw InvalidConfig("SystemConfig: r must be >= 2");
    if (!(mu > 0)) throw InvalidConfig("SystemConfig: mu must be > 0");
    if (!(lambda >= 0)) throw InvalidConfig("SystemConfig: lambda must be >= 0");
  }

  int units() const { return 2 * r; }

  static constexpr int kPacketsPerRequest = 2;
};

}  // namespace codedq
