#include <doctest.h>

#include <cmath>
#include <vector>

#include "codedq/chain.hpp"
#include "codedq/mmr.hpp"

using namespace codedq;

TEST_CASE("stationary probabilities at r=2, lambda=1, mu=1") {
  const SystemConfig cfg(2, 1.0, 1.0);
  const MmrDistribution d = mmr_stationary(cfg);

  CHECK(d.rho == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.probs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(d.probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(d.probs[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(d.probs[3] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(std::abs(d.total_mass() - 1.0) < 1e-12);
}

TEST_CASE("empty system at lambda=0") {
  const MmrDistribution d = mmr_stationary(SystemConfig(2, 0.0, 1.0));
  CHECK(d.probs[0] == 1.0);
  for (std::size_t i = 1; i < d.probs.size(); ++i) CHECK(d.probs[i] == 0.0);
  CHECK(d.tail_mass == 0.0);
}

TEST_CASE("geometric tail identity at r=3, lambda=2.9") {
  const MmrDistribution d = mmr_stationary(SystemConfig(3, 2.9, 1.0));
  CHECK(std::abs(d.total_mass() - 1.0) < 1e-12);
  const double rho = 2.9 / 3.0;
  for (int m = 1; m + 3 <= d.truncation_index; ++m)
    CHECK(d.probs[3 + m] / d.probs[3] ==
          doctest::Approx(std::pow(rho, m)).epsilon(1e-12));
}

TEST_CASE("mean packet delay") {
  SUBCASE("r=2, lambda=1: Erlang value 4/3") {
    const SystemConfig cfg(2, 1.0, 1.0);
    const double d = mmr_mean_packet_delay(mmr_stationary(cfg), 1.0);
    CHECK(d == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  }
  SUBCASE("delay tends to pure service time as lambda -> 0") {
    const SystemConfig cfg(2, 1e-9, 1.0);
    const double d = mmr_mean_packet_delay(mmr_stationary(cfg), 1e-9);
    CHECK(d == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("r=4, lambda=3.5: golden value frozen from the direct solve") {
    // Recorded from the truncated birth-death generator solve before the
    // closed forms were written.
    const SystemConfig cfg(4, 3.5, 1.0);
    const double d = mmr_mean_packet_delay(mmr_stationary(cfg), 3.5);
    CHECK(d == doctest::Approx(2.475722188076214).epsilon(1e-12));

    // Same value via the live generator solve.
    const MmrDistribution dist = mmr_stationary(cfg);
    const GeneratorMatrix bd =
        build_birth_death(4, 3.5, 1.0, dist.truncation_index + 300);
    const StationaryDistribution direct = solve_stationary_direct(bd);
    double en = 0.0;
    for (std::size_t m = 0; m < direct.probs.size(); ++m) en += m * direct.probs[m];
    CHECK(en / 3.5 == doctest::Approx(d).epsilon(1e-10));
  }
  SUBCASE("lambda=0 is an error, not infinity") {
    const MmrDistribution d = mmr_stationary(SystemConfig(2, 0.0, 1.0));
    CHECK_THROWS_AS(mmr_mean_packet_delay(d, 0.0), DivisionByZero);
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(mmr_stationary(SystemConfig(2, 2.0, 1.0)), UnstableSystem);
  CHECK_THROWS_AS(mmr_stationary(SystemConfig(3, 3.5, 1.0)), UnstableSystem);
  CHECK_THROWS_AS(SystemConfig(1, 1.0, 1.0), InvalidConfig);
  CHECK_THROWS_AS(SystemConfig(2, 1.0, 0.0), InvalidConfig);
  CHECK_THROWS_AS(SystemConfig(2, -1.0, 1.0), InvalidConfig);
  CHECK_THROWS_AS(mmr_stationary(SystemConfig(2, 1.0, 1.0), 0.0), InvalidConfig);
}

TEST_CASE("normalization and balance on a config grid") {
  for (int r : {2, 3, 4}) {
    for (double f : {0.3, 0.6, 0.9}) {
      const double lambda = f * r;  // rho = f with mu = 1
      const SystemConfig cfg(r, lambda, 1.0);
      const MmrDistribution d = mmr_stationary(cfg);

      CHECK(std::abs(d.total_mass() - 1.0) < 1e-12);
      for (double p : d.probs) CHECK(p >= 0.0);

      // Birth-death balance: lambda pi_m = min(m+1, r) mu pi_{m+1}.
      for (int m = 0; m < d.truncation_index; ++m) {
        const double lhs = lambda * d.probs[m];
        const double rhs = std::min(m + 1, r) * 1.0 * d.probs[m + 1];
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("oracle equivalence against the direct birth-death solve") {
  for (int r : {2, 3, 4}) {
    for (double f : {0.3, 0.6, 0.9}) {
      const SystemConfig cfg(r, f * r, 1.0);
      const MmrDistribution d = mmr_stationary(cfg);
      const GeneratorMatrix bd =
          build_birth_death(r, f * r, 1.0, d.truncation_index + 200);
      const StationaryDistribution direct = solve_stationary_direct(bd);
      for (int m = 0; m <= d.truncation_index; ++m)
        CHECK(std::abs(d.probs[m] - direct.probs[m]) < 1e-10);
    }
  }
}

TEST_CASE("mean delay strictly increases with lambda") {
  for (int r : {2, 4}) {
    double prev = 0.0;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
      const SystemConfig cfg(r, f * r, 1.0);
      const double d = mmr_mean_packet_delay(mmr_stationary(cfg), f * r);
      CHECK(d > prev);
      prev = d;
    }
  }
}
