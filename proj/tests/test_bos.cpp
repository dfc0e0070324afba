#include <doctest.h>

#include <cmath>

#include "codedq/bos.hpp"
#include "codedq/chain.hpp"
#include "codedq/mmr.hpp"
#include "codedq/rng.hpp"
#include "rational.hpp"

using namespace codedq;
using testutil::Rational;

TEST_CASE("capacity") {
  SUBCASE("r=2 reaches 96% of r*mu") {
    CHECK(std::abs(bos_capacity(2, 1.0) - 1.92) < 1e-14);
    CHECK(std::abs(bos_capacity(2, 1.0) / 2.0 - 0.96) < 1e-14);
  }
  SUBCASE("r=4: 8r^2-4r+1 = 113") {
    CHECK(bos_capacity(4, 1.0) ==
          doctest::Approx(4.0 * 112.0 / 113.0).epsilon(1e-15));
  }
  SUBCASE("loss fraction shrinks as 1/r^2") {
    for (int r = 2; r <= 64; r *= 2) {
      const double loss = 1.0 - bos_capacity(r, 1.0) / r;
      CHECK(loss == doctest::Approx(1.0 / (8.0 * r * r - 4 * r + 1)).epsilon(1e-12));
      CHECK(loss * r * r < 0.17);  // bounded; limit 1/8
      CHECK(loss * r * r > 0.125);
    }
  }
  SUBCASE("scales with mu") {
    CHECK(bos_capacity(2, 2.5) == doctest::Approx(2.5 * 1.92).epsilon(1e-15));
  }
  CHECK_THROWS_AS(bos_capacity(1, 1.0), InvalidConfig);
}

TEST_CASE("coefficients at r=2, lambda=1") {
  const BosCoefficients c = bos_coefficients(SystemConfig(2, 1.0, 1.0));
  CHECK(c.eta == doctest::Approx(25.0 / 48.0).epsilon(1e-15));
  REQUIRE(c.a.size() == 4);
  CHECK(c.a[0] == 1.0);
  CHECK(c.a[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.a[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.a[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c.gamma_p > 0);
  CHECK(c.gamma_g < 0);
  CHECK(c.beta_p > 0);
  CHECK(c.beta_g < 0);
}

TEST_CASE("coefficients vanish with lambda") {
  const BosCoefficients c = bos_coefficients(SystemConfig(2, 0.0, 1.0));
  CHECK(c.eta == 0.0);
  CHECK(c.a[0] == 1.0);
  CHECK(c.a[1] == 0.0);
  CHECK(c.a[2] == 0.0);
  CHECK(c.a[3] == 0.0);
  CHECK(c.beta_p == 0.0);
  CHECK(c.beta_g == 0.0);
}

TEST_CASE("eta re-derived term by term at r=3, lambda=2") {
  // Exact route: the three summands evaluated in rational arithmetic.
  const Rational lam(2), mu(1), n(6);
  const Rational eta_exact = lam / (n * mu) +
                             lam * (n - Rational(1)) * mu / (n * mu * n * mu) +
                             lam * mu / ((n - Rational(1)) * mu * n * mu);
  CHECK(eta_exact == Rational(61, 90));

  // Floating route must agree with the exact value.
  const BosCoefficients c = bos_coefficients(SystemConfig(3, 2.0, 1.0));
  CHECK(c.eta == doctest::Approx(eta_exact.to_double()).epsilon(1e-15));

  // a-sequence, same idea.
  CHECK(c.a[5] == doctest::Approx(Rational(13, 5).to_double()).epsilon(1e-14));
}

TEST_CASE("golden small case in exact rational arithmetic") {
  // pi_0 closed form at r=2, lambda=1, mu=1 evaluated without floating point.
  const Rational lam(1), mu(1);
  const Rational eta = Rational(1, 4) + Rational(3, 16) + Rational(1, 12);
  CHECK(eta == Rational(25, 48));

  Rational a[4];
  a[0] = Rational(1);
  a[1] = lam / mu;
  a[2] = lam / (Rational(2) * mu) * (a[1] + a[0]);
  a[3] = lam / (Rational(3) * mu) * (a[2] + a[1]);
  const Rational one(1);
  const Rational pi0 = (one - eta) /
                       ((one - eta) * (a[0] + a[1] + a[2]) +
                        lam * a[2] / (Rational(4) * mu) + a[3]);
  CHECK(pi0 == Rational(23, 113));

  const BosDistribution d = bos_stationary(SystemConfig(2, 1.0, 1.0));
  CHECK(d.pi_low[0] == doctest::Approx(pi0.to_double()).epsilon(1e-14));
  CHECK(d.pi_low[3] == doctest::Approx((a[3] * pi0).to_double()).epsilon(1e-14));
}

TEST_CASE("stationary distribution") {
  SUBCASE("lambda=0 collapses to the empty state") {
    const BosDistribution d = bos_stationary(SystemConfig(2, 0.0, 1.0));
    CHECK(d.pi_low[0] == 1.0);
    for (int l = 1; l < 4; ++l) CHECK(d.pi_low[l] == 0.0);
    for (int m = 0; m < d.levels(); ++m) {
      CHECK(d.pi_perfect[m] == 0.0);
      CHECK(d.pi_good[m] == 0.0);
      CHECK(d.pi_odd[m] == 0.0);
    }
    CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("r=3, lambda=2.5 equals the direct generator solve") {
    const SystemConfig cfg(3, 2.5, 1.0);
    const BosDistribution d = bos_stationary(cfg);
    const int levels = d.levels() + 2;
    const StationaryDistribution mine = to_stationary(d, cfg, levels);
    const StationaryDistribution oracle =
        solve_stationary_direct(build_generator(cfg, levels));
    CHECK(compare_distributions(mine, oracle).max_abs_diff < 1e-8);
  }
  SUBCASE("mass accounting") {
    for (double f : {0.3, 0.6, 0.9, 0.999}) {
      const SystemConfig cfg(2, f * bos_capacity(2, 1.0), 1.0);
      const BosDistribution d = bos_stationary(cfg);
      CHECK(std::abs(d.total_mass() - 1.0) < 1e-9);
      for (double p : d.pi_low) CHECK(p >= 0.0);
      for (int m = 0; m < d.levels(); ++m) {
        CHECK(d.pi_perfect[m] >= 0.0);
        CHECK(d.pi_good[m] >= 0.0);
        CHECK(d.pi_odd[m] >= 0.0);
      }
    }
  }
  SUBCASE("capacity boundary is strict") {
    const double cap = bos_capacity(2, 1.0);
    CHECK_NOTHROW(bos_stationary(SystemConfig(2, 0.999 * cap, 1.0)));
    CHECK_THROWS_AS(bos_stationary(SystemConfig(2, 1.001 * cap, 1.0)),
                    UnstableSystem);
    CHECK_THROWS_AS(bos_stationary(SystemConfig(2, cap, 1.0)), UnstableSystem);
  }
}

TEST_CASE("mean packet delay") {
  SUBCASE("golden value at r=2, lambda=1") {
    // Frozen from the direct chain solve before the iterative path was built.
    const SystemConfig cfg(2, 1.0, 1.0);
    const TruncatedMean d = bos_mean_packet_delay(bos_stationary(cfg), cfg);
    CHECK(d.value == doctest::Approx(1.2579197127100).epsilon(1e-10));
    CHECK(d.truncation_error < 1e-9);

    // Live oracle route: packet-count-weighted mass of the direct solve.
    const StationaryDistribution oracle =
        solve_stationary_direct(build_generator(cfg, 60));
    double weighted = 0.0;
    for (std::size_t i = 0; i < oracle.probs.size(); ++i)
      weighted += packet_count(oracle.states[i], 2) * oracle.probs[i];
    CHECK(weighted / 2.0 == doctest::Approx(d.value).epsilon(1e-10));
  }
  SUBCASE("light traffic tends to one service time") {
    const SystemConfig cfg(2, 1e-8, 1.0);
    const TruncatedMean d = bos_mean_packet_delay(bos_stationary(cfg), cfg);
    CHECK(d.value == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("coded beats replication at r=4, lambda=3.5") {
    const SystemConfig cfg(4, 3.5, 1.0);
    const double coded = bos_mean_packet_delay(bos_stationary(cfg), cfg).value;
    const double uncoded =
        mmr_mean_packet_delay(mmr_stationary(cfg), cfg.lambda);
    CHECK(coded < uncoded);
  }
  SUBCASE("lambda=0 raises") {
    const SystemConfig zero(2, 0.0, 1.0);
    const BosDistribution d = bos_stationary(zero);
    CHECK_THROWS_AS(bos_mean_packet_delay(d, zero), DivisionByZero);
  }
}

TEST_CASE("request delay offset") {
  SUBCASE("r=2: 13/24") {
    const Rational exact = Rational(3, 4) - Rational(1, 24) - Rational(1, 6);
    CHECK(exact == Rational(13, 24));
    CHECK(bos_request_delay_offset(2, 1.0) ==
          doctest::Approx(exact.to_double()).epsilon(1e-15));
    const SystemConfig cfg(2, 1.5, 1.0);
    CHECK(bos_mean_request_delay(2.0, cfg) ==
          doctest::Approx(2.0 + 13.0 / 24.0).epsilon(1e-15));
  }
  SUBCASE("r=10 decomposition") {
    const double expected =
        (19.0 / 18.0) * 0.5 - 1.0 / (18.0 * 19.0 * 20.0) - 1.0 / 38.0;
    CHECK(bos_request_delay_offset(10, 1.0) ==
          doctest::Approx(expected).epsilon(1e-15));
  }
  SUBCASE("positive, decreasing, limit 1/(2 mu)") {
    double prev = bos_request_delay_offset(2, 1.0);
    CHECK(prev > 0.5);
    for (int r = 3; r <= 100; ++r) {
      const double off = bos_request_delay_offset(r, 1.0);
      CHECK(off < prev);
      CHECK(off > 0.5);
      prev = off;
    }
    CHECK(bos_request_delay_offset(100, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-2));
    CHECK(bos_request_delay_offset(2, 2.0) ==
          doctest::Approx(0.5 * (13.0 / 24.0)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(bos_request_delay_offset(1, 1.0), InvalidConfig);
}

TEST_CASE("delay gain") {
  CHECK(delay_gain(1.5, 1.5) == 0.0);
  CHECK(delay_gain(1.0, 1.2) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK_THROWS_AS(delay_gain(0.0, 1.0), DivisionByZero);

  // Golden gain at r=2, lambda=1: both delays were frozen above.
  const double gain = delay_gain(4.0 / 3.0, 1.2579197127100);
  CHECK(gain == doctest::Approx(0.05656021546750).epsilon(1e-9));
}

TEST_CASE("max of the two packet completions") {
  SUBCASE("expectation at r=2: 41/24") {
    const Rational exact = Rational(1) + Rational(3, 4) - Rational(1, 24);
    CHECK(exact == Rational(41, 24));
    CHECK(max_service_expectation(2, 1.0) ==
          doctest::Approx(exact.to_double()).epsilon(1e-15));
  }
  SUBCASE("density normalizes and reproduces the mean") {
    for (int r : {2, 4, 10}) {
      // Composite Simpson over [0, 50]; the integrand decays like e^{-z}.
      const int n = 400000;
      const double h = 50.0 / n;
      double mass = max_service_density(r, 1.0, 0.0) +
                    max_service_density(r, 1.0, 50.0);
      double mean = 0.0;
      for (int i = 1; i < n; ++i) {
        const double z = i * h;
        const double w = (i % 2 == 1) ? 4.0 : 2.0;
        const double f = max_service_density(r, 1.0, z);
        mass += w * f;
        mean += w * z * f;
      }
      mass *= h / 3.0;
      mean *= h / 3.0;
      CHECK(std::abs(mass - 1.0) < 1e-6);
      CHECK(mean == doctest::Approx(max_service_expectation(r, 1.0)).epsilon(1e-7));
    }
  }
  SUBCASE("Monte Carlo agreement") {
    RandomStream rng(987654321, 7);
    for (int r : {2, 10}) {
      double acc = 0.0;
      const int samples = 1000000;
      for (int i = 0; i < samples; ++i) {
        const double s1 = rng.exponential(1.0);
        const double s2 = rng.exponential(1.0);
        const double tau = rng.exponential(2.0 * r - 1.0);
        acc += std::max(s1, s2 + tau);
      }
      CHECK(std::abs(acc / samples - max_service_expectation(r, 1.0)) < 1e-2);
    }
  }
  SUBCASE("always exceeds one mean service time") {
    for (int r : {2, 3, 7, 25}) CHECK(max_service_expectation(r, 1.0) > 1.0);
    CHECK(max_service_density(2, 1.0, -0.5) == 0.0);
  }
}

TEST_CASE("cut residuals vanish on the computed distribution") {
  for (int r : {2, 3, 4}) {
    for (double f : {0.3, 0.6, 0.9}) {
      const SystemConfig cfg(r, f * bos_capacity(r, 1.0), 1.0);
      const BosDistribution d = bos_stationary(cfg);
      const CutResiduals res = cut_residuals(d, cfg);
      CHECK(res.max() < 1e-8);
    }
  }
}

TEST_CASE("generator residual of the analytic distribution") {
  for (int r : {2, 3, 4}) {
    const SystemConfig cfg(r, 0.9 * bos_capacity(r, 1.0), 1.0);
    const BosDistribution d = bos_stationary(cfg);
    const int levels = d.levels() + 2;
    CHECK(generator_residual_inf(to_stationary(d, cfg, levels), cfg, levels) <
          1e-8);
  }
}
