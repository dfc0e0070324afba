#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "codedq/bos.hpp"
#include "codedq/system_config.hpp"

namespace codedq {

enum class StateKind : std::uint8_t { low, perfect, good, odd };

// One state of the coded system's Markov chain. Low states carry the packet
// count directly (0..2r-1); perfect, good and odd states carry the level m,
// i.e. packet counts 2r+2m, 2r+2m and 2r+2m+1.
struct ChainState {
  StateKind kind = StateKind::low;
  int index = 0;

  friend bool operator==(const ChainState&, const ChainState&) = default;
  friend auto operator<=>(const ChainState&, const ChainState&) = default;
};

int packet_count(ChainState s, int r);
std::string to_string(ChainState s);

// Out-edges of a state in the full (untruncated) chain:
//  - an arrival adds one request (two packets) at rate lambda and preserves
//    the perfect/good tag;
//  - Low(l) completes service at l*mu;
//  - Odd(m) completes toward Perfect(m) at (2r-1)*mu or Good(m) at mu;
//  - Perfect(m) completes at 2r*mu and Good(m) at (2r-1)*mu, both into the
//    odd state one packet below (Low(2r-1) when m == 0).
std::vector<std::pair<ChainState, double>> transitions_from(
    ChainState s, const SystemConfig& config);

// Dense truncated generator. Row order is Low(0..2r-1) followed by
// (Perfect(m), Good(m), Odd(m)) for m = 0..levels-1, so the state count is
// 2r + 3*levels.
struct GeneratorMatrix {
  std::vector<ChainState> states;
  std::vector<double> rates;  // row-major size() x size(); rows sum to zero
  int levels = 0;

  int size() const { return static_cast<int>(states.size()); }
  double rate(int from, int to) const { return rates[static_cast<std::size_t>(from) * states.size() + to]; }
};

// Truncated generator over levels 0..levels-1. Arrivals out of the top level
// are dropped (reflecting boundary) so the matrix stays a proper generator.
GeneratorMatrix build_generator(const SystemConfig& config, int levels);

// Plain birth-death generator of an M/M/servers queue truncated at max_state,
// used to validate the replication-side closed forms. States are labeled
// Low(0..max_state).
GeneratorMatrix build_birth_death(int servers, double lambda, double mu,
                                  int max_state);

struct StationaryDistribution {
  std::vector<ChainState> states;
  std::vector<double> probs;
  double residual = 0.0;  // ||pi Q||_inf achieved by the solve
};

// Global-balance solve pi Q = 0, sum(pi) = 1 by dense LU with one balance row
// replaced by the normalization constraint. Throws SingularSystem when the
// result is not a probability vector or the residual is not near zero.
StationaryDistribution solve_stationary_direct(const GeneratorMatrix& gen);

struct DistributionGap {
  double max_abs_diff = 0.0;
  int argmax_index = -1;  // position of the worst offender
  ChainState argmax_state{StateKind::low, 0};
};

// Max componentwise gap plus the worst-offender state for diagnostics.
// Throws ShapeMismatch unless both distributions share the same state list.
DistributionGap compare_distributions(const StationaryDistribution& a,
                                      const StationaryDistribution& b);

// Lays an iteratively computed distribution out in generator state order,
// zero-filling levels beyond its truncation.
StationaryDistribution to_stationary(const BosDistribution& dist,
                                     const SystemConfig& config, int levels);

// Inverse of to_stationary; states must be in canonical generator order.
BosDistribution to_level_form(const StationaryDistribution& dist,
                              const SystemConfig& config);

// ||pi Q||_inf against the truncated generator, streamed row by row without
// materializing the matrix, so it stays usable at level counts far beyond
// what a dense solve can handle.
double generator_residual_inf(const StationaryDistribution& dist,
                              const SystemConfig& config, int levels);

// Worst absolute violation of the chain's global-balance cut families when
// evaluated on a candidate distribution:
//  - odd_balance: flow into each odd state vs. the arrivals feeding it;
//  - diagonal: arrivals crossing up past a (perfect, good) pair vs. the
//    services crossing back down;
//  - pair_set: total flow in and out of each {perfect, good} pair;
//  - low_balance: the birth-death-like cuts among the low states.
struct CutResiduals {
  double odd_balance = 0.0;
  double diagonal = 0.0;
  double pair_set = 0.0;
  double low_balance = 0.0;

  double max() const;
};

CutResiduals cut_residuals(const BosDistribution& dist,
                           const SystemConfig& config);

}  // namespace codedq
