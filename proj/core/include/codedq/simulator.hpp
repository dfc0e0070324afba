#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "codedq/bos.hpp"
#include "codedq/chain.hpp"
#include "codedq/stats.hpp"
#include "codedq/system_config.hpp"

namespace codedq {

enum class SchedulerKind { uncoded, bos, greedy };

std::string to_string(SchedulerKind s);

// Future-event-list entry. Ordering in the calendar is by time, then
// completions before arrivals, then lowest storage-unit id, which makes every
// run fully deterministic even at (measure-zero) timestamp ties.
struct SimEvent {
  double time = 0.0;
  enum class Kind : std::uint8_t { service_completion = 0, arrival = 1 } kind =
      Kind::arrival;
  int su_id = -1;  // completions only
};

// Per-request trace row. Times are absolute simulation clock values;
// serving_su holds the two distinct storage units that served the packets.
struct RequestRecord {
  long id = 0;
  double arrival_time = 0.0;
  std::array<double, 2> packet_assign_time{-1.0, -1.0};
  std::array<double, 2> packet_complete_time{-1.0, -1.0};
  std::array<int, 2> serving_su{-1, -1};
};

struct SimOptions {
  long horizon = 100000;  // total completed requests per run
  long warmup = 10000;    // completed requests discarded before counting
  std::uint64_t seed = 1;
  bool collect_trace = false;      // keep per-request records in the result
  bool record_chain = true;        // BoS: occupancy + observed transitions
  bool sample_queue_drift = true;  // packets-in-system regression samples
};

struct OccupancyEntry {
  ChainState state;
  double fraction = 0.0;  // share of post-warmup time spent in the state
};

struct SimResult {
  DelayReport report;  // source = simulation; halfwidths zero for one run
  double throughput = 0.0;  // completed requests per unit time, post-warmup
  long n_samples = 0;
  double sim_time = 0.0;  // post-warmup time span
  // config echo for reproducibility
  SchedulerKind scheduler = SchedulerKind::bos;
  int r = 0;
  double lambda = 0.0;
  double mu = 0.0;
  long horizon = 0;
  long warmup = 0;
  std::uint64_t seed = 0;

  // packets-in-system drift (least-squares slope over arrival samples);
  // near zero for stable runs, strictly positive when the queue diverges
  double queue_drift_slope = 0.0;

  long distinct_su_audited = 0;  // completed requests checked for su0 != su1

  // BoS only: embedded-chain statistics over the post-warmup window
  std::vector<OccupancyEntry> occupancy;
  std::vector<std::pair<ChainState, ChainState>> observed_transitions;

  std::vector<RequestRecord> trace;  // only when collect_trace
};

// Replication-level system state: two pools of r units serving packet A and
// packet B requests, each pool FCFS work-conserving. Refuses lambda >= r*mu.
SimResult simulate_uncoded(const SystemConfig& config, const SimOptions& opt);

// Coded system under blocking-one scheduling: a single FIFO request queue
// where only the head-of-line request may receive assignments, packet 2 never
// lands on the unit that served packet 1, and everything behind the head
// waits. Refuses lambda >= r*mu; rates between capacity and r*mu run (the
// divergence is observable) but have no steady state.
SimResult simulate_bos(const SystemConfig& config, const SimOptions& opt);

// Coded system with the full-memory scheduler: a freed unit scans the queue
// FCFS and takes the first packet whose sibling it did not serve.
SimResult simulate_greedy(const SystemConfig& config, const SimOptions& opt);

SimResult simulate(SchedulerKind scheduler, const SystemConfig& config,
                   const SimOptions& opt);

struct OccupancySummary {
  ChainState state;
  MeanCI fraction;
};

// Aggregate of n_reps independent replications with deterministically derived
// seeds. Confidence intervals are replication-based (t quantile across the
// per-rep means).
struct ReplicatedResult {
  DelayReport report;  // aggregated means with 95% replication CIs
  MeanCI packet_delay;
  MeanCI request_delay;
  MeanCI offset;  // per-rep (request - packet) differences
  MeanCI throughput;
  std::vector<double> rep_packet_delays;
  std::vector<double> rep_request_delays;
  std::vector<double> rep_offsets;
  std::vector<OccupancySummary> occupancy;  // BoS runs only
  std::vector<SimResult> runs;              // traces stripped
  std::string ci_method = "independent-replications";
  std::uint64_t base_seed = 0;
  int n_reps = 0;
};

ReplicatedResult run_replications(SchedulerKind scheduler,
                                  const SystemConfig& config,
                                  const SimOptions& opt, int n_reps);

}  // namespace codedq
