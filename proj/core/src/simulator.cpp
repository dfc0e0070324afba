#include "codedq/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "codedq/rng.hpp"

namespace codedq {

std::string to_string(SchedulerKind s) {
  switch (s) {
    case SchedulerKind::uncoded:
      return "uncoded";
    case SchedulerKind::bos:
      return "bos";
    case SchedulerKind::greedy:
      return "greedy";
  }
  return "?";
}

namespace {

struct EventAfter {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;  // completions first
    return a.su_id > b.su_id;
  }
};

struct PacketRef {
  long req = -1;
  int pkt = 0;
};

class Engine {
 public:
  Engine(SchedulerKind sched, const SystemConfig& cfg, const SimOptions& opt)
      : sched_(sched),
        cfg_(cfg),
        opt_(opt),
        n_su_(cfg.units()),
        arrival_rng_(opt.seed, 0),
        su_req_(n_su_, -1),
        su_pkt_(n_su_, -1) {
    if (opt.horizon < 1)
      throw InvalidConfig("simulate: horizon must be >= 1");
    if (opt.warmup < 0 || opt.warmup >= opt.horizon)
      throw InvalidConfig("simulate: need 0 <= warmup < horizon");
    if (!(cfg.lambda > 0))
      throw InvalidConfig("simulate: lambda must be > 0");
    if (cfg.lambda >= cfg.r * cfg.mu)
      throw UnstableSystem("simulate: lambda >= r*mu, no scheduler is stable");
    su_rng_.reserve(n_su_);
    for (int i = 0; i < n_su_; ++i)
      su_rng_.emplace_back(opt.seed, static_cast<std::uint64_t>(1 + i));
  }

  SimResult run();

 private:
  // --- event handling ---------------------------------------------------
  void handle_arrival();
  void handle_completion(int su);
  void dispatch();
  void dispatch_uncoded();
  void dispatch_bos();
  void dispatch_greedy();
  void assign(long req, int pkt, int su);
  void audit_bos_blocking() const;

  int lowest_idle(int lo, int hi, int excluded = -1) const {
    for (int su = lo; su < hi; ++su)
      if (su_req_[su] < 0 && su != excluded) return su;
    return -1;
  }

  // --- embedded chain (BoS) ----------------------------------------------
  ChainState classify() const;
  void chain_step(double event_time);

  // --- members -------------------------------------------------------------
  SchedulerKind sched_;
  SystemConfig cfg_;
  SimOptions opt_;
  int n_su_;

  RandomStream arrival_rng_;
  std::vector<RandomStream> su_rng_;

  double now_ = 0.0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> calendar_;
  std::vector<RequestRecord> requests_;

  std::vector<int> su_req_;  // request id served by each unit, -1 if idle
  std::vector<int> su_pkt_;
  int busy_ = 0;
  long packets_in_system_ = 0;

  std::deque<long> bos_queue_;                    // request ids
  std::array<std::deque<PacketRef>, 2> pools_;    // uncoded packet queues
  std::deque<PacketRef> greedy_queue_;

  long completed_ = 0;
  bool counting_ = false;
  double stats_t0_ = 0.0;
  double packet_delay_sum_ = 0.0;
  double request_delay_sum_ = 0.0;
  long counted_ = 0;
  long audited_ = 0;

  // chain statistics (BoS)
  ChainState chain_state_{StateKind::low, 0};
  double last_event_time_ = 0.0;
  std::map<ChainState, double> occupancy_time_;
  std::set<std::pair<ChainState, ChainState>> transitions_;

  std::vector<double> drift_t_, drift_n_;
};

void Engine::assign(long req, int pkt, int su) {
  RequestRecord& rec = requests_[static_cast<std::size_t>(req)];
  rec.packet_assign_time[pkt] = now_;
  rec.serving_su[pkt] = su;
  su_req_[su] = static_cast<int>(req);
  su_pkt_[su] = pkt;
  ++busy_;
  // Service time drawn at assignment from the unit's own stream.
  const double s = su_rng_[su].exponential(cfg_.mu);
  calendar_.push(SimEvent{now_ + s, SimEvent::Kind::service_completion, su});
}

void Engine::dispatch_uncoded() {
  for (int pool = 0; pool < 2; ++pool) {
    const int lo = pool * cfg_.r;
    const int hi = lo + cfg_.r;
    while (!pools_[pool].empty()) {
      const int su = lowest_idle(lo, hi);
      if (su < 0) break;
      const PacketRef ref = pools_[pool].front();
      pools_[pool].pop_front();
      assign(ref.req, ref.pkt, su);
    }
  }
}

void Engine::dispatch_bos() {
  while (!bos_queue_.empty()) {
    RequestRecord& head = requests_[static_cast<std::size_t>(bos_queue_.front())];
    if (head.serving_su[0] < 0) {
      const int su = lowest_idle(0, n_su_);
      if (su < 0) return;
      assign(head.id, 0, su);
    } else if (head.serving_su[1] < 0) {
      // Packet 2 may not land on the unit that served packet 1.
      const int su = lowest_idle(0, n_su_, head.serving_su[0]);
      if (su < 0) return;
      assign(head.id, 1, su);
      bos_queue_.pop_front();
    }
  }
}

void Engine::dispatch_greedy() {
  bool made = true;
  while (made) {
    made = false;
    for (int su = 0; su < n_su_ && !made; ++su) {
      if (su_req_[su] >= 0) continue;
      for (auto it = greedy_queue_.begin(); it != greedy_queue_.end(); ++it) {
        const int sibling =
            requests_[static_cast<std::size_t>(it->req)].serving_su[1 - it->pkt];
        if (sibling == su) continue;  // remembered constraint
        const PacketRef ref = *it;
        greedy_queue_.erase(it);
        assign(ref.req, ref.pkt, su);
        made = true;
        break;
      }
    }
  }
}

void Engine::dispatch() {
  switch (sched_) {
    case SchedulerKind::uncoded:
      dispatch_uncoded();
      break;
    case SchedulerKind::bos:
      dispatch_bos();
      break;
    case SchedulerKind::greedy:
      dispatch_greedy();
      break;
  }
}

// An idle unit facing a non-empty queue is legal under BoS only in the exact
// blocking shape: the single idle unit already served (and finished) packet 1
// of the head-of-line request, whose packet 2 is still waiting.
void Engine::audit_bos_blocking() const {
  if (bos_queue_.empty()) return;
  int idle_count = 0;
  int idle_su = -1;
  for (int su = 0; su < n_su_; ++su)
    if (su_req_[su] < 0) {
      ++idle_count;
      idle_su = su;
    }
  if (idle_count == 0) return;
  const RequestRecord& head =
      requests_[static_cast<std::size_t>(bos_queue_.front())];
  const bool exact_blocking =
      idle_count == 1 && head.serving_su[0] == idle_su &&
      head.packet_complete_time[0] >= 0.0 && head.serving_su[1] < 0;
  if (!exact_blocking)
    throw std::logic_error(
        "simulate_bos: idle unit with backlog outside the blocking condition");
}

void Engine::handle_arrival() {
  const long id = static_cast<long>(requests_.size());
  RequestRecord rec;
  rec.id = id;
  rec.arrival_time = now_;
  requests_.push_back(rec);
  packets_in_system_ += 2;

  switch (sched_) {
    case SchedulerKind::uncoded:
      pools_[0].push_back(PacketRef{id, 0});
      pools_[1].push_back(PacketRef{id, 1});
      break;
    case SchedulerKind::bos:
      bos_queue_.push_back(id);
      break;
    case SchedulerKind::greedy:
      greedy_queue_.push_back(PacketRef{id, 0});
      greedy_queue_.push_back(PacketRef{id, 1});
      break;
  }

  calendar_.push(SimEvent{now_ + arrival_rng_.exponential(cfg_.lambda),
                          SimEvent::Kind::arrival, -1});
  dispatch();

  if (opt_.sample_queue_drift) {
    drift_t_.push_back(now_);
    drift_n_.push_back(static_cast<double>(packets_in_system_));
  }
}

void Engine::handle_completion(int su) {
  const long req = su_req_[su];
  const int pkt = su_pkt_[su];
  su_req_[su] = -1;
  su_pkt_[su] = -1;
  --busy_;
  --packets_in_system_;

  RequestRecord& rec = requests_[static_cast<std::size_t>(req)];
  rec.packet_complete_time[pkt] = now_;

  if (rec.packet_complete_time[0] >= 0.0 && rec.packet_complete_time[1] >= 0.0) {
    if (rec.serving_su[0] == rec.serving_su[1])
      throw std::logic_error("simulate: distinct-unit constraint violated");
    ++audited_;
    if (counting_) {
      packet_delay_sum_ += (rec.packet_complete_time[0] - rec.arrival_time) +
                           (rec.packet_complete_time[1] - rec.arrival_time);
      request_delay_sum_ +=
          std::max(rec.packet_complete_time[0], rec.packet_complete_time[1]) -
          rec.arrival_time;
      ++counted_;
    }
    ++completed_;
    if (!counting_ && completed_ >= opt_.warmup) {
      counting_ = true;
      stats_t0_ = now_;
    }
  }

  dispatch();
}

ChainState Engine::classify() const {
  const int n = n_su_;
  const long N = packets_in_system_;
  if (N < n) {
    if (busy_ != N)
      throw std::logic_error("simulate_bos: low state with queued packets");
    return ChainState{StateKind::low, static_cast<int>(N)};
  }
  if (N % 2 == 0) {
    const int m = static_cast<int>((N - n) / 2);
    if (busy_ == n) return ChainState{StateKind::perfect, m};
    if (busy_ == n - 1) return ChainState{StateKind::good, m};
    throw std::logic_error("simulate_bos: even state with bad busy count");
  }
  const int m = static_cast<int>((N - n - 1) / 2);
  if (busy_ != n)
    throw std::logic_error("simulate_bos: odd state with an idle unit");
  return ChainState{StateKind::odd, m};
}

void Engine::chain_step(double event_time) {
  if (counting_)
    occupancy_time_[chain_state_] += event_time - last_event_time_;
  last_event_time_ = event_time;
}

SimResult Engine::run() {
  calendar_.push(SimEvent{arrival_rng_.exponential(cfg_.lambda),
                          SimEvent::Kind::arrival, -1});
  if (opt_.warmup == 0) counting_ = true;

  const bool track_chain = sched_ == SchedulerKind::bos && opt_.record_chain;

  while (completed_ < opt_.horizon) {
    if (calendar_.empty())
      throw std::logic_error("simulate: event calendar ran dry");
    const SimEvent ev = calendar_.top();
    calendar_.pop();
    if (ev.time < now_)
      throw std::logic_error("simulate: event clock moved backwards");
    if (track_chain) chain_step(ev.time);
    now_ = ev.time;

    if (ev.kind == SimEvent::Kind::arrival) {
      handle_arrival();
    } else {
      handle_completion(ev.su_id);
    }
    if (sched_ == SchedulerKind::bos) audit_bos_blocking();

    if (track_chain) {
      const ChainState next = classify();
      if (!(next == chain_state_)) {
        transitions_.insert({chain_state_, next});
        chain_state_ = next;
      }
    }
  }

  SimResult result;
  result.scheduler = sched_;
  result.r = cfg_.r;
  result.lambda = cfg_.lambda;
  result.mu = cfg_.mu;
  result.horizon = opt_.horizon;
  result.warmup = opt_.warmup;
  result.seed = opt_.seed;
  result.n_samples = counted_;
  result.sim_time = now_ - stats_t0_;
  result.distinct_su_audited = audited_;

  result.report.source = DelaySource::simulation;
  result.report.n_samples = counted_;
  result.report.mean_packet_delay = packet_delay_sum_ / (2.0 * counted_);
  result.report.mean_request_delay = request_delay_sum_ / counted_;

  if (result.sim_time > 0)
    result.throughput = static_cast<double>(counted_) / result.sim_time;

  if (opt_.sample_queue_drift)
    result.queue_drift_slope = least_squares_slope(drift_t_, drift_n_);

  if (track_chain) {
    const double span = now_ - stats_t0_;
    if (span > 0) {
      for (const auto& [state, time] : occupancy_time_)
        result.occupancy.push_back(OccupancyEntry{state, time / span});
    }
    result.observed_transitions.assign(transitions_.begin(),
                                       transitions_.end());
  }

  if (opt_.collect_trace) {
    for (const auto& rec : requests_)
      if (rec.packet_complete_time[0] >= 0 && rec.packet_complete_time[1] >= 0)
        result.trace.push_back(rec);
  }
  return result;
}

}  // namespace

SimResult simulate_uncoded(const SystemConfig& config, const SimOptions& opt) {
  return Engine(SchedulerKind::uncoded, config, opt).run();
}

SimResult simulate_bos(const SystemConfig& config, const SimOptions& opt) {
  return Engine(SchedulerKind::bos, config, opt).run();
}

SimResult simulate_greedy(const SystemConfig& config, const SimOptions& opt) {
  return Engine(SchedulerKind::greedy, config, opt).run();
}

SimResult simulate(SchedulerKind scheduler, const SystemConfig& config,
                   const SimOptions& opt) {
  return Engine(scheduler, config, opt).run();
}

ReplicatedResult run_replications(SchedulerKind scheduler,
                                  const SystemConfig& config,
                                  const SimOptions& opt, int n_reps) {
  if (n_reps < 2)
    throw InvalidConfig("run_replications: need at least 2 replications");

  ReplicatedResult agg;
  agg.base_seed = opt.seed;
  agg.n_reps = n_reps;

  std::vector<double> throughputs;
  std::map<ChainState, std::vector<double>> occ;

  for (int rep = 0; rep < n_reps; ++rep) {
    SimOptions rep_opt = opt;
    rep_opt.seed = replication_seed(opt.seed, rep);
    rep_opt.collect_trace = false;
    SimResult res = simulate(scheduler, config, rep_opt);

    agg.rep_packet_delays.push_back(res.report.mean_packet_delay);
    agg.rep_request_delays.push_back(res.report.mean_request_delay);
    agg.rep_offsets.push_back(res.report.mean_request_delay -
                              res.report.mean_packet_delay);
    throughputs.push_back(res.throughput);
    for (const auto& e : res.occupancy) occ[e.state].push_back(e.fraction);
    agg.runs.push_back(std::move(res));
  }

  agg.packet_delay = replication_ci(agg.rep_packet_delays);
  agg.request_delay = replication_ci(agg.rep_request_delays);
  agg.offset = replication_ci(agg.rep_offsets);
  agg.throughput = replication_ci(throughputs);

  agg.report.source = DelaySource::simulation;
  agg.report.mean_packet_delay = agg.packet_delay.mean;
  agg.report.mean_request_delay = agg.request_delay.mean;
  agg.report.ci_halfwidth_packet = agg.packet_delay.halfwidth;
  agg.report.ci_halfwidth_request = agg.request_delay.halfwidth;
  for (const auto& run : agg.runs) agg.report.n_samples += run.n_samples;

  for (auto& [state, fractions] : occ) {
    // States a replication never visited contribute zero occupancy.
    while (static_cast<int>(fractions.size()) < n_reps)
      fractions.push_back(0.0);
    agg.occupancy.push_back(OccupancySummary{state, replication_ci(fractions)});
  }
  std::sort(agg.occupancy.begin(), agg.occupancy.end(),
            [&](const OccupancySummary& a, const OccupancySummary& b) {
              const int pa = packet_count(a.state, config.r);
              const int pb = packet_count(b.state, config.r);
              if (pa != pb) return pa < pb;
              return a.state.kind < b.state.kind;
            });
  return agg;
}

}  // namespace codedq
