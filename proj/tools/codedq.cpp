// codedq: queueing analysis of coded vs. replicated storage.
//
// Subcommands:
//   analyze   closed-form capacity, stationary mass, and delays for one config
//   sweep     analytic delay-gain curve over an arrival-rate grid (CSV)
//   simulate  discrete-event simulation of one scheduler with replications
//   validate  cross-check suite (analytic vs. oracle vs. simulation), JSON out

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "codedq/bos.hpp"
#include "codedq/chain.hpp"
#include "codedq/mmr.hpp"
#include "codedq/simulator.hpp"
#include "codedq/validation.hpp"
#include "codedq/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitValidationFailure = 4;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Options {
  int r = 2;
  double lambda = 1.0;
  double mu = 1.0;
  double tol = 1e-12;
  std::string grid = "50";
  std::string scheduler = "bos";
  long horizon = 110000;
  long warmup = -1;  // default: horizon / 10
  int reps = 10;
  long v_horizon = 33000;  // lighter defaults for the validate sim checks
  long v_warmup = 3000;
  int v_reps = 5;
  std::uint64_t seed = 1;
  std::string out;
  std::string trace;
  std::string config_file;
  std::string corrupt;  // validate-only test hook
};

// Values from --config fill in anything not set on the command line; explicit
// flags always win.
void apply_config_file(const CLI::App& cmd, Options& o) {
  if (o.config_file.empty()) return;
  std::ifstream in(o.config_file);
  if (!in) throw codedq::InvalidConfig("cannot open config file " + o.config_file);
  nlohmann::json j;
  in >> j;

  auto unset = [&](const std::string& flag) {
    const CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() == 0;
  };
  if (j.contains("r") && unset("r")) o.r = j["r"].get<int>();
  if (j.contains("lambda") && unset("lambda")) o.lambda = j["lambda"].get<double>();
  if (j.contains("mu") && unset("mu")) o.mu = j["mu"].get<double>();
  if (j.contains("tol") && unset("tol")) o.tol = j["tol"].get<double>();
  if (j.contains("grid") && unset("grid")) {
    if (j["grid"].is_number_integer())
      o.grid = std::to_string(j["grid"].get<long>());
    else
      o.grid = j["grid"].get<std::string>();
  }
  if (j.contains("scheduler") && unset("scheduler"))
    o.scheduler = j["scheduler"].get<std::string>();
  if (j.contains("horizon") && unset("horizon")) o.horizon = j["horizon"].get<long>();
  if (j.contains("warmup") && unset("warmup")) o.warmup = j["warmup"].get<long>();
  if (j.contains("reps") && unset("reps")) o.reps = j["reps"].get<int>();
  if (j.contains("seed") && unset("seed")) o.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out") && unset("out")) o.out = j["out"].get<std::string>();
  if (j.contains("trace") && unset("trace")) o.trace = j["trace"].get<std::string>();
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--r", o.r, "redundancy factor (n = 2r storage units)");
  cmd->add_option("--lambda", o.lambda, "content-request arrival rate");
  cmd->add_option("--mu", o.mu, "per-unit service rate");
  cmd->add_option("--tol", o.tol, "analytic truncation tolerance");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--config", o.config_file,
                  "JSON config file; explicit flags override its values");
}

std::string header_comment(const std::string& mode, const Options& o,
                           bool with_sim_params) {
  std::ostringstream s;
  s << "# codedq " << codedq::kVersion << " mode=" << mode << " r=" << o.r
    << " lambda=" << fmt(o.lambda) << " mu=" << fmt(o.mu)
    << " tol=" << fmt(o.tol);
  if (mode == "sweep") s << " grid=" << o.grid;
  if (with_sim_params)
    s << " scheduler=" << o.scheduler << " horizon=" << o.horizon
      << " warmup=" << o.warmup << " reps=" << o.reps << " seed=" << o.seed;
  return s.str();
}

// Writes to the file when --out was given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw codedq::InvalidConfig("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------

int cmd_analyze(const Options& o) {
  const codedq::SystemConfig cfg(o.r, o.lambda, o.mu);
  const double capacity = codedq::bos_capacity(o.r, o.mu);
  const codedq::BosCoefficients coeff = codedq::bos_coefficients(cfg);

  const codedq::BosDistribution dist = codedq::bos_stationary(cfg, o.tol);

  const bool zero_rate = o.lambda == 0.0;
  double d_uncoded = 0, d_coded = 0, d_coded_err = 0, d_req = 0, gain = 0;
  if (!zero_rate) {
    d_uncoded = codedq::mmr_mean_packet_delay(codedq::mmr_stationary(cfg, o.tol),
                                              o.lambda);
    const codedq::TruncatedMean coded = codedq::bos_mean_packet_delay(dist, cfg);
    d_coded = coded.value;
    d_coded_err = coded.truncation_error;
    d_req = codedq::bos_mean_request_delay(d_coded, cfg);
    gain = codedq::delay_gain(d_uncoded, d_coded);
  }

  auto na_or = [&](double v) { return zero_rate ? std::string("NA") : fmt(v); };

  Sink sink(o.out);
  std::ostream& os = sink.stream();
  os << header_comment("analyze", o, false) << "\n";
  os << "r,lambda,mu,capacity_bos,eta,pi0_coded,d_uncoded_packet,"
        "d_coded_packet,d_coded_packet_err,d_coded_request,gain\n";
  os << o.r << ',' << fmt(o.lambda) << ',' << fmt(o.mu) << ',' << fmt(capacity)
     << ',' << fmt(coeff.eta) << ',' << fmt(dist.pi_low[0]) << ','
     << na_or(d_uncoded) << ',' << na_or(d_coded) << ',' << na_or(d_coded_err)
     << ',' << na_or(d_req) << ',' << na_or(gain) << "\n";

  if (!o.out.empty()) {
    // Short human summary on stdout alongside the file.
    std::cout << "capacity_bos=" << fmt6(capacity) << " eta=" << fmt6(coeff.eta)
              << " pi0=" << fmt6(dist.pi_low[0]);
    if (!zero_rate)
      std::cout << " d_uncoded=" << fmt6(d_uncoded)
                << " d_coded=" << fmt6(d_coded) << " gain=" << fmt6(gain);
    std::cout << "\n";
  }
  if (zero_rate)
    std::cerr << "analyze: lambda = 0, delays and gain undefined (NA)\n";
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& spec, double capacity) {
  std::vector<double> grid;
  if (spec.find(':') == std::string::npos) {
    const int n = std::stoi(spec);
    if (n < 1) throw codedq::InvalidConfig("sweep: grid size must be >= 1");
    for (int i = 1; i <= n; ++i) grid.push_back(i / double(n) * 0.99 * capacity);
  } else {
    double lo = 0, hi = 0;
    int n = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1 ||
        !(lo <= hi) || !(lo >= 0))
      throw codedq::InvalidConfig("sweep: grid must be N or lo:hi:N");
    if (n == 1)
      grid.push_back(lo);
    else
      for (int i = 0; i < n; ++i)
        grid.push_back(lo + (hi - lo) * i / double(n - 1));
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

int cmd_sweep(const Options& o) {
  const double capacity = codedq::bos_capacity(o.r, o.mu);
  const std::vector<double> grid = parse_grid(o.grid, capacity);

  Sink sink(o.out);
  std::ostream& os = sink.stream();
  os << header_comment("sweep", o, false) << "\n";
  os << "r,lambda,mu,d_uncoded_packet,d_coded_packet,d_coded_request,gain,"
        "capacity_bos\n";

  for (double lambda : grid) {
    os << o.r << ',' << fmt(lambda) << ',' << fmt(o.mu) << ',';
    if (lambda >= capacity || lambda >= o.r * o.mu || lambda <= 0) {
      // Out-of-capacity grid point: marked per row, the sweep continues.
      os << "NA,NA,NA,NA," << fmt(capacity) << "\n";
      continue;
    }
    const codedq::SystemConfig cfg(o.r, lambda, o.mu);
    const double d_uncoded = codedq::mmr_mean_packet_delay(
        codedq::mmr_stationary(cfg, o.tol), lambda);
    const double d_coded =
        codedq::bos_mean_packet_delay(codedq::bos_stationary(cfg, o.tol), cfg)
            .value;
    const double d_req = codedq::bos_mean_request_delay(d_coded, cfg);
    os << fmt(d_uncoded) << ',' << fmt(d_coded) << ',' << fmt(d_req) << ','
       << fmt(codedq::delay_gain(d_uncoded, d_coded)) << ',' << fmt(capacity)
       << "\n";
  }
  return kExitOk;
}

codedq::SchedulerKind parse_scheduler(const std::string& s) {
  if (s == "uncoded") return codedq::SchedulerKind::uncoded;
  if (s == "bos") return codedq::SchedulerKind::bos;
  if (s == "greedy") return codedq::SchedulerKind::greedy;
  throw codedq::InvalidConfig("scheduler must be uncoded, bos, or greedy");
}

int cmd_simulate(const Options& o) {
  const codedq::SystemConfig cfg(o.r, o.lambda, o.mu);
  const codedq::SchedulerKind kind = parse_scheduler(o.scheduler);

  if (kind == codedq::SchedulerKind::bos &&
      o.lambda >= codedq::bos_capacity(o.r, o.mu) && o.lambda < o.r * o.mu)
    std::cerr << "simulate: warning: lambda is above the blocking-one capacity ("
              << fmt6(codedq::bos_capacity(o.r, o.mu))
              << "); the queue will diverge\n";

  codedq::SimOptions sim;
  sim.horizon = o.horizon;
  sim.warmup = o.warmup >= 0 ? o.warmup : o.horizon / 10;
  sim.seed = o.seed;

  if (!o.trace.empty() && o.reps != 1)
    throw codedq::InvalidConfig("simulate: --trace requires --reps 1");

  Sink sink(o.out);
  std::ostream& os = sink.stream();
  os << header_comment("simulate", o, true) << "\n";
  os << "scheduler,r,lambda,mu,horizon,warmup,reps,seed,mean_packet_delay,"
        "ci_packet,mean_request_delay,ci_request,offset,ci_offset,throughput,"
        "n_samples\n";

  auto row_prefix = [&]() {
    os << o.scheduler << ',' << o.r << ',' << fmt(o.lambda) << ',' << fmt(o.mu)
       << ',' << sim.horizon << ',' << sim.warmup << ',' << o.reps << ','
       << o.seed << ',';
  };

  if (o.reps == 1) {
    sim.collect_trace = !o.trace.empty();
    const codedq::SimResult res = codedq::simulate(kind, cfg, sim);
    row_prefix();
    os << fmt(res.report.mean_packet_delay) << ",0,"
       << fmt(res.report.mean_request_delay) << ",0,"
       << fmt(res.report.mean_request_delay - res.report.mean_packet_delay)
       << ",0," << fmt(res.throughput) << ',' << res.n_samples << "\n";
    if (!o.trace.empty()) {
      std::ofstream tf(o.trace);
      if (!tf) throw codedq::InvalidConfig("cannot open trace file " + o.trace);
      tf << header_comment("simulate", o, true) << "\n";
      tf << "request_id,arrival,assign1,assign2,complete1,complete2,su1,su2\n";
      for (const auto& rec : res.trace)
        tf << rec.id << ',' << fmt(rec.arrival_time) << ','
           << fmt(rec.packet_assign_time[0]) << ','
           << fmt(rec.packet_assign_time[1]) << ','
           << fmt(rec.packet_complete_time[0]) << ','
           << fmt(rec.packet_complete_time[1]) << ',' << rec.serving_su[0]
           << ',' << rec.serving_su[1] << "\n";
    }
  } else {
    const codedq::ReplicatedResult res =
        codedq::run_replications(kind, cfg, sim, o.reps);
    row_prefix();
    os << fmt(res.packet_delay.mean) << ',' << fmt(res.packet_delay.halfwidth)
       << ',' << fmt(res.request_delay.mean) << ','
       << fmt(res.request_delay.halfwidth) << ',' << fmt(res.offset.mean) << ','
       << fmt(res.offset.halfwidth) << ',' << fmt(res.throughput.mean) << ','
       << res.report.n_samples << "\n";
  }
  return kExitOk;
}

int cmd_validate(const Options& o) {
  codedq::ValidationOptions vo;
  vo.horizon = o.v_horizon;
  vo.warmup = o.v_warmup >= 0 ? o.v_warmup : o.v_horizon / 10;
  vo.reps = o.v_reps;
  vo.seed = o.seed;
  vo.tol = o.tol;
  if (o.corrupt == "eta")
    vo.corruption = codedq::Corruption::eta;
  else if (o.corrupt == "pi0")
    vo.corruption = codedq::Corruption::pi_zero;
  else if (!o.corrupt.empty())
    throw codedq::InvalidConfig("validate: --corrupt must be eta or pi0");

  const codedq::ValidationReport rep = codedq::run_validation(vo);

  for (const auto& c : rep.checks)
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name
              << "  observed=" << fmt6(c.observed)
              << " expected=" << fmt6(c.expected) << " tol=" << fmt6(c.tolerance)
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
  std::cout << rep.checks.size() - rep.failures() << "/" << rep.checks.size()
            << " checks passed\n";

  if (!o.out.empty()) {
    nlohmann::json j;
    j["version"] = codedq::kVersion;
    j["mode"] = "validate";
    j["params"] = {{"horizon", vo.horizon}, {"warmup", vo.warmup},
                   {"reps", vo.reps},       {"seed", vo.seed},
                   {"tol", vo.tol},         {"corrupt", o.corrupt}};
    j["all_passed"] = rep.all_passed();
    j["failures"] = rep.failures();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : rep.checks)
      j["checks"].push_back({{"name", c.name},
                             {"passed", c.passed},
                             {"observed", c.observed},
                             {"expected", c.expected},
                             {"tolerance", c.tolerance},
                             {"detail", c.detail}});
    std::ofstream out(o.out);
    if (!out) throw codedq::InvalidConfig("cannot open output file " + o.out);
    out << j.dump(2) << "\n";
  }
  return rep.all_passed() ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codedq: queueing analysis of coded vs. replicated storage"};
  app.require_subcommand(1);

  Options o;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "closed-form capacity, stationary mass and delays");
  add_common_flags(analyze, o);

  CLI::App* sweep =
      app.add_subcommand("sweep", "analytic delay-gain sweep over lambda (CSV)");
  add_common_flags(sweep, o);
  sweep->add_option("--grid", o.grid,
                    "N points spread to 0.99*capacity, or lo:hi:N");

  CLI::App* simulate =
      app.add_subcommand("simulate", "discrete-event simulation of one scheduler");
  add_common_flags(simulate, o);
  simulate->add_option("--scheduler", o.scheduler, "uncoded | bos | greedy");
  simulate->add_option("--horizon", o.horizon, "completed requests per run");
  simulate->add_option("--warmup", o.warmup,
                       "completions discarded first (default horizon/10)");
  simulate->add_option("--reps", o.reps, "independent replications");
  simulate->add_option("--seed", o.seed, "base seed; streams derive from it");
  simulate->add_option("--trace", o.trace,
                       "per-request trace CSV (requires --reps 1)");

  CLI::App* validate =
      app.add_subcommand("validate", "run the cross-check suite (JSON summary)");
  add_common_flags(validate, o);
  validate->add_option("--horizon", o.v_horizon, "completed requests per sim check");
  validate->add_option("--warmup", o.v_warmup, "completions discarded first");
  validate->add_option("--reps", o.v_reps, "replications per sim check");
  validate->add_option("--seed", o.seed, "base seed");
  validate->add_option("--corrupt", o.corrupt,
                       "internal test hook: corrupt 'eta' or 'pi0'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config_file(*cmd, o);
    if (cmd == analyze) return cmd_analyze(o);
    if (cmd == sweep) return cmd_sweep(o);
    if (cmd == simulate) return cmd_simulate(o);
    if (cmd == validate) return cmd_validate(o);
  } catch (const codedq::UnstableSystem& e) {
    std::cerr << "error (unstable system): " << e.what() << "\n";
    return kExitUnstable;
  } catch (const codedq::InvalidConfig& e) {
    std::cerr << "error (invalid config): " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
