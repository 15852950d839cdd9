// fcatraffic command-line tool. Every subcommand prints a JSON summary on
// stdout and writes its tables as CSV under --out. Failures print a JSON
// error record on stderr and exit nonzero.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "fcatraffic/config.hpp"
#include "fcatraffic/error.hpp"
#include "fcatraffic/fuzzy_simulator.hpp"
#include "fcatraffic/metrics.hpp"
#include "fcatraffic/nasch_simulator.hpp"

using namespace fca;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 2;       // validation or simulation error
constexpr int kExitUsage = 64;      // bad command line

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FCA_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, std::string("FCA_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + (dir / name).string());
  out.precision(std::numeric_limits<double>::digits10);
  return out;
}

void emit(const json& summary) { std::cout << summary.dump(2) << '\n'; }

// Arrival step of one vehicle past a line, NaN if it never gets there.
class TravelProbe : public RunProbe {
 public:
  TravelProbe(std::size_t vehicle, Cell line) : inner_(vehicle, line) {}
  void observe(long t, const Channel& channel) override { inner_.observe(t, channel); }
  std::vector<double> samples() const override {
    const auto a = inner_.arrival();
    return {a ? static_cast<double>(*a) : std::nan("")};
  }

 private:
  ArrivalProbe inner_;
};

std::vector<long> count_times(long horizon, long interval) {
  std::vector<long> times;
  for (long t = 0; t <= horizon; t += interval) times.push_back(t);
  return times;
}

// Travel time of the last vehicle to the last stop line, then vehicle counts
// upstream of that line at each count time.
ProbeFactory run_probes(const Scenario& s, const std::vector<long>& times) {
  const std::size_t n = s.vehicle_count();
  const Cell line = s.stop_cells().empty() ? 0 : s.stop_cells().back();
  return [=] {
    std::vector<std::unique_ptr<RunProbe>> parts;
    parts.push_back(std::make_unique<TravelProbe>(n - 1, line));
    parts.push_back(std::make_unique<CountProbe>(line, times));
    return std::make_unique<CompositeProbe>(std::move(parts));
  };
}

json summary_or_null(std::vector<double> samples) {
  std::erase_if(samples, [](double x) { return std::isnan(x); });
  if (samples.empty()) return nullptr;
  return to_json(summarize(std::move(samples)));
}

Calibration calibration_for(const ModelConfig& model) {
  if (model.alpha || model.saturation_flow_veh_h) return resolve_calibration(model);
  ModelConfig fallback = model;
  fallback.saturation_flow_veh_h = std::array<double, 3>{1503, 1575, 1638};
  return resolve_calibration(fallback);
}

BoundPolicy parse_policy(const std::string& name) {
  if (name == "strict") return BoundPolicy::Strict;
  if (name == "count") return BoundPolicy::Count;
  throw Error(ErrorKind::ConfigError, "bound policy must be 'strict' or 'count', got '" + name + "'");
}

json calibration_json(const Calibration& cal) {
  return {{"rule_low", cal.rule_low.name}, {"rule_high", cal.rule_high.name}, {"alpha", cal.alpha}};
}

// ---- discharge -------------------------------------------------------------

struct DischargeArgs {
  std::string rule = "R1";
  std::vector<int> matrix;
  int queue = 10;
  long steps = 60;
  std::string out = ".";
};

int cmd_discharge(const DischargeArgs& a) {
  RuleTable rule;
  if (a.matrix.empty()) {
    rule = builtin_rule(a.rule);
  } else {
    if (a.matrix.size() != kRuleRows * kRuleCols) {
      throw Error(ErrorKind::InvalidRule, "--matrix needs 24 entries (4 rows of 6)");
    }
    RuleMatrix u{};
    for (int r = 0; r < kRuleRows; ++r) {
      for (int c = 0; c < kRuleCols; ++c) u[r][c] = a.matrix[static_cast<std::size_t>(r * kRuleCols + c)];
    }
    rule = make_custom_rule(a.rule, u);
  }
  const auto trace = queue_discharge_trace(rule, a.queue, a.steps);
  auto csv = open_output(a.out, "discharge.csv");
  write_discharge_csv(csv, trace);

  json summary = {{"provenance", provenance("discharge")},
                  {"rule", rule.name},
                  {"queue", a.queue},
                  {"steps", a.steps},
                  {"steady", trace.steady},
                  {"v_max", trace.steady_velocity},
                  {"gap", trace.steady_gap},
                  {"saturation_flow_veh_h", trace.saturation_flow_veh_h()},
                  {"csv", (fs::path(a.out) / "discharge.csv").string()}};
  emit(summary);
  return 0;
}

// ---- simulate-fuzzy --------------------------------------------------------

struct FuzzyArgs {
  std::string config;
  std::string out;
  std::string policy = "strict";
};

int cmd_simulate_fuzzy(const FuzzyArgs& a) {
  const auto cfg = load_config(a.config);
  if (cfg.model.model != Model::Fuzzy) {
    throw Error(ErrorKind::ConfigError, "simulate-fuzzy needs a config with model.type = fuzzy");
  }
  const fs::path out = a.out.empty() ? fs::path(cfg.output.directory) : fs::path(a.out);
  const auto cal = resolve_calibration(cfg.model);
  const Scenario& s = cfg.scenario;
  const auto log = run_fuzzy(s, cal, parse_policy(a.policy));

  auto csv = open_output(out, "trajectories.csv");
  write_trajectory_csv(csv, log);

  json stops = json::array();
  const auto times = count_times(s.horizon, cfg.output.count_interval);
  for (Cell stop : s.stop_cells()) {
    json entry = {{"stop_cell", stop}, {"travel_time", nullptr}};
    if (log.vehicles > 0) {
      try {
        entry["travel_time"] = to_json(fuzzy_travel_time(log, log.vehicles - 1, stop));
        entry["travel_time_components"] = component_travel_times(log, log.vehicles - 1, stop);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NeverArrived) throw;
      }
    }
    json counts = json::array();
    for (long t : times) {
      counts.push_back({{"t", t}, {"count", to_json(fuzzy_vehicle_count(log, t, stop))}});
    }
    entry["counts"] = counts;
    stops.push_back(entry);
  }

  json metrics = {{"provenance", provenance("simulate-fuzzy")},
                  {"config", to_json(cfg)},
                  {"calibration", calibration_json(cal)},
                  {"vehicles", log.vehicles},
                  {"steps", log.steps},
                  {"op_count", log.op_count},
                  {"metadata", log.metadata},
                  {"stop_lines", stops}};
  open_output(out, "metrics.json") << metrics.dump(2) << '\n';
  emit({{"vehicles", log.vehicles},
        {"steps", log.steps},
        {"op_count", log.op_count},
        {"bound_excursions", log.metadata.at("bound_excursions")},
        {"trajectories", (out / "trajectories.csv").string()},
        {"metrics", (out / "metrics.json").string()}});
  return 0;
}

// ---- simulate-nasch --------------------------------------------------------

struct NaschArgs {
  std::string config;
  std::string out;
  int runs = 500;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

int cmd_simulate_nasch(const NaschArgs& a) {
  const auto cfg = load_config(a.config);
  const fs::path out = a.out.empty() ? fs::path(cfg.output.directory) : fs::path(a.out);
  const Scenario s = cfg.scenario.cell_length_m == kNaschCellLength
                         ? cfg.scenario
                         : cfg.scenario.with_cell_length(kNaschCellLength);
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const EnsembleConfig ec{cfg.model.nasch, a.runs, s.horizon, seed, a.threads};
  const auto times = count_times(s.horizon, cfg.output.count_interval);

  json summary = {{"provenance", provenance("simulate-nasch")},
                  {"config", to_json(cfg)},
                  {"cell_length_m", s.cell_length_m},
                  {"v_max", ec.params.v_max},
                  {"p", ec.params.p},
                  {"runs", a.runs},
                  {"seed", seed},
                  {"vehicles", s.vehicle_count()}};

  auto csv = open_output(out, "runs.csv");
  csv << "run,seed,travel_time";
  for (long t : times) csv << ",count_" << t;
  csv << '\n';

  if (s.vehicle_count() == 0 || s.stop_cells().empty()) {
    const auto ens = run_ensemble(s, ec, [] { return std::make_unique<CompositeProbe>(
                                                  std::vector<std::unique_ptr<RunProbe>>{}); });
    for (int k = 0; k < ens.runs; ++k) csv << k << ',' << ens.seeds[static_cast<std::size_t>(k)] << ",\n";
    summary["op_count"] = ens.op_count;
    summary["draws"] = ens.draws;
    summary["travel_time"] = nullptr;
    summary["counts"] = json::array();
  } else {
    const auto ens = run_ensemble(s, ec, run_probes(s, times));
    for (int k = 0; k < ens.runs; ++k) {
      const auto& row = ens.samples[static_cast<std::size_t>(k)];
      csv << k << ',' << ens.seeds[static_cast<std::size_t>(k)] << ',';
      if (!std::isnan(row[0])) csv << row[0];
      for (std::size_t j = 1; j < row.size(); ++j) csv << ',' << row[j];
      csv << '\n';
    }
    const auto tt = ens.metric(0);
    summary["op_count"] = ens.op_count;
    summary["draws"] = ens.draws;
    summary["stop_cell"] = s.stop_cells().back();
    summary["arrived"] = std::count_if(tt.begin(), tt.end(), [](double x) { return !std::isnan(x); });
    summary["travel_time"] = summary_or_null(tt);
    json counts = json::array();
    for (std::size_t j = 0; j < times.size(); ++j) {
      counts.push_back({{"t", times[j]}, {"count", to_json(summarize(ens.metric(1 + j)))}});
    }
    summary["counts"] = counts;
  }
  open_output(out, "summary.json") << summary.dump(2) << '\n';
  emit({{"runs", a.runs},
        {"seed", seed},
        {"op_count", summary["op_count"]},
        {"travel_time", summary["travel_time"]},
        {"samples", (out / "runs.csv").string()},
        {"summary", (out / "summary.json").string()}});
  return 0;
}

// ---- calibrate -------------------------------------------------------------

struct CalibrateArgs {
  double s1 = 1503, s2 = 1575, s3 = 1638;
  std::string rule_low = "R1", rule_high = "R2";
};

int cmd_calibrate(const CalibrateArgs& a) {
  const auto cal = calibrate_alpha(make_tfn(a.s1, a.s2, a.s3), builtin_rule(a.rule_low),
                                   builtin_rule(a.rule_high));
  emit({{"provenance", provenance("calibrate")},
        {"saturation_flow_veh_h", {a.s1, a.s2, a.s3}},
        {"rule_low", cal.rule_low.name},
        {"rule_high", cal.rule_high.name},
        {"alpha", cal.alpha}});
  return 0;
}

// ---- sweep-p ---------------------------------------------------------------

struct SweepArgs {
  double from = 0, to = 0.8, step = 0.01;
  int runs = 500;
  long horizon = 3600;
  int v_max = 2;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out = ".";
};

std::vector<double> grid(double from, double to, double step, const char* what) {
  if (!(step > 0) || to < from) {
    throw Error(ErrorKind::OutOfRange, std::string(what) + ": need step > 0 and to >= from");
  }
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

int cmd_sweep_p(const SweepArgs& a) {
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  auto csv = open_output(a.out, "sweep_p.csv");
  csv << "p,median,p05,p95,spread\n";
  json rows = json::array();
  for (double p : grid(a.from, a.to, a.step, "sweep-p")) {
    const auto s = summarize(nasch_saturation_samples(NaschParams{a.v_max, p}, a.runs, a.horizon, seed, a.threads));
    csv << p << ',' << s.median << ',' << s.p05 << ',' << s.p95 << ',' << s.spread() << '\n';
    rows.push_back({{"p", p}, {"summary", to_json(s)}});
  }
  emit({{"provenance", provenance("sweep-p")},
        {"runs", a.runs},
        {"horizon", a.horizon},
        {"v_max", a.v_max},
        {"seed", seed},
        {"rows", rows},
        {"csv", (fs::path(a.out) / "sweep_p.csv").string()}});
  return 0;
}

// ---- fundamental-diagram ---------------------------------------------------

struct DiagramArgs {
  std::string model = "nasch";
  double from = 0.02, to = 0.98, step = 0.02;
  Cell ring = 1000;
  long warmup = 1000, measure = 1000;
  int v_max = 2;
  double p = 0.2;
  std::vector<double> saturation = {1503, 1575, 1638};
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

int cmd_fundamental_diagram(const DiagramArgs& a) {
  const Model model = parse_model(a.model);
  const auto densities = grid(a.from, a.to, a.step, "fundamental-diagram");
  SweepOptions opt{a.ring, a.warmup, a.measure, a.seed ? *a.seed : default_seed()};
  json params = {{"ring_cells", opt.ring_cells}, {"warmup", opt.warmup}, {"measure", opt.measure},
                 {"seed", opt.seed}};
  std::vector<FlowPoint> points;
  if (model == Model::Nasch) {
    const NaschParams np{a.v_max, a.p};
    points = flow_density_sweep_nasch(densities, np, opt);
    params["v_max"] = np.v_max;
    params["p"] = np.p;
  } else {
    if (a.saturation.size() != 3) throw Error(ErrorKind::ConfigError, "--saturation needs 3 values");
    const auto cal = calibrate_alpha(make_tfn(a.saturation[0], a.saturation[1], a.saturation[2]),
                                     builtin_rule("R1"), builtin_rule("R2"));
    points = flow_density_sweep_fuzzy(densities, cal, opt);
    params["calibration"] = calibration_json(cal);
  }
  const std::string name = "fundamental_" + std::string(to_string(model)) + ".csv";
  auto csv = open_output(a.out, name);
  csv << (model == Model::Nasch ? "density,flow\n" : "density,flow1,flow2,flow3\n");
  for (const auto& pt : points) {
    csv << pt.density;
    for (double f : pt.flow_veh_h) csv << ',' << f;
    csv << '\n';
  }
  emit({{"provenance", provenance("fundamental-diagram")},
        {"model", to_string(model)},
        {"parameters", params},
        {"points", points.size()},
        {"csv", (fs::path(a.out) / name).string()}});
  return 0;
}

// ---- benchmark -------------------------------------------------------------

struct BenchmarkArgs {
  std::string config;
  int runs = 500;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  const auto cfg = load_config(a.config);
  const Scenario fuzzy = cfg.scenario.with_cell_length(kFuzzyCellLength);
  const Scenario nasch = cfg.scenario.with_cell_length(kNaschCellLength);
  if (fuzzy.vehicle_count() != nasch.vehicle_count()) {
    throw Error(ErrorKind::DimensionMismatch, "scenario has different vehicle counts on the two lattices");
  }
  const auto cal = calibration_for(cfg.model);
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const auto times = count_times(fuzzy.horizon, 1);
  const bool probes = fuzzy.vehicle_count() > 0 && !fuzzy.stop_cells().empty();

  // The fuzzy run feeds each component the probes one ensemble run gets.
  auto start = Clock::now();
  FuzzySimulator sim(fuzzy, cal, BoundPolicy::Count);
  std::vector<std::unique_ptr<RunProbe>> fp;
  if (probes) {
    const auto factory = run_probes(fuzzy, times);
    for (int m = 0; m < 3; ++m) fp.push_back(factory());
  }
  auto observe = [&](long t) {
    for (std::size_t m = 0; m < fp.size(); ++m) fp[m]->observe(t, sim.state().components[m]);
  };
  observe(0);
  for (long t = 1; t <= fuzzy.horizon; ++t) {
    sim.step();
    observe(t);
  }
  const double fuzzy_secs = seconds_since(start);

  const EnsembleConfig ec{cfg.model.nasch, a.runs, nasch.horizon, seed, a.threads};
  start = Clock::now();
  const auto ens = probes ? run_ensemble(nasch, ec, run_probes(nasch, times))
                          : run_ensemble(nasch, ec, [] {
                              return std::make_unique<CompositeProbe>(std::vector<std::unique_ptr<RunProbe>>{});
                            });
  const double nasch_secs = seconds_since(start);

  TrajectoryLog log;
  log.steps = fuzzy.horizon;
  log.vehicles = fuzzy.vehicle_count();
  log.op_count = sim.op_count();
  const auto report = op_cost_report(log, ens);
  emit({{"provenance", provenance("benchmark")},
        {"vehicles", log.vehicles},
        {"steps", log.steps},
        {"runs", a.runs},
        {"seed", seed},
        {"threads", a.threads},
        {"fuzzy_ops", report.fuzzy_ops},
        {"nasch_ops", report.nasch_ops},
        {"op_ratio", report.ratio},
        {"fuzzy_seconds", fuzzy_secs},
        {"nasch_seconds", nasch_secs},
        {"speedup", fuzzy_secs > 0 ? nasch_secs / fuzzy_secs : 0.0},
        {"bound_excursions", sim.bound_excursions()}});
  return 0;
}

int report_error(std::string_view kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy cellular automaton and NaSch traffic simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FCA_VERSION);

  DischargeArgs da;
  auto* discharge = app.add_subcommand("discharge", "Queue discharge trace of one rule table");
  discharge->add_option("--rule", da.rule, "R1, R2, or a name for --matrix");
  discharge->add_option("--matrix", da.matrix, "24 custom table entries, row by row")->delimiter(',');
  discharge->add_option("--queue", da.queue, "Standing queue length")->check(CLI::PositiveNumber);
  discharge->add_option("--steps", da.steps, "Time steps")->check(CLI::PositiveNumber);
  discharge->add_option("--out", da.out, "Output directory");

  FuzzyArgs fa;
  auto* sim_fuzzy = app.add_subcommand("simulate-fuzzy", "One fuzzy run of a scenario file");
  sim_fuzzy->add_option("--config", fa.config, "Scenario file")->required();
  sim_fuzzy->add_option("--out", fa.out, "Output directory (default: output.directory)");
  sim_fuzzy->add_option("--bound-policy", fa.policy, "strict: stop on a bound violation; count: record it")
      ->check(CLI::IsMember({"strict", "count"}));

  NaschArgs na;
  auto* sim_nasch = app.add_subcommand("simulate-nasch", "Monte Carlo NaSch ensemble of a scenario file");
  sim_nasch->add_option("--config", na.config, "Scenario file")->required();
  sim_nasch->add_option("--runs", na.runs, "Ensemble size")->check(CLI::PositiveNumber);
  sim_nasch->add_option("--seed", na.seed, "Master seed (default: $FCA_SEED or 0)");
  sim_nasch->add_option("--threads", na.threads, "Worker threads, 0 = all cores");
  sim_nasch->add_option("--out", na.out, "Output directory (default: output.directory)");

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate", "alpha triple for a fuzzy saturation flow in veh/h");
  calibrate->add_option("--s1", ca.s1);
  calibrate->add_option("--s2", ca.s2);
  calibrate->add_option("--s3", ca.s3);
  calibrate->add_option("--ruleL", ca.rule_low);
  calibrate->add_option("--ruleH", ca.rule_high);

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep-p", "NaSch saturation flow percentiles over p");
  sweep->add_option("--from", sa.from);
  sweep->add_option("--to", sa.to);
  sweep->add_option("--step", sa.step);
  sweep->add_option("--runs", sa.runs)->check(CLI::PositiveNumber);
  sweep->add_option("--horizon", sa.horizon)->check(CLI::PositiveNumber);
  sweep->add_option("--vmax", sa.v_max);
  sweep->add_option("--seed", sa.seed, "Master seed (default: $FCA_SEED or 0)");
  sweep->add_option("--threads", sa.threads);
  sweep->add_option("--out", sa.out, "Output directory");

  DiagramArgs ga;
  auto* diagram = app.add_subcommand("fundamental-diagram", "Flow-density curve on a ring road");
  diagram->add_option("--model", ga.model)->check(CLI::IsMember({"fuzzy", "nasch"}));
  diagram->add_option("--from", ga.from, "First density (vehicles per cell)");
  diagram->add_option("--to", ga.to);
  diagram->add_option("--step", ga.step);
  diagram->add_option("--ring", ga.ring, "Ring length in cells")->check(CLI::PositiveNumber);
  diagram->add_option("--warmup", ga.warmup);
  diagram->add_option("--measure", ga.measure)->check(CLI::PositiveNumber);
  diagram->add_option("--vmax", ga.v_max);
  diagram->add_option("--p", ga.p);
  diagram->add_option("--saturation", ga.saturation, "Fuzzy saturation flow triple, veh/h")->expected(3);
  diagram->add_option("--seed", ga.seed, "Placement/NaSch seed (default: $FCA_SEED or 0)");
  diagram->add_option("--out", ga.out, "Output directory");

  BenchmarkArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Op counts and wall-clock of both models on a scenario");
  bench->add_option("--config", ba.config, "Scenario file")->required();
  bench->add_option("--runs", ba.runs)->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "Master seed (default: $FCA_SEED or 0)");
  bench->add_option("--threads", ba.threads, "Ensemble worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), kExitUsage);
  }

  try {
    if (*discharge) return cmd_discharge(da);
    if (*sim_fuzzy) return cmd_simulate_fuzzy(fa);
    if (*sim_nasch) return cmd_simulate_nasch(na);
    if (*calibrate) return cmd_calibrate(ca);
    if (*sweep) return cmd_sweep_p(sa);
    if (*diagram) return cmd_fundamental_diagram(ga);
    if (*bench) return cmd_benchmark(ba);
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what(), kExitError);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), kExitError);
  }
  return kExitUsage;
}
