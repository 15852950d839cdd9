// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Run a subset with: fca_acceptance 1 4 9

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fcatraffic/error.hpp"
#include "fcatraffic/fuzzy_number.hpp"
#include "fcatraffic/fuzzy_simulator.hpp"
#include "fcatraffic/metrics.hpp"
#include "fcatraffic/nasch_simulator.hpp"
#include "fcatraffic/rules.hpp"
#include "fcatraffic/scenario.hpp"
#include "generators.hpp"

using namespace fca;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

// 1. Deterministic saturation flows of R1 and R2 by queue discharge.
Outcome deterministic_flows() {
  Outcome out{true, ""};
  for (auto [name, flow, gap] : {std::tuple{"R1", 1440.0, 4}, std::tuple{"R2", 1800.0, 3}}) {
    const auto start = Clock::now();
    const auto trace = queue_discharge_trace(builtin_rule(name), 20, 200);
    const double secs = seconds_since(start);
    const bool ok = trace.steady && trace.steady_gap == gap && trace.saturation_flow_veh_h() == flow &&
                    secs < 1.0;
    out.pass = out.pass && ok;
    out.detail += fmt("%s: s=%.1f veh/h gap=%d v=%d (%.3fs); ", name, trace.saturation_flow_veh_h(),
                      trace.steady_gap, trace.steady_velocity, secs);
  }
  return out;
}

// 2. Calibration of the reference fuzzy saturation flow and the closed form.
Outcome calibration() {
  const auto cal = calibrate_alpha(make_tfn(1503, 1575, 1638), builtin_rule("R1"), builtin_rule("R2"));
  const std::array<double, 3> expected = {0.2096, 0.4286, 0.6044};
  const std::array<double, 3> printed = {0.21, 0.43, 0.60};
  bool ok = true;
  for (std::size_t m = 0; m < 3; ++m) {
    ok = ok && std::abs(cal.alpha[m] - expected[m]) <= 0.0005;
    ok = ok && std::abs(cal.alpha[m] - printed[m]) <= 0.01;
  }
  std::mt19937_64 rng(kSeed);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    double s = 0;
    while (!(s > 0.4 && s < 0.5)) s = 0.4 + 0.1 * gen::unit(rng);
    const double general = alpha_for_saturation(builtin_rule("R1"), builtin_rule("R2"), s);
    worst = std::max(worst, std::abs(general - (5.0 - 2.0 / s)));
  }
  ok = ok && worst <= 1e-12;
  return {ok, fmt("alpha=(%.6f, %.6f, %.6f); max |general - (5 - 2/s)| = %.2e over 100 s", cal.alpha[0],
                  cal.alpha[1], cal.alpha[2], worst)};
}

// 3. saturation_of_alpha after calibration is the identity.
Outcome round_trip() {
  const auto r1 = builtin_rule("R1");
  const auto r2 = builtin_rule("R2");
  std::mt19937_64 rng(kSeed + 3);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const double s = 0.4 + 0.1 * gen::unit(rng);
    worst = std::max(worst, std::abs(saturation_of_alpha(r1, r2, alpha_for_saturation(r1, r2, s)) - s));
  }
  return {worst <= 1e-9, fmt("max error %.2e over 100 points", worst)};
}

// 4. Fuzzy saturated queue reproduces the target flows.
Outcome fuzzy_saturation() {
  const auto cal = make_calibration(builtin_rule("R1"), builtin_rule("R2"), {0.21, 0.43, 0.60});
  const auto start = Clock::now();
  const auto flows = fuzzy_queue_saturation_flow(cal, 3600);
  const double secs = seconds_since(start);
  const std::array<double, 3> target = {1503, 1575, 1638};
  bool ok = secs < 5.0;
  for (std::size_t m = 0; m < 3; ++m) ok = ok && std::abs(flows[m] - target[m]) <= 0.02 * target[m];
  return {ok, fmt("flows=(%.0f, %.0f, %.0f) veh/h vs (1503, 1575, 1638) +-2%%; %.2fs", flows[0], flows[1],
                  flows[2], secs)};
}

// 5. NaSch saturation flow distribution.
Outcome nasch_distribution() {
  const auto start = Clock::now();
  const auto samples = nasch_saturation_samples(NaschParams{2, 0.2}, 500, 3600, kSeed);
  const double secs = seconds_since(start);
  const auto s = summarize(samples);
  const bool ok = within(s.median, 1550, 1600) && within(s.p05, 1478, 1528) && within(s.p95, 1613, 1663);
  return {ok, fmt("median=%.0f (1550..1600) p05=%.0f (1478..1528) p95=%.0f (1613..1663) "
                  "min=%.0f max=%.0f; %.1fs",
                  s.median, s.p05, s.p95, s.min, s.max, secs)};
}

// 6. Median falls and spread grows with p.
Outcome monotonicity() {
  std::vector<PercentileSummary> rows;
  std::string detail;
  for (double p : {0.0, 0.2, 0.4, 0.6}) {
    rows.push_back(summarize(nasch_saturation_samples(NaschParams{2, p}, 100, 3600, kSeed)));
    detail += fmt("p=%.1f median=%.0f spread=%.0f; ", p, rows.back().median, rows.back().spread());
  }
  bool ok = true;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    ok = ok && rows[k].median < rows[k - 1].median && rows[k].spread() > rows[k - 1].spread();
  }
  return {ok, detail};
}

// Probes shared by the arterial comparisons: last-vehicle arrival and the
// per-step count upstream of the third stop line.
ProbeFactory arterial_probes(std::size_t last, Cell stop, long horizon) {
  std::vector<long> times;
  for (long t = 0; t <= horizon; ++t) times.push_back(t);
  return [=] {
    std::vector<std::unique_ptr<RunProbe>> parts;
    parts.push_back(std::make_unique<ArrivalProbe>(last, stop));
    parts.push_back(std::make_unique<CountProbe>(stop, times));
    return std::make_unique<CompositeProbe>(std::move(parts));
  };
}

// 7. Exact operation counts and wall-clock advantage of one fuzzy run.
Outcome cost() {
  const long horizon = 3600;
  const auto fuzzy = build_arterial(30, 60, 30, 10, Model::Fuzzy, horizon);
  const auto nasch = build_arterial(30, 60, 30, 10, Model::Nasch, horizon);
  const auto cal = make_calibration(builtin_rule("R1"), builtin_rule("R2"), {0.21, 0.43, 0.60});
  const std::size_t n = fuzzy.vehicle_count();

  // Fuzzy: one run feeding the same probes to each of the three components.
  const auto fuzzy_factory = arterial_probes(n - 1, fuzzy.stop_cells()[2], horizon);
  auto start = Clock::now();
  FuzzySimulator sim(fuzzy, cal);
  std::array<std::unique_ptr<RunProbe>, 3> probes = {fuzzy_factory(), fuzzy_factory(), fuzzy_factory()};
  for (std::size_t m = 0; m < 3; ++m) probes[m]->observe(0, sim.state().components[m]);
  for (long t = 1; t <= horizon; ++t) {
    sim.step();
    for (std::size_t m = 0; m < 3; ++m) probes[m]->observe(t, sim.state().components[m]);
  }
  for (const auto& p : probes) (void)p->samples();
  const double fuzzy_secs = seconds_since(start);

  EnsembleConfig cfg{NaschParams{2, 0.2}, 500, horizon, kSeed, 1};
  start = Clock::now();
  const auto ensemble = run_ensemble(nasch, cfg, arterial_probes(n - 1, nasch.stop_cells()[2], horizon));
  const double nasch_secs = seconds_since(start);

  const auto log = run_fuzzy(fuzzy, cal);
  const auto report = op_cost_report(log, ensemble);
  const std::uint64_t tn = static_cast<std::uint64_t>(horizon) * n;
  const bool counts_ok = sim.op_count() == 5 * tn && report.fuzzy_ops == 5 * tn &&
                         report.nasch_ops == 500 * tn && ensemble.draws == 500 * tn;
  const double speedup = nasch_secs / fuzzy_secs;
  return {counts_ok && speedup >= 20.0,
          fmt("fuzzy ops=%llu (5TN=%llu) nasch ops=%llu (KTN=%llu) ratio=%.1f; "
              "fuzzy %.3fs vs ensemble %.2fs, speedup %.1fx",
              static_cast<unsigned long long>(report.fuzzy_ops), static_cast<unsigned long long>(5 * tn),
              static_cast<unsigned long long>(report.nasch_ops),
              static_cast<unsigned long long>(500 * tn), report.ratio, fuzzy_secs, nasch_secs, speedup)};
}

// 8. Free-flow speeds of both models in m/s.
Outcome free_flow() {
  Scenario single;
  single.road_length_m = 3000;
  single.cell_length_m = kFuzzyCellLength;
  single.last_vehicle_at_first_cell = true;
  single.horizon = 400;
  const auto log = run_fuzzy(single, make_calibration(builtin_rule("R1"), builtin_rule("R2"), {0.21, 0.43, 0.60}));
  bool fuzzy_ok = true;
  for (long t = 2; t <= single.horizon; ++t) {
    for (std::size_t c = 0; c < log.channel_count(); ++c) {
      fuzzy_ok = fuzzy_ok && log.positions_at(t, c)[0] - log.positions_at(t - 1, c)[0] == 2;
    }
  }

  Channel ch = make_channel({0});
  UniformStream rng(kSeed);
  std::vector<int> gaps;
  const NaschParams params{2, 0.2};
  for (int t = 0; t < 1000; ++t) step_nasch_in_place(ch, params, {}, rng, gaps);
  const Cell from = ch.positions[0];
  const long steps = 1000000;
  for (long t = 0; t < steps; ++t) step_nasch_in_place(ch, params, {}, rng, gaps);
  const double mean = static_cast<double>(ch.positions[0] - from) / static_cast<double>(steps);
  const bool nasch_ok = std::abs(mean - 1.8) <= 0.03;
  return {fuzzy_ok && nasch_ok,
          fmt("fuzzy %s 2 cells/step = %.2f m/s; NaSch mean %.4f cells/step = %.2f m/s",
              fuzzy_ok ? "exactly" : "NOT", 2 * kFuzzyCellLength, mean, mean * kNaschCellLength)};
}

// 9. Switching a settled RL platoon to RH and back.
Outcome rule_switching() {
  const auto low = builtin_rule("R1");
  const auto high = builtin_rule("R2");
  const int platoon = 5;
  std::vector<Cell> start;
  for (Cell c = platoon - 1; c >= 0; --c) start.push_back(c);
  Channel ch = make_channel(start);
  auto step = [&](const RuleTable& rule) {
    ch = advance_channel(
        ch, [&](std::size_t, int v, int g, int pg) { return table_velocity(rule, v, g, pg); }, {});
  };
  // Flow of the trailing vehicles when they share one (v, g); NaN otherwise.
  auto flow = [&] {
    const int v = ch.velocities[1];
    const auto g = ch.positions[0] - ch.positions[1] - 1;
    for (std::size_t i = 1; i < ch.size(); ++i) {
      if (ch.velocities[i] != v || ch.positions[i - 1] - ch.positions[i] - 1 != g) return std::nan("");
    }
    return rule_saturation_flow(v, static_cast<int>(g));
  };
  for (int t = 0; t < 100; ++t) step(low);
  const double before = flow();

  const int phase = 20;
  auto settle = [&](const RuleTable& rule, double target) {
    int reached = -1;
    for (int t = 1; t <= phase; ++t) {
      step(rule);
      const bool at = flow() == target;
      if (at && reached < 0) reached = t;
      if (!at) reached = -1;
    }
    return reached;
  };
  const int up = settle(high, rule_saturation_flow(high));
  const int down = settle(low, rule_saturation_flow(low));
  const bool ok = before == rule_saturation_flow(low) && up > 0 && up <= 8 && down > 0;
  return {ok, fmt("%d-vehicle platoon: s=%.2f before; s^H=0.5 from step %d after switch; "
                  "s^L=0.4 restored at step %d after switching back",
                  platoon, before, up, down)};
}

// 10. Fuzzy travel time and vehicle counts inside the NaSch ensemble bands.
Outcome envelope() {
  const long horizon = 3600;
  const auto cal = make_calibration(builtin_rule("R1"), builtin_rule("R2"), {0.21, 0.43, 0.60});
  Outcome out{true, ""};
  for (int queue : {10, 30, 50, 70}) {
    const auto fuzzy = build_arterial(queue, 60, 30, 10, Model::Fuzzy, horizon);
    const auto nasch = build_arterial(queue, 60, 30, 10, Model::Nasch, horizon);
    const std::size_t last = fuzzy.vehicle_count() - 1;
    const Cell fuzzy_stop = fuzzy.stop_cells()[2];

    const auto log = run_fuzzy(fuzzy, cal, BoundPolicy::Count);
    const auto theta = component_travel_times(log, last, fuzzy_stop);

    EnsembleConfig cfg{NaschParams{2, 0.2}, 500, horizon, kSeed + static_cast<std::uint64_t>(queue), 0};
    const auto ens = run_ensemble(nasch, cfg, arterial_probes(last, nasch.stop_cells()[2], horizon));
    const auto tt = summarize(ens.metric(0));

    bool ok = true;
    for (long th : theta) ok = ok && within(static_cast<double>(th), tt.min, tt.max);
    const auto sorted_theta = fuzzy_travel_time(log, last, fuzzy_stop);
    ok = ok && within(sorted_theta.peak(), tt.p05, tt.p95);

    long outside_minmax = 0;
    long middle_outside = 0;
    for (long t = 0; t <= horizon; ++t) {
      const auto band = summarize(ens.metric(1 + static_cast<std::size_t>(t)));
      const auto counts = component_vehicle_counts(log, t, fuzzy_stop);
      for (auto c : counts) outside_minmax += !within(static_cast<double>(c), band.min, band.max);
      const auto nt = fuzzy_vehicle_count(log, t, fuzzy_stop);
      middle_outside += !within(nt.peak(), band.p05, band.p95);
    }
    ok = ok && outside_minmax == 0 && middle_outside == 0;
    out.pass = out.pass && ok;
    out.detail += fmt("[q=%d %s: theta=(%ld,%ld,%ld) NaSch min/p05/p95/max=%.0f/%.0f/%.0f/%.0f; "
                      "count components outside min-max at %ld step-components, middle outside "
                      "p05-p95 at %ld steps; bound excursions %s] ",
                      queue, ok ? "ok" : "miss", theta[0], theta[1], theta[2], tt.min, tt.p05, tt.p95,
                      tt.max, outside_minmax, middle_outside, log.metadata.at("bound_excursions").c_str());
  }
  return out;
}

// 11. Invariants across 200 random scenarios.
Outcome invariants() {
  std::mt19937_64 rng(kSeed + 11);
  int bounding = 0, collisions = 0, halts = 0, counts = 0, repro = 0;
  const int scenarios = 200;
  for (int k = 0; k < scenarios; ++k) {
    const auto fc = gen::random_case(rng, Model::Fuzzy);
    const auto fs = fc.scenario.schedules();
    FuzzySimulator fsim(fc.scenario, fc.calibration, BoundPolicy::Count);
    bool bounded = true, ordered = true, halted = true;
    for (long t = 0; t < fc.scenario.horizon; ++t) {
      const FuzzyState before = fsim.state();
      const HaltSet halt = active_halt_cells(fs, t);
      fsim.step();
      const FuzzyState& after = fsim.state();
      const std::array<const Channel*, 5> b = {&before.low, &before.high, &before.components[0],
                                               &before.components[1], &before.components[2]};
      const std::array<const Channel*, 5> a = {&after.low, &after.high, &after.components[0],
                                               &after.components[1], &after.components[2]};
      for (std::size_t c = 0; c < 5; ++c) {
        ordered = ordered && gen::strictly_ordered(*a[c]);
        halted = halted && gen::respects_halts(*b[c], *a[c], halt);
      }
      for (std::size_t i = 0; i < after.size(); ++i) {
        for (const auto& comp : after.components) {
          bounded = bounded && after.low.positions[i] <= comp.positions[i] &&
                    comp.positions[i] <= after.high.positions[i];
        }
      }
    }
    const auto fuzzy_tn = static_cast<std::uint64_t>(fc.scenario.horizon) * fc.scenario.vehicle_count();
    counts += fsim.op_count() != 5 * fuzzy_tn;

    const auto nc = gen::random_case(rng, Model::Nasch);
    const auto ns = nc.scenario.schedules();
    NaschSimulator nsim(nc.scenario, nc.nasch, nc.seed);
    for (long t = 0; t < nc.scenario.horizon; ++t) {
      const Channel before = nsim.state();
      nsim.step();
      ordered = ordered && gen::strictly_ordered(nsim.state());
      halted = halted && gen::respects_halts(before, nsim.state(), active_halt_cells(ns, t));
    }
    const auto nasch_tn = static_cast<std::uint64_t>(nc.scenario.horizon) * nc.scenario.vehicle_count();
    counts += nsim.op_count() != nasch_tn || nsim.draws() != nasch_tn;

    const Cell line = nc.scenario.stop_cells().back();
    const long horizon = nc.scenario.horizon;
    ProbeFactory factory = [line, horizon] {
      return std::make_unique<CrossingProbe>(line, horizon, false);
    };
    EnsembleConfig cfg{nc.nasch, 6, horizon, nc.seed, 1};
    const auto e1 = run_ensemble(nc.scenario, cfg, factory);
    cfg.threads = 3;
    const auto e2 = run_ensemble(nc.scenario, cfg, factory);
    repro += !(e1 == e2) || e1.draws != 6 * nasch_tn;

    bounding += !bounded;
    collisions += !ordered;
    halts += !halted;
  }
  const bool ok = bounding == 0 && collisions == 0 && halts == 0 && counts == 0 && repro == 0;
  return {ok, fmt("violations over %d scenarios: bounding %d, collisions %d, halt cells %d, "
                  "op/draw counts %d, ensemble reproducibility %d",
                  scenarios, bounding, collisions, halts, counts, repro)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"deterministic saturation flows", deterministic_flows},
      {"calibration", calibration},
      {"calibration round trip", round_trip},
      {"fuzzy saturation reproduction", fuzzy_saturation},
      {"NaSch saturation distribution", nasch_distribution},
      {"monotonicity in p", monotonicity},
      {"operation counts and speedup", cost},
      {"free-flow speeds", free_flow},
      {"rule switching", rule_switching},
      {"envelope containment", envelope},
      {"invariant suite", invariants},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    const auto start = Clock::now();
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first,
                seconds_since(start), out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
