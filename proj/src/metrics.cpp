#include "fcatraffic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fcatraffic/error.hpp"

namespace fca {

// ---------------------------------------------------------------------------
// Probes

std::size_t count_upstream(std::span<const Cell> positions, Cell boundary) {
  return static_cast<std::size_t>(
      std::count_if(positions.begin(), positions.end(), [&](Cell x) { return x <= boundary; }));
}

void CrossingProbe::observe(long t, const Channel& channel) {
  if (t > 0 && t <= horizon_) {
    crossed_ += count_crossings(previous_, channel.positions, line_);
  }
  upstream_ = count_upstream(channel.positions, line_);
  if (upstream_ == 0 && !emptied_at_) emptied_at_ = t;
  previous_ = channel.positions;
}

std::vector<double> CrossingProbe::samples() const {
  if (require_queue_ && emptied_at_ && *emptied_at_ < horizon_) {
    throw Error(ErrorKind::QueueExhausted,
                "queue upstream of cell " + std::to_string(line_) + " emptied at step " +
                    std::to_string(*emptied_at_) + " before the horizon " + std::to_string(horizon_));
  }
  const double hours = static_cast<double>(horizon_) / kStepsPerHour;
  return {horizon_ > 0 ? static_cast<double>(crossed_) / hours : 0.0};
}

void ArrivalProbe::observe(long t, const Channel& channel) {
  if (arrival_ || vehicle_ >= channel.size()) return;
  if (channel.positions[vehicle_] > line_) arrival_ = t;
}

std::vector<double> ArrivalProbe::samples() const {
  if (!arrival_) {
    throw Error(ErrorKind::NeverArrived,
                "vehicle " + std::to_string(vehicle_) + " never passed cell " + std::to_string(line_));
  }
  return {static_cast<double>(*arrival_)};
}

CountProbe::CountProbe(Cell boundary, std::vector<long> times)
    : boundary_(boundary), times_(std::move(times)), counts_(times_.size(), 0.0) {
  std::sort(times_.begin(), times_.end());
}

void CountProbe::observe(long t, const Channel& channel) {
  while (next_ < times_.size() && times_[next_] < t) ++next_;
  if (next_ == times_.size() || times_[next_] != t) return;
  const auto n = static_cast<double>(count_upstream(channel.positions, boundary_));
  while (next_ < times_.size() && times_[next_] == t) counts_[next_++] = n;
}

void CompositeProbe::observe(long t, const Channel& channel) {
  for (auto& p : parts_) p->observe(t, channel);
}

std::vector<double> CompositeProbe::samples() const {
  std::vector<double> out;
  for (const auto& p : parts_) {
    auto s = p->samples();
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Saturation flow

double measure_saturation_flow(const TrajectoryLog& log, std::size_t channel, Cell stop_cell,
                               long horizon) {
  CrossingProbe probe(stop_cell, horizon);
  replay(log, channel, probe);
  return probe.samples().front();
}

std::array<double, 3> measure_fuzzy_saturation_flow(const TrajectoryLog& log, Cell stop_cell,
                                                    long horizon) {
  std::array<double, 3> flows{};
  for (int m = 1; m <= 3; ++m) {
    flows[m - 1] = measure_saturation_flow(log, component_channel(m), stop_cell, horizon);
  }
  return flows;
}

double rule_queue_saturation_flow(const RuleTable& rule, long horizon) {
  const Scenario s = build_saturated_queue(horizon, kFuzzyCellLength);
  Channel ch = make_channel(s.initial_positions(), s.initial_halt());
  CrossingProbe probe(s.stop_cells().front(), horizon);
  std::vector<int> gaps;
  probe.observe(0, ch);
  for (long t = 0; t < horizon; ++t) {
    advance_channel_in_place(
        ch, [&](std::size_t, int v, int g, int pg) { return table_velocity(rule, v, g, pg); },
        active_halt_cells(s.schedules(), t), gaps);
    probe.observe(t + 1, ch);
  }
  return probe.samples().front();
}

std::array<double, 3> fuzzy_queue_saturation_flow(const Calibration& cal, long horizon) {
  const Scenario s = build_saturated_queue(horizon, kFuzzyCellLength);
  const Cell stop = s.stop_cells().front();
  FuzzySimulator sim(s, cal);
  std::array<CrossingProbe, 3> probes = {CrossingProbe(stop, horizon), CrossingProbe(stop, horizon),
                                         CrossingProbe(stop, horizon)};
  auto observe = [&](long t) {
    for (std::size_t m = 0; m < 3; ++m) probes[m].observe(t, sim.state().components[m]);
  };
  observe(0);
  for (long t = 1; t <= horizon; ++t) {
    sim.step();
    observe(t);
  }
  return {probes[0].samples().front(), probes[1].samples().front(), probes[2].samples().front()};
}

std::vector<double> nasch_saturation_samples(const NaschParams& params, int runs, long horizon,
                                             std::uint64_t master_seed, unsigned threads) {
  const Scenario s = build_saturated_queue(horizon, kNaschCellLength);
  const Cell stop = s.stop_cells().front();
  EnsembleConfig cfg{params, runs, horizon, master_seed, threads};
  const Ensemble e =
      run_ensemble(s, cfg, [&] { return std::make_unique<CrossingProbe>(stop, horizon); });
  return e.metric(0);
}

// ---------------------------------------------------------------------------
// Queue discharge

DischargeTrace queue_discharge_trace(const RuleTable& rule, int queue_len, long steps) {
  if (queue_len < 2) throw Error(ErrorKind::OutOfRange, "queue discharge needs at least 2 vehicles");
  if (steps < 1) throw Error(ErrorKind::OutOfRange, "queue discharge needs at least one step");

  // Queue in cells 0..queue_len-1; red at the next cell during step 0 only.
  const Cell stop = queue_len - 1;
  const std::vector<SignalSchedule> signal = {make_schedule(halt_cell_of(stop), steps + 1, 1, steps)};
  std::vector<Cell> start;
  for (Cell x = stop; x >= 0; --x) start.push_back(x);
  Channel ch = make_channel(std::move(start), active_halt_cells(signal, 0));

  std::vector<Channel> snapshots = {ch};
  std::vector<int> gaps;
  for (long t = 0; t < steps; ++t) {
    advance_channel_in_place(
        ch, [&](std::size_t, int v, int g, int pg) { return table_velocity(rule, v, g, pg); },
        active_halt_cells(signal, t), gaps);
    snapshots.push_back(ch);
  }

  DischargeTrace trace;
  trace.first_cell = 0;
  trace.width = static_cast<std::size_t>(std::max<Cell>(ch.positions.front(), stop) + 1);
  for (const auto& snap : snapshots) {
    std::vector<int> row(trace.width, -1);
    for (std::size_t i = 0; i < snap.size(); ++i) {
      row[static_cast<std::size_t>(snap.positions[i] - trace.first_cell)] = snap.velocities[i];
    }
    trace.states.push_back(std::move(row));
  }

  // Settled pairs: both vehicles at the same nonzero velocity as one step
  // earlier and the gap between them unchanged.
  const Channel& last = snapshots.back();
  const Channel& before = snapshots[snapshots.size() - 2];
  std::map<int, std::map<int, int>> gap_histogram;  // velocity -> gap -> pairs
  std::map<int, int> velocity_pairs;
  for (std::size_t i = 0; i + 1 < last.size(); ++i) {
    const int v = last.velocities[i];
    const int gap = static_cast<int>(last.positions[i] - last.positions[i + 1] - 1);
    const int gap_before = static_cast<int>(before.positions[i] - before.positions[i + 1] - 1);
    if (v > 0 && last.velocities[i + 1] == v && before.velocities[i] == v &&
        before.velocities[i + 1] == v && gap == gap_before) {
      ++gap_histogram[v][gap];
      ++velocity_pairs[v];
    }
  }
  if (velocity_pairs.empty()) return trace;

  auto most_common = [](const std::map<int, int>& h) {
    return std::max_element(h.begin(), h.end(), [](const auto& a, const auto& b) {
             return a.second < b.second || (a.second == b.second && a.first < b.first);
           })->first;
  };
  trace.steady_velocity = most_common(velocity_pairs);
  const auto& gaps_at_v = gap_histogram[trace.steady_velocity];
  trace.steady_gap = most_common(gaps_at_v);
  trace.steady = gaps_at_v.size() == 1;
  return trace;
}

RuleTable make_custom_rule(std::string name, const RuleMatrix& u) {
  validate_rule_matrix(u);
  RuleTable rule{std::move(name), u, 0, 0};
  const DischargeTrace trace = queue_discharge_trace(rule, 20, 400);
  if (!trace.steady || trace.steady_velocity == 0) {
    throw Error(ErrorKind::InvalidRule,
                "rule " + rule.name + " does not settle into a uniform saturated stream");
  }
  rule.v_max = trace.steady_velocity;
  rule.g_stat = trace.steady_gap;
  return rule;
}

// ---------------------------------------------------------------------------
// Fuzzy measures on logs

namespace {

void require_fuzzy(const TrajectoryLog& log) {
  if (log.channel_count() != 5) {
    throw Error(ErrorKind::DimensionMismatch, "log does not hold fuzzy component channels");
  }
}

}  // namespace

std::array<long, 3> component_travel_times(const TrajectoryLog& log, std::size_t vehicle,
                                           Cell stop_cell) {
  require_fuzzy(log);
  if (vehicle >= log.vehicles) throw Error(ErrorKind::OutOfRange, "vehicle index beyond log");
  std::array<long, 3> theta{};
  for (int m = 1; m <= 3; ++m) {
    ArrivalProbe probe(vehicle, stop_cell);
    replay(log, component_channel(m), probe);
    theta[m - 1] = static_cast<long>(probe.samples().front());
  }
  return theta;
}

TriangularFuzzy fuzzy_travel_time(const TrajectoryLog& log, std::size_t vehicle, Cell stop_cell) {
  auto theta = component_travel_times(log, vehicle, stop_cell);
  std::sort(theta.begin(), theta.end());
  return make_tfn(static_cast<double>(theta[0]), static_cast<double>(theta[1]),
                  static_cast<double>(theta[2]));
}

std::array<std::size_t, 3> component_vehicle_counts(const TrajectoryLog& log, long t,
                                                    Cell boundary_cell) {
  require_fuzzy(log);
  std::array<std::size_t, 3> counts{};
  for (int m = 1; m <= 3; ++m) {
    counts[m - 1] = count_upstream(log.positions_at(t, component_channel(m)), boundary_cell);
  }
  return counts;
}

TriangularFuzzy fuzzy_vehicle_count(const TrajectoryLog& log, long t, Cell boundary_cell) {
  auto n = component_vehicle_counts(log, t, boundary_cell);
  std::sort(n.begin(), n.end());
  return make_tfn(static_cast<double>(n[0]), static_cast<double>(n[1]), static_cast<double>(n[2]));
}

// ---------------------------------------------------------------------------
// Flow-density diagram

std::vector<Cell> random_ring_placement(std::size_t vehicles, Cell ring_cells, std::uint64_t seed) {
  if (static_cast<Cell>(vehicles) > ring_cells) {
    throw Error(ErrorKind::Overfull, std::to_string(vehicles) + " vehicles do not fit on a ring of " +
                                         std::to_string(ring_cells) + " cells");
  }
  std::vector<Cell> cells(static_cast<std::size_t>(ring_cells));
  for (Cell c = 0; c < ring_cells; ++c) cells[static_cast<std::size_t>(c)] = c;
  // Partial Fisher-Yates with explicit index arithmetic, so the placement does
  // not depend on the standard library's distribution implementations.
  std::mt19937_64 engine(seed);
  for (std::size_t k = 0; k < vehicles; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(engine() % (cells.size() - k));
    std::swap(cells[k], cells[j]);
  }
  cells.resize(vehicles);
  std::sort(cells.begin(), cells.end(), std::greater<>());
  return cells;
}

namespace {

std::size_t ring_vehicle_count(double density, Cell ring_cells) {
  if (!(density > 0.0)) throw Error(ErrorKind::OutOfRange, "density must be positive");
  const auto n = static_cast<std::size_t>(std::llround(density * static_cast<double>(ring_cells)));
  if (density > 1.0 || static_cast<Cell>(n) > ring_cells) {
    throw Error(ErrorKind::Overfull, "density above one vehicle per cell");
  }
  return std::max<std::size_t>(n, 1);
}

double flow_veh_h(std::uint64_t velocity_sum, Cell ring_cells, long steps) {
  return static_cast<double>(velocity_sum) /
         (static_cast<double>(ring_cells) * static_cast<double>(steps)) * kStepsPerHour;
}

std::uint64_t velocity_sum(const Channel& ch) {
  std::uint64_t sum = 0;
  for (int v : ch.velocities) sum += static_cast<std::uint64_t>(v);
  return sum;
}

void check_sweep(const SweepOptions& options) {
  if (options.ring_cells < 1 || options.warmup < 0 || options.measure < 1) {
    throw Error(ErrorKind::OutOfRange, "sweep needs a ring of at least one cell and a measured window");
  }
}

}  // namespace

std::vector<FlowPoint> flow_density_sweep_nasch(std::span<const double> densities,
                                               const NaschParams& params,
                                               const SweepOptions& options) {
  check_sweep(options);
  std::vector<FlowPoint> points;
  for (std::size_t k = 0; k < densities.size(); ++k) {
    const std::size_t n = ring_vehicle_count(densities[k], options.ring_cells);
    const std::uint64_t seed = child_seed(options.seed, k);
    NaschSimulator sim(
        make_channel(random_ring_placement(n, options.ring_cells, seed), {}, options.ring_cells), {},
        params, splitmix64(seed));
    for (long t = 0; t < options.warmup; ++t) sim.step();
    std::uint64_t sum = 0;
    for (long t = 0; t < options.measure; ++t) {
      sim.step();
      sum += velocity_sum(sim.state());
    }
    points.push_back({static_cast<double>(n) / static_cast<double>(options.ring_cells),
                      {flow_veh_h(sum, options.ring_cells, options.measure)}});
  }
  return points;
}

std::vector<FlowPoint> flow_density_sweep_fuzzy(std::span<const double> densities,
                                               const Calibration& cal,
                                               const SweepOptions& options) {
  check_sweep(options);
  std::vector<FlowPoint> points;
  for (std::size_t k = 0; k < densities.size(); ++k) {
    const std::size_t n = ring_vehicle_count(densities[k], options.ring_cells);
    const std::uint64_t seed = child_seed(options.seed, k);
    FuzzySimulator sim(
        make_fuzzy_state(random_ring_placement(n, options.ring_cells, seed), {}, options.ring_cells),
        {}, cal, BoundPolicy::Count);
    for (long t = 0; t < options.warmup; ++t) sim.step();
    std::array<std::uint64_t, 3> sums{};
    for (long t = 0; t < options.measure; ++t) {
      sim.step();
      for (std::size_t m = 0; m < 3; ++m) sums[m] += velocity_sum(sim.state().components[m]);
    }
    FlowPoint point{static_cast<double>(n) / static_cast<double>(options.ring_cells), {}};
    for (auto s : sums) point.flow_veh_h.push_back(flow_veh_h(s, options.ring_cells, options.measure));
    points.push_back(std::move(point));
  }
  return points;
}

// ---------------------------------------------------------------------------
// Operation counts

OpCostReport op_cost_report(const TrajectoryLog& fuzzy_log, const Ensemble& ensemble) {
  if (fuzzy_log.steps != ensemble.steps || fuzzy_log.vehicles != ensemble.vehicles) {
    throw Error(ErrorKind::DimensionMismatch,
                "fuzzy run (T=" + std::to_string(fuzzy_log.steps) + ", N=" +
                    std::to_string(fuzzy_log.vehicles) + ") and ensemble (T=" +
                    std::to_string(ensemble.steps) + ", N=" + std::to_string(ensemble.vehicles) +
                    ") differ");
  }
  OpCostReport report{fuzzy_log.op_count, ensemble.op_count, 0.0};
  report.ratio = report.fuzzy_ops > 0
                     ? static_cast<double>(report.nasch_ops) / static_cast<double>(report.fuzzy_ops)
                     : static_cast<double>(ensemble.runs) / 5.0;
  return report;
}

}  // namespace fca
