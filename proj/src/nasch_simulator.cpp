#include "fcatraffic/nasch_simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fcatraffic/error.hpp"
#include "format.hpp"

namespace fca {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t run) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(run + 0x632BE59BD9B4E019ULL));
}

void step_nasch_in_place(Channel& channel, const NaschParams& params, const HaltSet& halt,
                         UniformStream& rng, std::vector<int>& gaps) {
  advance_channel_in_place(
      channel,
      [&](std::size_t, int v, int g, int) {
        return nasch_velocity(params, v, g, rng.next() < params.p);
      },
      halt, gaps);
}

Channel step_nasch(const Channel& channel, const NaschParams& params, const HaltSet& halt,
                   UniformStream& rng) {
  Channel next = channel;
  std::vector<int> gaps;
  step_nasch_in_place(next, params, halt, rng, gaps);
  return next;
}

NaschSimulator::NaschSimulator(const Scenario& scenario, NaschParams params, std::uint64_t seed)
    : NaschSimulator(make_channel(scenario.initial_positions(), scenario.initial_halt()),
                     scenario.schedules(), params, seed) {}

NaschSimulator::NaschSimulator(Channel initial, std::vector<SignalSchedule> schedules,
                               NaschParams params, std::uint64_t seed)
    : channel_(std::move(initial)),
      schedules_(std::move(schedules)),
      params_(params),
      rng_(seed) {
  validate(params_);
}

void NaschSimulator::step() {
  const HaltSet halt = active_halt_cells(schedules_, t_);
  step_nasch_in_place(channel_, params_, halt, rng_, gaps_);
  ops_ += channel_.size();
  ++t_;
}

TrajectoryLog run_nasch(const Scenario& scenario, const NaschParams& params, std::uint64_t seed) {
  scenario.validate();
  NaschSimulator sim(scenario, params, seed);
  TrajectoryLog log;
  log.model = "nasch";
  log.channels = {"nasch"};
  log.vehicles = sim.state().size();
  log.steps = scenario.horizon;
  const std::array<const Channel*, 1> snapshot = {&sim.state()};
  log.record(snapshot);
  for (long t = 0; t < scenario.horizon; ++t) {
    sim.step();
    log.record(snapshot);
  }
  log.op_count = sim.op_count();
  log.metadata["v_max"] = std::to_string(params.v_max);
  log.metadata["p"] = detail::format_real(params.p);
  log.metadata["seed"] = std::to_string(seed);
  log.metadata["generator"] = std::string(kGeneratorName);
  return log;
}

std::vector<double> Ensemble::metric(std::size_t j) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& run : samples) {
    if (j >= run.size()) throw Error(ErrorKind::OutOfRange, "metric index beyond run samples");
    out.push_back(run[j]);
  }
  return out;
}

Ensemble run_ensemble(const Scenario& scenario, const EnsembleConfig& cfg,
                      const ProbeFactory& make_probe) {
  if (cfg.runs < 1 || cfg.steps < 1) {
    throw Error(ErrorKind::OutOfRange, "ensemble needs at least one run and one step");
  }
  validate(cfg.params);
  scenario.validate();

  const Channel initial = make_channel(scenario.initial_positions(), scenario.initial_halt());
  const std::vector<SignalSchedule> schedules = scenario.schedules();
  Ensemble result;
  result.runs = cfg.runs;
  result.steps = cfg.steps;
  result.vehicles = initial.size();
  result.samples.resize(static_cast<std::size_t>(cfg.runs));
  result.seeds.resize(static_cast<std::size_t>(cfg.runs));
  std::vector<std::uint64_t> ops(result.samples.size());
  std::vector<std::uint64_t> draws(result.samples.size());

  std::atomic<int> next_run{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int k = next_run++; k < cfg.runs; k = next_run++) {
      try {
        const auto idx = static_cast<std::size_t>(k);
        const std::uint64_t seed = child_seed(cfg.master_seed, idx);
        NaschSimulator sim(initial, schedules, cfg.params, seed);
        auto probe = make_probe();
        probe->observe(0, sim.state());
        for (long t = 1; t <= cfg.steps; ++t) {
          sim.step();
          probe->observe(t, sim.state());
        }
        result.samples[idx] = probe->samples();
        result.seeds[idx] = seed;
        ops[idx] = sim.op_count();
        draws[idx] = sim.draws();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next_run = cfg.runs;
      }
    }
  };

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.runs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t k = 0; k < ops.size(); ++k) {
    result.op_count += ops[k];
    result.draws += draws[k];
  }
  return result;
}

double percentile(std::vector<double> samples, double q) {
  const double qs[] = {q};
  return percentiles(std::move(samples), qs).front();
}

std::vector<double> percentiles(std::vector<double> samples, std::span<const double> q_list) {
  if (samples.empty()) throw Error(ErrorKind::EmptySample, "percentile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  std::vector<double> out;
  out.reserve(q_list.size());
  for (double q : q_list) {
    if (!(q >= 0.0 && q <= 100.0)) throw Error(ErrorKind::OutOfRange, "percentile outside [0, 100]");
    // Nudge down so that e.g. 5/100 * 100 does not round up past an integer rank.
    const double rank = std::ceil(q / 100.0 * n - 1e-9);
    const auto idx = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
    out.push_back(samples[std::min(idx, samples.size() - 1)]);
  }
  return out;
}

PercentileSummary summarize(std::vector<double> samples) {
  const double qs[] = {0.0, 5.0, 50.0, 95.0, 100.0};
  const auto p = percentiles(std::move(samples), qs);
  return PercentileSummary{p[0], p[1], p[2], p[3], p[4]};
}

}  // namespace fca
