#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "fcatraffic/lattice.hpp"
#include "fcatraffic/rules.hpp"
#include "fcatraffic/scenario.hpp"
#include "fcatraffic/trajectory.hpp"

namespace fca {

/// Name of the random stream recorded in output metadata.
inline constexpr std::string_view kGeneratorName = "mt19937_64/splitmix64-child-seeds/53bit-uniform";

/// Portable uniform stream on [0, 1): std::mt19937_64 (output fixed by the
/// standard) with the top 53 bits mapped to a double. Counts its draws.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of run k in an ensemble; depends only on (master, k).
std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t run) noexcept;

/// One NaSch step: a single draw per vehicle in index order selects NSL
/// (draw < p) or NSH.
void step_nasch_in_place(Channel& channel, const NaschParams& params, const HaltSet& halt,
                         UniformStream& rng, std::vector<int>& gaps);
Channel step_nasch(const Channel& channel, const NaschParams& params, const HaltSet& halt,
                   UniformStream& rng);

class NaschSimulator {
 public:
  NaschSimulator(const Scenario& scenario, NaschParams params, std::uint64_t seed);
  NaschSimulator(Channel initial, std::vector<SignalSchedule> schedules, NaschParams params,
                 std::uint64_t seed);

  const Channel& state() const noexcept { return channel_; }
  long t() const noexcept { return t_; }
  std::uint64_t op_count() const noexcept { return ops_; }
  std::uint64_t draws() const noexcept { return rng_.draws(); }

  void step();

 private:
  Channel channel_;
  std::vector<SignalSchedule> schedules_;
  NaschParams params_;
  UniformStream rng_;
  long t_ = 0;
  std::uint64_t ops_ = 0;
  std::vector<int> gaps_;
};

TrajectoryLog run_nasch(const Scenario& scenario, const NaschParams& params, std::uint64_t seed);

struct EnsembleConfig {
  NaschParams params;
  int runs = 500;
  long steps = 3600;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Per-run probe samples of a Monte Carlo ensemble, ordered by run index.
struct Ensemble {
  std::vector<std::vector<double>> samples;
  std::vector<std::uint64_t> seeds;
  std::uint64_t op_count = 0;
  std::uint64_t draws = 0;
  int runs = 0;
  long steps = 0;
  std::size_t vehicles = 0;

  /// Sample j of every run.
  std::vector<double> metric(std::size_t j) const;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// K independent runs of `cfg.steps` steps over the scenario. Each run feeds
/// a fresh probe with snapshots t = 0..steps. Bit-reproducible for a fixed
/// master seed regardless of thread count.
Ensemble run_ensemble(const Scenario& scenario, const EnsembleConfig& cfg,
                      const ProbeFactory& make_probe);

/// Nearest-rank percentiles: the ceil(q/100 * n)-th smallest sample (the
/// smallest for q = 0). Throws Error(EmptySample).
std::vector<double> percentiles(std::vector<double> samples, std::span<const double> q_list);
double percentile(std::vector<double> samples, double q);

struct PercentileSummary {
  double min = 0, p05 = 0, median = 0, p95 = 0, max = 0;
  double spread() const noexcept { return p95 - p05; }
};

PercentileSummary summarize(std::vector<double> samples);

}  // namespace fca
