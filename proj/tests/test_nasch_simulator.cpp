#include <doctest.h>

#include "fcatraffic/error.hpp"
#include "fcatraffic/metrics.hpp"
#include "fcatraffic/nasch_simulator.hpp"
#include "oracles.hpp"

using namespace fca;

TEST_CASE("uniform stream is the standard mt19937_64 sequence") {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  std::mt19937_64 reference;
  reference.discard(9999);
  const std::uint64_t expected = reference();
  CHECK(expected == 9981545732273789042ull);

  UniformStream s(std::mt19937_64::default_seed);
  double last = 0;
  for (int k = 0; k < 10000; ++k) last = s.next();
  CHECK(last == static_cast<double>(expected >> 11) * 0x1.0p-53);
  CHECK(s.draws() == 10000);
}

TEST_CASE("child seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(child_seed(42, k));
  CHECK(seen.size() == 1000);
  CHECK(child_seed(42, 3) == child_seed(42, 3));
  CHECK(child_seed(42, 3) != child_seed(43, 3));
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
}

TEST_CASE("NaSch step matches an oracle fed with the same draws") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<Cell> occ;
    const int n = 1 + static_cast<int>(gen() % 15);
    while (static_cast<int>(occ.size()) < n) occ.insert(static_cast<Cell>(gen() % 50));
    std::vector<Cell> pos(occ.rbegin(), occ.rend());
    const double p = (gen() % 11) / 10.0;
    const NaschParams params{2, p};
    const std::set<Cell> blocked = {60};
    const HaltSet halt({60});

    Channel ch = make_channel(pos, halt);
    oracle::NaschRoad road(pos, 2);
    const std::uint64_t seed = gen();
    UniformStream rng(seed);
    UniformStream mirror(seed);
    for (int t = 0; t < 40; ++t) {
      std::vector<bool> dec;
      for (std::size_t i = 0; i < pos.size(); ++i) dec.push_back(mirror.next() < p);
      road.step(dec, blocked);
      ch = step_nasch(ch, params, halt, rng);
      CHECK(ch.positions == road.x);
      CHECK(ch.velocities == road.v);
    }
  }
}

TEST_CASE("NaSch simulator counts draws and operations") {
  const auto s = build_arterial(10, 60, 30, 10, Model::Nasch, 500);
  NaschSimulator sim(s, NaschParams{2, 0.2}, 5);
  for (int t = 0; t < 500; ++t) sim.step();
  CHECK(sim.t() == 500);
  CHECK(sim.op_count() == 500ull * s.vehicle_count());
  CHECK(sim.draws() == 500ull * s.vehicle_count());
}

TEST_CASE("NaSch runs are reproducible per seed") {
  const auto s = build_arterial(10, 60, 30, 10, Model::Nasch, 300);
  const auto a = run_nasch(s, NaschParams{2, 0.2}, 11);
  const auto b = run_nasch(s, NaschParams{2, 0.2}, 11);
  const auto c = run_nasch(s, NaschParams{2, 0.2}, 12);
  CHECK(a.positions == b.positions);
  CHECK(a.positions != c.positions);
  CHECK(a.metadata.at("seed") == "11");
  CHECK(a.metadata.at("generator") == std::string(kGeneratorName));
}

TEST_CASE("p = 0 and p = 1 are deterministic") {
  for (double p : {0.0, 1.0}) {
    const auto samples = nasch_saturation_samples(NaschParams{2, p}, 8, 600, 1, 1);
    for (double v : samples) CHECK(v == samples.front());
  }
  // Without slowdown the flow equals a deterministic oracle discharge.
  const int queue = 601;
  std::vector<Cell> x;
  for (Cell c = queue; c >= 1; --c) x.push_back(c);
  oracle::NaschRoad road(x, 2);
  int crossed = 0;
  for (int t = 0; t < 600; ++t) {
    const auto before = road.x;
    road.step(std::vector<bool>(x.size(), false), t == 0 ? std::set<Cell>{queue + 1} : std::set<Cell>{});
    for (std::size_t i = 0; i < x.size(); ++i) crossed += before[i] <= queue && road.x[i] > queue;
  }
  const auto free = nasch_saturation_samples(NaschParams{2, 0.0}, 1, 600, 1, 1);
  CHECK(free.front() == doctest::Approx(crossed * 6.0));
}

TEST_CASE("ensemble is independent of the thread count") {
  const auto s = build_arterial(10, 60, 30, 10, Model::Nasch, 400);
  const Cell stop = s.stop_cells()[2];
  ProbeFactory factory = [stop] {
    return std::make_unique<CrossingProbe>(stop, 400, false);
  };
  EnsembleConfig cfg;
  cfg.runs = 12;
  cfg.steps = 400;
  cfg.master_seed = 77;
  cfg.threads = 1;
  const auto one = run_ensemble(s, cfg, factory);
  cfg.threads = 4;
  const auto four = run_ensemble(s, cfg, factory);
  CHECK(one == four);
  CHECK(one.op_count == 12ull * 400 * s.vehicle_count());
  CHECK(one.draws == one.op_count);
  CHECK(one.seeds[5] == child_seed(77, 5));
}

TEST_CASE("ensemble errors propagate") {
  const auto s = build_arterial(2, 60, 30, 10, Model::Nasch, 50);
  ProbeFactory factory = [] { return std::make_unique<ArrivalProbe>(0, 100000); };
  EnsembleConfig cfg;
  cfg.runs = 3;
  cfg.steps = 50;
  try {
    run_ensemble(s, cfg, factory);
    FAIL("expected NeverArrived");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NeverArrived);
  }
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> x;
  for (int k = 100; k >= 1; --k) x.push_back(k);
  const std::vector<double> q = {5, 50, 95, 0, 100};
  CHECK(percentiles(x, q) == std::vector<double>{5, 50, 95, 1, 100});
  CHECK(percentile({7.0}, 50) == 7.0);
  CHECK(percentile({1, 2, 3, 4}, 50) == 2.0);
  const auto summary = summarize(x);
  CHECK(summary.min == 1);
  CHECK(summary.max == 100);
  CHECK(summary.spread() == 90);
  try {
    percentile({}, 50);
    FAIL("expected EmptySample");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySample);
  }
}
