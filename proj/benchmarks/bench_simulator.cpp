#include <benchmark/benchmark.h>

#include "trustq/scenario.hpp"
#include "trustq/simulator.hpp"

namespace {

using namespace trustq;

ScenarioConfig config(std::uint32_t n, std::uint64_t episodes) {
  auto cfg = parse_scenario(
      "[scenario]\nroad_length_per_node = 100\nmax_degree = 10\nheading_mode = forward\n"
      "[attackers.g]\nkind = grayhole\nfraction = 0.2\n");
  cfg.n_nodes = n;
  cfg.road_length = cfg.effective_road_length();
  cfg.episodes = episodes;
  return cfg;
}

// Per-episode cost once tables are warm: ticks, HELLO rounds and one routed packet.
void BM_RunEpisode(benchmark::State& state) {
  const auto cfg = config(static_cast<std::uint32_t>(state.range(0)), 1);
  RngStreams rngs(cfg.seed);
  NetworkState net = build_topology(cfg, rngs.topology);
  hello_round(net, cfg);
  std::uint64_t e = 0;
  for (auto _ : state) {
    for (std::uint32_t k = 0; k < cfg.ticks_per_episode; ++k) tick(net, cfg);
    benchmark::DoNotOptimize(run_episode(net, cfg, ++e % cfg.episodes + 1, rngs.routing, rngs.adversary));
  }
}
BENCHMARK(BM_RunEpisode)->Arg(16)->Arg(32)->Arg(64);

void BM_RunScenario(benchmark::State& state) {
  const auto cfg = config(static_cast<std::uint32_t>(state.range(0)), 500);
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
}
BENCHMARK(BM_RunScenario)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
