#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "trustq/trust.hpp"

namespace {

using namespace trustq;
using namespace trustq::trust;

std::vector<MassAssignment> masses(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MassAssignment> out(n);
  for (auto& m : out) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    m = {a, b - a, 1.0 - b};
  }
  return out;
}

void BM_FusePair(benchmark::State& state) {
  const auto ms = masses(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuse_pair(ms[i & 1023], ms[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_FusePair);

void BM_IndirectTrust(benchmark::State& state) {
  const auto ms = masses(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(indirect_trust(ms));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IndirectTrust)->RangeMultiplier(4)->Range(1, 256)->Complexity();

// One trust evaluation of every one-hop neighbour, with a recommendation from each other neighbour.
void BM_TrustedNeighbourList(benchmark::State& state) {
  const auto n = static_cast<NodeId>(state.range(0));
  TrustParams params;
  TrustTable table(0);
  std::vector<NodeId> hop;
  RecommendationMap recs;
  const auto ms = masses(static_cast<std::size_t>(n) * n);
  for (NodeId i = 1; i <= n; ++i) {
    hop.push_back(i);
    table.observe(i, i % 5, i % 3, 0, params);
    for (NodeId r = 1; r <= n; ++r) {
      if (r != i) recs[i].push_back({r, ms[(i - 1) * n + (r - 1)]});
    }
  }
  Tick now = 0;
  for (auto _ : state) benchmark::DoNotOptimize(trusted_neighbour_list(table, hop, recs, ++now, params));
}
BENCHMARK(BM_TrustedNeighbourList)->Arg(3)->Arg(6)->Arg(10)->Arg(20);

}  // namespace
