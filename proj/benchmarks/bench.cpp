#include <benchmark/benchmark.h>

#include "qlink/analytic.hpp"
#include "qlink/dde.hpp"
#include "qlink/protocols.hpp"
#include "qlink/sweep.hpp"
#include "qlink/ww.hpp"

using namespace qlink;

namespace {

// Two emitters with STIRAP pulses at the resource-rule duration.
void BM_EvolvePair(benchmark::State& state) {
  const double g = 0.5;
  const int m = static_cast<int>(state.range(0));
  const double T = resource_rule_duration(g);
  const auto link = LinkParams::make(g, 1.0, 50 * kPi);
  const auto p = make_pulses({ProtocolKind::Stirap, g, T}, link);
  const auto grid = TimeGrid::make(1.0, m, T);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_pair(link, p.sender, p.receiver, {cplx{1, 0}, cplx{}}, grid));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_EvolvePair)->Arg(100)->Arg(200)->Arg(400);

// Single emitter in the multimode model over the Fig.-2 window.
void BM_EvolveWW(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto link = LinkParams::make(0.1, 1.0, 50 * kPi);
  const auto modes = build_modes(link, n, LadderPolicy::ClipAtCutoff);
  const auto grid = TimeGrid::make(1.0, min_steps_per_tau(link, modes), 12.0);
  const auto pulse = PulseProfile::constant(0.1, 0.0, 12.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_ww_single(link, modes, pulse, cplx{1, 0}, grid));
  }
}
BENCHMARK(BM_EvolveWW)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_Eigenfrequencies(benchmark::State& state) {
  const auto link = LinkParams::make(1.5, 1.0, 50 * kPi);
  const double span = static_cast<double>(state.range(0)) * kPi;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigenfrequencies(link, link.delta() - span, link.delta() + span));
  }
}
BENCHMARK(BM_Eigenfrequencies)->Arg(1)->Arg(10)->Arg(100);

void BM_CzkmExactError(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(czkm_exact_error(0.5, 1.0, 20.0));
}
BENCHMARK(BM_CzkmExactError);

void BM_OptimalStirap(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimal_stirap(1.0));
}
BENCHMARK(BM_OptimalStirap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
