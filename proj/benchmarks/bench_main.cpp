#include <random>

#include <benchmark/benchmark.h>

#include "pinch/generic.hpp"
#include "pinch/graph.hpp"
#include "pinch/pipeline.hpp"

namespace {

pinch::Word random_word(std::mt19937& rng, int rank, std::size_t length) {
  std::uniform_int_distribution<int> gen(0, rank);
  std::bernoulli_distribution sign;
  std::vector<pinch::Letter> letters;
  for (std::size_t i = 0; i < length; ++i) letters.push_back(pinch::Letter{gen(rng), sign(rng) ? 1 : -1});
  return pinch::Word(std::move(letters));
}

void BM_FreeReduce(benchmark::State& state) {
  std::mt19937 rng(7);
  const auto w = random_word(rng, 2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pinch::free_reduce(w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FreeReduce)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_FoldQ0(benchmark::State& state) {
  std::mt19937 rng(11);
  const auto c = pinch::parse_word("a1 b a1^-1 b^-1");
  const auto w = random_word(rng, 1, static_cast<std::size_t>(state.range(0)));
  const auto q0 = pinch::build_Q0(c, w);
  for (auto _ : state) benchmark::DoNotOptimize(pinch::fold(q0));
}
BENCHMARK(BM_FoldQ0)->RangeMultiplier(4)->Range(4, 1024);

void BM_GenericBuild(benchmark::State& state) {
  const auto c = pinch::parse_word("a1 b a1^-1 b^-1");
  pinch::Budgets b;
  b.powers = 5;
  b.witness_words = pinch::enumerate_reduced_words(1, 4);
  std::erase_if(b.witness_words, [&](const pinch::Word& w) { return pinch::is_power_of(w, c).has_value(); });
  b.orbit_sizes = 5;
  b.copies = 3;
  b.intervals = static_cast<int>(state.range(0));
  const auto conditions = pinch::schedule(c, b);
  for (auto _ : state) benchmark::DoNotOptimize(pinch::build_generic_action(c, 1, conditions).state().reserved().size());
}
BENCHMARK(BM_GenericBuild)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SurfacePipeline(benchmark::State& state) {
  const auto config = pinch::surface_preset(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pinch::run_pipeline(config).ok());
}
BENCHMARK(BM_SurfacePipeline)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
