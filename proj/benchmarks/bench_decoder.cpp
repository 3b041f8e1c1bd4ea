#include <benchmark/benchmark.h>

#include "mixcsc/utf8.hpp"
#include "shipped.hpp"

using namespace mixcsc;

namespace {

const Text& sentence() {
  static const Text s = utf8_decode("他昨天在电嬴院取千，邻居觉得这次比赛比较按静。");
  return s;
}

// Full decode (context, candidates, search) for one sentence at beam K.
void BM_Decode(benchmark::State& state) {
  const auto models = bench::shipped().models();
  MixtureConfig config;
  config.beam_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(models, config, sentence()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sentence().size()));
}
BENCHMARK(BM_Decode)->Arg(1)->Arg(4)->Arg(12)->Arg(32)->Unit(benchmark::kMillisecond);

// Search alone on a context with warm caches.
void BM_BeamSearchWarm(benchmark::State& state) {
  const auto models = bench::shipped().models();
  MixtureConfig config;
  config.beam_size = static_cast<int>(state.range(0));
  SentenceContext ctx(models, config, sentence());
  beam_search(ctx);
  for (auto _ : state) benchmark::DoNotOptimize(beam_search(ctx));
}
BENCHMARK(BM_BeamSearchWarm)->Arg(1)->Arg(12)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace
