#include <benchmark/benchmark.h>

#include "mixcsc/utf8.hpp"
#include "shipped.hpp"

using namespace mixcsc;

namespace {

void BM_ClassifyPair(benchmark::State& state) {
  const auto& res = *bench::shipped().resources;
  const Text a = utf8_decode("水者天午在按");
  const Text b = utf8_decode("睡证夫牛再安");
  for (auto _ : state) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      benchmark::DoNotOptimize(classify_pair(a[i], b[i], res));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_ClassifyPair);

void BM_NGramDistribution(benchmark::State& state) {
  const auto& lm = bench::shipped().lm;
  auto st = lm.initial_state();
  for (Char c : utf8_decode("妈妈明天")) {
    const auto id = lm.find_token(Text(1, c));
    st = lm.step(st, id ? *id : lm.unknown_token());
  }
  for (auto _ : state) benchmark::DoNotOptimize(lm.distribution(st));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(lm.vocabulary().size()));
}
BENCHMARK(BM_NGramDistribution);

void BM_ClassifierPosition(benchmark::State& state) {
  const auto& cls = *bench::shipped().classifier;
  const Text src = utf8_decode("妈妈明天要去医院看并。");
  for (auto _ : state) benchmark::DoNotOptimize(cls.distribution_at(src, 9));
}
BENCHMARK(BM_ClassifierPosition);

}  // namespace
