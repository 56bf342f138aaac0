#include <benchmark/benchmark.h>

#include <nlohmann/json.hpp>

#include "bench_util.hpp"
#include "lakelet/catalog.hpp"
#include "lakelet/flow.hpp"
#include "lakelet/lake_store.hpp"

namespace lakelet {
namespace {

void BM_TweetFlow(benchmark::State& state) {
  auto spec = FlowGraphSpec::from_json(nlohmann::json::parse(R"({
    "name": "bench",
    "processors": [
      {"name": "tweets", "kind": "tweet_source"},
      {"name": "parse", "kind": "parse_tweet"},
      {"name": "sink", "kind": "micro_batch_sink", "params": {"dataset": "raw/tweets", "batch_max": 500}}
    ],
    "connections": [{"from": "tweets", "to": "parse"}, {"from": "parse", "to": "sink"}]
  })"));
  auto graph = build_graph(spec);
  RunOptions opts;
  opts.record_limit = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    bench::ScratchDir dir;
    LakeStore store(dir.path());
    Catalog catalog(dir.path());
    state.ResumeTiming();
    benchmark::DoNotOptimize(run_flow(graph, store, catalog, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TweetFlow)->Arg(5000)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace lakelet
