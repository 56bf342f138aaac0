#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "lakelet/batch_import.hpp"
#include "lakelet/catalog.hpp"
#include "lakelet/fixtures.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/schema_read.hpp"
#include "lakelet/tweets.hpp"

namespace lakelet {
namespace {

void BM_InferCsv(benchmark::State& state) {
  bench::ScratchDir dir;
  LakeStore store(dir.path());
  Catalog catalog(dir.path());
  FixtureOptions fo;
  fo.sales_rows = static_cast<size_t>(state.range(0));
  auto paths = write_fixtures(dir.path() / "src", fo);
  const DatasetId ds{Zone::kRaw, "sales"};
  import_table(store, catalog, TableSource{paths.at("sales"), "sales", "sale_id"}, ds);
  for (auto _ : state) benchmark::DoNotOptimize(infer_schema(store, ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InferCsv)->Arg(1000)->Arg(10000);

void BM_InferJsonl(benchmark::State& state) {
  bench::ScratchDir dir;
  LakeStore store(dir.path());
  std::string body;
  for (const auto& t : generate_tweets(3, static_cast<size_t>(state.range(0)), uniform_brand_weights())) {
    body += to_json_line(t) + "\n";
  }
  const DatasetId ds{Zone::kRaw, "tweets"};
  store.commit_manifest(ds, {store.put_object(ObjectKey{Zone::kRaw, "tweets", "p0", "t.jsonl"}, body)});
  for (auto _ : state) benchmark::DoNotOptimize(infer_schema(store, ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InferJsonl)->Arg(1000)->Arg(5000);

}  // namespace
}  // namespace lakelet
