#include <benchmark/benchmark.h>

#include <string>

#include "bench_util.hpp"
#include "lakelet/lake_store.hpp"

namespace lakelet {
namespace {

void BM_PutObject(benchmark::State& state) {
  bench::ScratchDir dir;
  LakeStore store(dir.path());
  const std::string payload(static_cast<size_t>(state.range(0)), 'x');
  uint64_t n = 0;
  for (auto _ : state) {
    store.put_object(ObjectKey{Zone::kRaw, "bench", "p0", "f" + std::to_string(n++)}, payload);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_PutObject)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);

void BM_CommitManifest(benchmark::State& state) {
  bench::ScratchDir dir;
  LakeStore store(dir.path());
  const DatasetId ds{Zone::kRaw, "bench"};
  uint64_t n = 0;
  for (auto _ : state) {
    auto ref = store.put_object(ObjectKey{Zone::kRaw, "bench", "p0", "f" + std::to_string(n++)}, "row\n");
    store.commit_manifest(ds, {ref});
  }
}
BENCHMARK(BM_CommitManifest)->Iterations(200);

}  // namespace
}  // namespace lakelet
