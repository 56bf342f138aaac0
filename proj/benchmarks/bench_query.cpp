#include <benchmark/benchmark.h>

#include "lakelet/analytics.hpp"
#include "lakelet/fixtures.hpp"
#include "lakelet/query.hpp"
#include "lakelet/schema_read.hpp"

namespace lakelet {
namespace {

query::Table typed(const csv::Table& t) {
  query::Table out;
  for (const auto& name : t.header) out.schema.fields.push_back({name, DType::kString, true});
  std::vector<DType> types(t.header.size(), DType::kBool);
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (auto d = classify_text(row[i])) types[i] = widen(types[i], *d);
    }
  }
  for (size_t i = 0; i < types.size(); ++i) out.schema.fields[i].dtype = types[i];
  for (const auto& row : t.rows) {
    Row r;
    for (size_t i = 0; i < row.size(); ++i) r.push_back(coerce_text(row[i], types[i]).value_or(Value::null()));
    out.rows.push_back(std::move(r));
  }
  return out;
}

void BM_BestsellingBrands(benchmark::State& state) {
  FixtureOptions fo;
  fo.sales_rows = static_cast<size_t>(state.range(0));
  query::MemoryScanProvider provider;
  for (const auto& t : generate_fixtures(fo)) provider.add("raw/" + t.name, typed(t.table));
  for (auto _ : state) benchmark::DoNotOptimize(bestselling_brands(provider, "raw/sales", "raw/product", 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BestsellingBrands)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace lakelet
