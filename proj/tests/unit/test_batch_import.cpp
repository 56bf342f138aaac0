#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "lakelet/batch_import.hpp"
#include "lakelet/catalog.hpp"
#include "lakelet/csv.hpp"
#include "lakelet/error.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/schema_read.hpp"
#include "test_support.hpp"

namespace lakelet {
namespace {

using testing::TempDir;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const LakeError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no LakeError thrown";
  return ErrorCode::kNotALake;
}

struct Lake {
  TempDir dir;
  LakeStore store{dir / "lake"};
  Catalog catalog{dir / "lake"};

  std::filesystem::path source(const std::string& name, const std::string& body) {
    auto p = dir / ("src/" + name);
    testing::spit(p, body);
    return p;
  }
};

std::string numbered_csv(int64_t lo, int64_t hi) {
  std::string s = "id,label\n";
  for (int64_t i = lo; i <= hi; ++i) s += std::to_string(i) + ",row" + std::to_string(i) + "\n";
  return s;
}

TEST(PlanSplits, OneToHundredInFour) {
  std::vector<int64_t> v;
  for (int64_t i = 1; i <= 100; ++i) v.push_back(i);
  auto plan = plan_splits(v, 4);
  EXPECT_EQ(plan, (std::vector<SplitRange>{{1, 25}, {26, 50}, {51, 75}, {76, 100}}));
}

TEST(PlanSplits, UnevenAndDegenerate) {
  std::vector<int64_t> v{0, 9};  // width 10 in 3: 4, 3, 3
  EXPECT_EQ(plan_splits(v, 3), (std::vector<SplitRange>{{0, 3}, {4, 6}, {7, 9}}));
  std::vector<int64_t> same{5, 5, 5};
  EXPECT_EQ(plan_splits(same, 4), (std::vector<SplitRange>{{5, 5}}));
  std::vector<int64_t> two{1, 2};
  EXPECT_EQ(plan_splits(two, 8).size(), 2u);
  EXPECT_TRUE(plan_splits(std::span<const int64_t>{}, 4).empty());
  EXPECT_EQ(code_of([&] { plan_splits(v, 0); }), ErrorCode::kInvalidArgument);
}

TEST(PlanSplits, FullInt64RangeDoesNotOverflow) {
  std::vector<int64_t> v{std::numeric_limits<int64_t>::min(), std::numeric_limits<int64_t>::max()};
  auto plan = plan_splits(v, 4);
  ASSERT_EQ(plan.size(), 4u);
  EXPECT_EQ(plan.front().lo, std::numeric_limits<int64_t>::min());
  EXPECT_EQ(plan.back().hi, std::numeric_limits<int64_t>::max());
  for (size_t i = 1; i < plan.size(); ++i) EXPECT_EQ(plan[i].lo, plan[i - 1].hi + 1);
}

// Property: ranges tile [min, max] contiguously, widths differ by at most
// one, and split_index agrees with a linear scan.
TEST(PlanSplits, TilingProperty) {
  testing::Gen g(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const int64_t lo = g.between(-1000, 1000);
    const int64_t hi = lo + g.between(0, 500);
    std::vector<int64_t> v{hi, lo};
    for (int k = 0; k < 5; ++k) v.push_back(g.between(lo, hi));
    const size_t n = 1 + g.below(10);
    auto plan = plan_splits(v, n);
    ASSERT_EQ(plan.size(), std::min<size_t>(n, static_cast<size_t>(hi - lo + 1)));
    ASSERT_EQ(plan.front().lo, lo);
    ASSERT_EQ(plan.back().hi, hi);
    int64_t wmin = INT64_MAX, wmax = 0;
    for (size_t i = 0; i < plan.size(); ++i) {
      ASSERT_LE(plan[i].lo, plan[i].hi);
      if (i) ASSERT_EQ(plan[i].lo, plan[i - 1].hi + 1);
      wmin = std::min(wmin, plan[i].hi - plan[i].lo + 1);
      wmax = std::max(wmax, plan[i].hi - plan[i].lo + 1);
    }
    ASSERT_LE(wmax - wmin, 1);
    for (int64_t x : v) {
      size_t linear = 0;
      while (!plan[linear].contains(x)) ++linear;
      ASSERT_EQ(split_index(plan, x), linear);
    }
  }
}

TEST(SplitIndex, OutsidePlan) {
  std::vector<SplitRange> plan{{1, 5}, {6, 10}};
  EXPECT_EQ(code_of([&] { split_index(plan, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { split_index(plan, 11); }), ErrorCode::kInvalidArgument);
}

TEST(Import, WritesOnePartPerSplitAndRegisters) {
  Lake lake;
  auto src = lake.source("t.csv", numbered_csv(1, 100));
  DatasetId target{Zone::kRaw, "t"};
  auto r = import_table(lake.store, lake.catalog, {src, "t", "id"}, target, {4, false});
  EXPECT_EQ(r.rows_imported, 100u);
  EXPECT_EQ(r.splits_used, 4u);
  EXPECT_EQ(r.files_written, 4u);
  EXPECT_EQ(r.rows_per_split, (std::vector<uint64_t>{25, 25, 25, 25}));
  EXPECT_EQ(r.manifest_version, 1u);
  EXPECT_FALSE(r.no_op);
  EXPECT_FALSE(r.already_imported_warning);

  auto files = lake.store.list_objects(target);
  ASSERT_EQ(files.size(), 4u);
  EXPECT_EQ(files[0].key.partition, "import-000001");
  EXPECT_EQ(files[0].key.filename, "part-00000.csv");
  EXPECT_EQ(files[0].record_count, std::optional<uint64_t>(25));

  auto desc = lake.catalog.get_dataset(target);
  EXPECT_EQ(desc.format, DataFormat::kCsv);
  EXPECT_EQ(desc.source, "csv:t.csv");
  ASSERT_TRUE(desc.schema_hint);
  EXPECT_EQ(desc.schema_hint->names(), (std::vector<std::string>{"id", "label"}));

  auto up = lake.catalog.lineage_of("dataset:raw/t");
  ASSERT_EQ(up.size(), 1u);
  EXPECT_EQ(up[0].from_node, "source:" + source_label(src, r.source_hash));
  EXPECT_EQ(up[0].job_kind, JobKind::kBatchImport);
}

TEST(Import, ReimportWarnsAndAppends) {
  Lake lake;
  auto src = lake.source("t.csv", numbered_csv(1, 10));
  DatasetId target{Zone::kRaw, "t"};
  import_table(lake.store, lake.catalog, {src, "t", "id"}, target, {2, false});
  auto again = import_table(lake.store, lake.catalog, {src, "t", "id"}, target, {2, false});
  EXPECT_TRUE(again.already_imported_warning);
  EXPECT_EQ(again.manifest_version, 2u);
  EXPECT_EQ(lake.store.list_objects(target).size(), 4u);
  EXPECT_EQ(lake.store.list_objects(target).back().key.partition, "import-000002");
  EXPECT_EQ(lake.catalog.lineage_of("dataset:raw/t").size(), 1u);
}

TEST(Import, EmptyTableIsNoOp) {
  Lake lake;
  auto src = lake.source("e.csv", "id,label\n");
  auto r = import_table(lake.store, lake.catalog, {src, "e", "id"}, {Zone::kRaw, "e"}, {});
  EXPECT_TRUE(r.no_op);
  EXPECT_EQ(r.rows_imported, 0u);
  EXPECT_EQ(lake.store.current_version({Zone::kRaw, "e"}), 0u);
  EXPECT_FALSE(lake.catalog.find_dataset({Zone::kRaw, "e"}));
}

TEST(Import, NonNumericSplitFallsBackToOneSplit) {
  Lake lake;
  auto src = lake.source("s.csv", "code,v\nab,1\ncd,2\nef,3\n");
  auto r = import_table(lake.store, lake.catalog, {src, "s", "code"}, {Zone::kRaw, "s"}, {4, false});
  EXPECT_EQ(r.non_numeric_split_fallbacks, 1u);
  EXPECT_EQ(r.splits_used, 1u);
  EXPECT_EQ(r.rows_imported, 3u);
}

TEST(Import, Errors) {
  Lake lake;
  auto src = lake.source("t.csv", numbered_csv(1, 5));
  EXPECT_EQ(code_of([&] {
              import_table(lake.store, lake.catalog, {lake.dir / "missing.csv", "m", std::nullopt}, {Zone::kRaw, "m"}, {});
            }),
            ErrorCode::kImportAborted);
  EXPECT_EQ(code_of([&] { import_table(lake.store, lake.catalog, {src, "t", "nope"}, {Zone::kRaw, "t"}, {}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { import_table(lake.store, lake.catalog, {src, "t", "id"}, {Zone::kRaw, "Bad"}, {}); }),
            ErrorCode::kInvalidKey);
  EXPECT_EQ(code_of([&] { import_table(lake.store, lake.catalog, {src, "t", "id"}, {Zone::kRaw, "t"}, {0, false}); }),
            ErrorCode::kInvalidArgument);
  DatasetDescriptor d;
  d.name = "j";
  d.format = DataFormat::kJsonl;
  lake.catalog.register_dataset(d);
  EXPECT_EQ(code_of([&] { import_table(lake.store, lake.catalog, {src, "t", "id"}, {Zone::kRaw, "j"}, {}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Import, StrictAbortsLenientSkipsRaggedRows) {
  Lake lake;
  auto src = lake.source("r.csv", "id,v\n1,a\n2\n3,c\n");
  EXPECT_EQ(code_of([&] { import_table(lake.store, lake.catalog, {src, "r", "id"}, {Zone::kRaw, "r"}, {2, true}); }),
            ErrorCode::kImportAborted);
  EXPECT_EQ(lake.store.current_version({Zone::kRaw, "r"}), 0u);
  auto r = import_table(lake.store, lake.catalog, {src, "r", "id"}, {Zone::kRaw, "r"}, {2, false});
  EXPECT_EQ(r.rows_skipped, 1u);
  EXPECT_EQ(r.rows_imported, 2u);
}

// Importing with any split count yields the same multiset of rows.
TEST(Import, SplitCountDoesNotChangeContent) {
  testing::Gen g(23);
  std::string body = "id,name,score\n";
  for (int i = 0; i < 300; ++i) {
    body += std::to_string(g.between(-50, 400)) + ",\"n," + std::to_string(i) + "\"," +
            std::to_string(g.between(0, 9)) + "\n";
  }
  std::vector<std::vector<Row>> results;
  for (size_t splits : {1u, 2u, 4u, 8u}) {
    Lake lake;
    auto src = lake.source("x.csv", body);
    auto r = import_table(lake.store, lake.catalog, {src, "x", "id"}, {Zone::kRaw, "x"}, {splits, false});
    EXPECT_EQ(r.rows_imported, 300u);
    EXPECT_LE(r.splits_used, splits);
    auto t = read_dataset(lake.store, {Zone::kRaw, "x"}, ReadMode::kStrict);
    std::sort(t.rows.begin(), t.rows.end());
    results.push_back(t.rows);
  }
  for (size_t i = 1; i < results.size(); ++i) EXPECT_EQ(results[i], results[0]);
}

TEST(Import, PlanFromSource) {
  Lake lake;
  auto src = lake.source("t.csv", numbered_csv(1, 100));
  EXPECT_EQ(plan_splits(TableSource{src, "t", "id"}, 4).size(), 4u);
}

}  // namespace
}  // namespace lakelet
