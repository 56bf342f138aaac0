#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "lakelet/analytics.hpp"
#include "lakelet/batch_import.hpp"
#include "lakelet/catalog.hpp"
#include "lakelet/error.hpp"
#include "lakelet/fixtures.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/report.hpp"
#include "lakelet/tweets.hpp"
#include "test_support.hpp"

namespace lakelet {
namespace {

using query::MemoryScanProvider;
using query::Table;

Table tweets_table(const std::vector<std::pair<std::string, std::string>>& uuid_msg) {
  Table t{{{{"_uuid", DType::kString, false}, {"msg", DType::kString, true}}}, {}};
  for (const auto& [u, m] : uuid_msg) t.rows.push_back({u, m});
  return t;
}

TEST(RankBrands, OrdersByMetricThenName) {
  auto r = rank_brands({{"Benz", 5}, {"Audi", 5}, {"Ford", 9}, {"GMC", 0}});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0], (RankedBrand{1, "Ford", 9}));
  EXPECT_EQ(r[1], (RankedBrand{2, "Audi", 5}));
  EXPECT_EQ(r[2], (RankedBrand{3, "Benz", 5}));
  EXPECT_EQ(r[3], (RankedBrand{4, "GMC", 0}));
  EXPECT_TRUE(rank_brands({}).empty());
}

TEST(BrandMentions, CountsDistinctTweetsAndKeepsZeros) {
  MemoryScanProvider p;
  p.add("raw/tweets", tweets_table({{"u1", "Ford ford FORD"}, {"u2", "audi and #Ford"}, {"u1", "Ford dup"},
                                    {"u3", "nothing"}}));
  auto r = brand_mentions(p, "raw/tweets", BrandLexicon::defaults());
  ASSERT_EQ(r.size(), 10u);
  EXPECT_EQ(r[0], (RankedBrand{1, "Ford", 2}));
  EXPECT_EQ(r[1], (RankedBrand{2, "Audi", 1}));
  EXPECT_EQ(r[2].metric, 0);
  EXPECT_EQ(r[2].brand, "Benz");
}

TEST(BrandMentions, EmptyDatasetGivesZeros) {
  MemoryScanProvider p;
  p.add("raw/tweets", Table{});
  auto r = brand_mentions(p, "raw/tweets", BrandLexicon::defaults());
  EXPECT_EQ(r.size(), 10u);
  for (const auto& b : r) EXPECT_EQ(b.metric, 0);
}

TEST(BrandMentions, MissingMsgIsPlanError) {
  MemoryScanProvider p;
  p.add("raw/t", Table{{{{"x", DType::kInt, false}}}, {{1}}});
  try {
    brand_mentions(p, "raw/t", BrandLexicon::defaults());
    FAIL();
  } catch (const LakeError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlanError);
  }
}

TEST(SalesVsMentions, JoinsInSalesOrder) {
  RankedBrands sales{{1, "Ford", 10}, {2, "Audi", 4}};
  RankedBrands mentions{{1, "Audi", 7}, {2, "Benz", 3}};
  auto rows = sales_vs_mentions(sales, mentions);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (SalesMentionsRow{"Ford", 1, 10, 0}));
  EXPECT_EQ(rows[1], (SalesMentionsRow{"Audi", 2, 4, 7}));
  EXPECT_THROW(sales_vs_mentions({}, mentions), LakeError);
}

TEST(BrandSentiment, MeanPerBrandAndUndefinedWhenUnmentioned) {
  MemoryScanProvider p;
  p.add("raw/tweets", tweets_table({{"a", "love my Ford"}, {"b", "Ford is terrible, Audi great"}, {"c", "Audi"}}));
  SentimentLexicon lex({"love", "great"}, {"terrible"});
  auto s = brand_sentiment(p, "raw/tweets", BrandLexicon::defaults(), lex);
  EXPECT_EQ(s.size(), 10u);
  EXPECT_EQ(s["Ford"].tweets, 2u);
  EXPECT_DOUBLE_EQ(*s["Ford"].mean_score, 0.5);  // (1 + 0) / 2
  EXPECT_DOUBLE_EQ(*s["Audi"].mean_score, 0.0);  // (0 + 0) / 2
  EXPECT_EQ(s["GMC"].tweets, 0u);
  EXPECT_FALSE(s["GMC"].mean_score.has_value());
}

TEST(Reports, CsvJsonAscii) {
  std::vector<SalesMentionsRow> rows{{"Ford", 1, 10, 3}, {"Audi", 2, 5, 6}};
  EXPECT_EQ(report::sales_mentions_csv(rows), "brand,sales_rank,sales_metric,mentions\nFord,1,10,3\nAudi,2,5,6\n");
  auto j = nlohmann::json::parse(report::sales_mentions_json(rows));
  EXPECT_EQ(j[1]["mentions"], 6);
  auto ascii = report::sales_mentions_ascii(rows, 10);
  EXPECT_NE(ascii.find("Ford  | ########## 10"), std::string::npos);
  EXPECT_NE(ascii.find("Audi  | #####      5"), std::string::npos);
  EXPECT_NE(ascii.find("Audi  | ########## 6"), std::string::npos);
  std::map<std::string, BrandSentiment> s{{"Audi", {2, 0.25}}, {"GMC", {0, std::nullopt}}};
  EXPECT_EQ(report::sentiment_csv(s), "brand,tweets,mean_score\nAudi,2,0.2500\nGMC,0,\n");
  auto sj = nlohmann::json::parse(report::sentiment_json(s));
  EXPECT_TRUE(sj[1]["mean_score"].is_null());
  EXPECT_NE(report::sentiment_ascii(s).find("n/a (0 tweets)"), std::string::npos);
}

// End to end over the lake: imported fixtures ranked by the engine must
// equal a brute-force nested-loop count over the raw CSV text.
TEST(Bestselling, MatchesNestedLoopOracle) {
  testing::TempDir dir;
  LakeStore store(dir / "lake");
  Catalog cat(dir / "lake");
  auto paths = write_fixtures(dir / "src", {7, 600, 50, 4});
  for (const auto& [name, path] : paths) {
    std::optional<std::string> split;
    if (name == "sales") split = "sale_id";
    import_table(store, cat, TableSource{path, name, split}, {Zone::kRaw, name}, {3, false});
  }
  query::LakeScanProvider lake(store, ReadMode::kLenient, &cat);
  auto units = testing::oracle_units_by_brand(testing::slurp(paths["sales"]), testing::slurp(paths["product"]));
  for (size_t k : {1u, 3u, 10u, 20u}) {
    auto got = bestselling_brands(lake, "raw/sales", "raw/product", k);
    auto want = testing::oracle_top_k(units, k);
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].rank, static_cast<int>(i + 1));
      EXPECT_EQ(got[i].brand, want[i].first);
      EXPECT_EQ(got[i].metric, want[i].second);
    }
  }
}

TEST(Fixtures, DeterministicShape) {
  auto a = generate_fixtures();
  auto b = generate_fixtures();
  ASSERT_EQ(a.size(), 5u);
  std::vector<std::string> names;
  for (size_t i = 0; i < a.size(); ++i) {
    names.push_back(a[i].name);
    EXPECT_EQ(a[i].table.header, b[i].table.header);
    EXPECT_EQ(a[i].table.rows, b[i].table.rows);
  }
  EXPECT_EQ(names, (std::vector<std::string>{"product", "customer", "showroom", "sales", "stock"}));
  EXPECT_EQ(a[3].table.rows.size(), 1000u);
  EXPECT_NE(generate_fixtures({43}).at(3).table.rows, a[3].table.rows);
}

}  // namespace
}  // namespace lakelet
