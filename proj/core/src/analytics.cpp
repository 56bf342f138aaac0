#include "lakelet/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "lakelet/error.hpp"

namespace lakelet {

using query::LogicalPlan;

namespace {

/// Deduplicated msg column of a tweets dataset; nullopt when the dataset has
/// no rows and hence no inferable columns.
std::optional<std::vector<std::string>> tweet_messages(const query::ScanProvider& provider,
                                                       const std::string& tweets_ds) {
  auto scan = LogicalPlan::scan(tweets_ds, /*dedup=*/true);
  SchemaDescriptor schema = query::output_schema(scan, provider);
  if (schema.fields.empty()) return std::nullopt;
  if (!schema.index_of("msg")) {
    throw_error(ErrorCode::kPlanError, tweets_ds + " has no msg field");
  }
  auto result = query::execute(scan.project({"msg"}), provider);
  std::vector<std::string> msgs;
  msgs.reserve(result.table.rows.size());
  for (const auto& row : result.table.rows) msgs.push_back(row[0].to_text());
  return msgs;
}

}  // namespace

RankedBrands rank_brands(const std::map<std::string, int64_t>& metrics) {
  std::vector<std::pair<std::string, int64_t>> items(metrics.begin(), metrics.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RankedBrands out;
  out.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    out.push_back(RankedBrand{static_cast<int>(i + 1), items[i].first, items[i].second});
  }
  return out;
}

LogicalPlan bestselling_brands_plan(const std::string& sales_ds, const std::string& product_ds,
                                    size_t k) {
  using query::Predicate;
  using query::SortDir;
  return LogicalPlan::scan(sales_ds)
      .join(LogicalPlan::scan(product_ds), "product_id", "product_id")
      .filter(!Predicate::is_null("brand"))
      .group_by({"brand"}, {query::Aggregate::sum("quantity")})
      .sort({{"sum_quantity", SortDir::kDesc}, {"brand", SortDir::kAsc}})
      .limit(k);
}

RankedBrands bestselling_brands(const query::ScanProvider& provider, const std::string& sales_ds,
                                const std::string& product_ds, size_t k, query::ExecStats* stats) {
  auto result = query::execute(bestselling_brands_plan(sales_ds, product_ds, k), provider);
  if (stats) *stats = result.stats;
  RankedBrands out;
  for (const auto& row : result.table.rows) {
    int64_t metric = row[1].dtype() == DType::kInt ? row[1].as_int()
                                                   : static_cast<int64_t>(std::llround(row[1].as_float()));
    out.push_back(RankedBrand{static_cast<int>(out.size() + 1), row[0].to_text(), metric});
  }
  return out;
}

RankedBrands brand_mentions(const query::ScanProvider& provider, const std::string& tweets_ds,
                            const BrandLexicon& lexicon) {
  std::map<std::string, int64_t> counts;
  for (const auto& b : lexicon.brands()) counts[b] = 0;
  if (auto msgs = tweet_messages(provider, tweets_ds)) {
    for (const auto& msg : *msgs) {
      auto tokens = tokenize(msg);
      for (const auto& b : extract_brands(tokens, lexicon)) ++counts[b];
    }
  }
  return rank_brands(counts);
}

std::vector<SalesMentionsRow> sales_vs_mentions(const RankedBrands& sales_rank,
                                                const RankedBrands& mention_counts) {
  if (sales_rank.empty() || mention_counts.empty()) {
    throw_error(ErrorCode::kInvalidArgument, "sales_vs_mentions needs two non-empty rankings");
  }
  std::map<std::string, int64_t> mentions;
  for (const auto& m : mention_counts) mentions[m.brand] = m.metric;
  std::vector<SalesMentionsRow> out;
  out.reserve(sales_rank.size());
  for (const auto& s : sales_rank) {
    auto it = mentions.find(s.brand);
    out.push_back(SalesMentionsRow{s.brand, s.rank, s.metric, it == mentions.end() ? 0 : it->second});
  }
  return out;
}

std::map<std::string, BrandSentiment> brand_sentiment(const query::ScanProvider& provider,
                                                      const std::string& tweets_ds,
                                                      const BrandLexicon& brands,
                                                      const SentimentLexicon& sentiment) {
  std::map<std::string, double> totals;
  std::map<std::string, BrandSentiment> out;
  for (const auto& b : brands.brands()) out[b] = BrandSentiment{};
  if (auto msgs = tweet_messages(provider, tweets_ds)) {
    for (const auto& msg : *msgs) {
      auto tokens = tokenize(msg);
      auto mentioned = extract_brands(tokens, brands);
      if (mentioned.empty()) continue;
      double score = sentiment_score(tokens, sentiment);
      for (const auto& b : mentioned) {
        ++out[b].tweets;
        totals[b] += score;
      }
    }
  }
  for (auto& [brand, s] : out) {
    if (s.tweets > 0) s.mean_score = totals[brand] / static_cast<double>(s.tweets);
  }
  return out;
}

}  // namespace lakelet
