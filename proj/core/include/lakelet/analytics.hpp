#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lakelet/query.hpp"
#include "lakelet/text_analytics.hpp"

namespace lakelet {

struct RankedBrand {
  int rank = 0;  // 1-based
  std::string brand;
  int64_t metric = 0;

  bool operator==(const RankedBrand&) const = default;
};

/// Metric non-increasing with rank; equal metrics ordered by brand ascending.
using RankedBrands = std::vector<RankedBrand>;

RankedBrands rank_brands(const std::map<std::string, int64_t>& metrics);

/// Join sales to products on product_id, sum quantity per brand, order by
/// total desc then brand asc, keep k.
query::LogicalPlan bestselling_brands_plan(const std::string& sales_ds,
                                           const std::string& product_ds, size_t k);

RankedBrands bestselling_brands(const query::ScanProvider& provider, const std::string& sales_ds,
                                const std::string& product_ds, size_t k,
                                query::ExecStats* stats = nullptr);

/// Per lexicon brand, number of distinct (by `_uuid`) tweets whose msg
/// mentions it. Every lexicon brand appears, zeros included.
RankedBrands brand_mentions(const query::ScanProvider& provider, const std::string& tweets_ds,
                            const BrandLexicon& lexicon);

struct SalesMentionsRow {
  std::string brand;
  int sales_rank = 0;
  int64_t sales_metric = 0;
  int64_t mentions = 0;

  bool operator==(const SalesMentionsRow&) const = default;
};

/// One row per brand in sales order, joined with mention counts (0 if absent).
std::vector<SalesMentionsRow> sales_vs_mentions(const RankedBrands& sales_rank,
                                                const RankedBrands& mention_counts);

struct BrandSentiment {
  uint64_t tweets = 0;
  std::optional<double> mean_score;  // nullopt when tweets == 0

  bool operator==(const BrandSentiment&) const = default;
};

std::map<std::string, BrandSentiment> brand_sentiment(const query::ScanProvider& provider,
                                                      const std::string& tweets_ds,
                                                      const BrandLexicon& brands,
                                                      const SentimentLexicon& sentiment);

}  // namespace lakelet
