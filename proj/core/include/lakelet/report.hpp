#pragma once

#include <map>
#include <string>
#include <vector>

#include "lakelet/analytics.hpp"

namespace lakelet::report {

/// Columns: brand,sales_rank,sales_metric,mentions
std::string sales_mentions_csv(const std::vector<SalesMentionsRow>& rows);
std::string sales_mentions_json(const std::vector<SalesMentionsRow>& rows);
/// Two aligned horizontal bar charts, sales above mentions, bars scaled so the
/// largest value spans `bar_width` cells.
std::string sales_mentions_ascii(const std::vector<SalesMentionsRow>& rows, size_t bar_width = 40);

/// Columns: brand,tweets,mean_score (empty when undefined)
std::string sentiment_csv(const std::map<std::string, BrandSentiment>& s);
std::string sentiment_json(const std::map<std::string, BrandSentiment>& s);
std::string sentiment_ascii(const std::map<std::string, BrandSentiment>& s);

}  // namespace lakelet::report
