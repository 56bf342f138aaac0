#include "lakelet/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lakelet/csv.hpp"

namespace lakelet::report {
namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void bar_chart(std::ostringstream& os, const std::string& title,
               const std::vector<std::pair<std::string, int64_t>>& bars, size_t label_width,
               size_t bar_width) {
  int64_t max = 0;
  for (const auto& [_, v] : bars) max = std::max(max, v);
  os << title << '\n';
  for (const auto& [label, v] : bars) {
    size_t cells = max > 0 ? static_cast<size_t>((static_cast<double>(v) / max) * bar_width + 0.5) : 0;
    os << "  " << label << std::string(label_width - label.size(), ' ') << " | "
       << std::string(cells, '#') << std::string(bar_width - cells, ' ') << ' ' << v << '\n';
  }
}

}  // namespace

std::string sales_mentions_csv(const std::vector<SalesMentionsRow>& rows) {
  std::string out = "brand,sales_rank,sales_metric,mentions\n";
  for (const auto& r : rows) {
    out += csv::format_record({r.brand, std::to_string(r.sales_rank), std::to_string(r.sales_metric),
                               std::to_string(r.mentions)});
  }
  return out;
}

std::string sales_mentions_json(const std::vector<SalesMentionsRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"brand", r.brand},
                   {"sales_rank", r.sales_rank},
                   {"sales_metric", r.sales_metric},
                   {"mentions", r.mentions}});
  }
  return arr.dump(2) + "\n";
}

std::string sales_mentions_ascii(const std::vector<SalesMentionsRow>& rows, size_t bar_width) {
  size_t label_width = 5;
  for (const auto& r : rows) label_width = std::max(label_width, r.brand.size());
  std::vector<std::pair<std::string, int64_t>> sales, mentions;
  for (const auto& r : rows) {
    sales.emplace_back(r.brand, r.sales_metric);
    mentions.emplace_back(r.brand, r.mentions);
  }
  std::ostringstream os;
  bar_chart(os, "Top " + std::to_string(rows.size()) + " brands by units sold", sales, label_width,
            bar_width);
  os << '\n';
  bar_chart(os, "Tweets mentioning each brand", mentions, label_width, bar_width);
  return os.str();
}

std::string sentiment_csv(const std::map<std::string, BrandSentiment>& s) {
  std::string out = "brand,tweets,mean_score\n";
  for (const auto& [brand, v] : s) {
    out += csv::format_record(
        {brand, std::to_string(v.tweets), v.mean_score ? fixed4(*v.mean_score) : std::string()});
  }
  return out;
}

std::string sentiment_json(const std::map<std::string, BrandSentiment>& s) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [brand, v] : s) {
    nlohmann::ordered_json row{{"brand", brand}, {"tweets", v.tweets}};
    row["mean_score"] = v.mean_score ? nlohmann::ordered_json(*v.mean_score) : nlohmann::ordered_json();
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

std::string sentiment_ascii(const std::map<std::string, BrandSentiment>& s) {
  size_t label_width = 5;
  for (const auto& [brand, _] : s) label_width = std::max(label_width, brand.size());
  std::ostringstream os;
  os << "Mean tweet sentiment per brand (-1 .. +1)\n";
  constexpr int kHalf = 20;
  for (const auto& [brand, v] : s) {
    os << "  " << brand << std::string(label_width - brand.size(), ' ') << " | ";
    if (!v.mean_score) {
      os << std::string(2 * kHalf + 1, ' ') << " n/a (0 tweets)\n";
      continue;
    }
    int cells = static_cast<int>(*v.mean_score * kHalf + (*v.mean_score >= 0 ? 0.5 : -0.5));
    std::string bar(2 * kHalf + 1, ' ');
    bar[kHalf] = '|';
    if (cells > 0) {
      for (int i = 1; i <= cells; ++i) bar[kHalf + i] = '+';
    } else {
      for (int i = 1; i <= -cells; ++i) bar[kHalf - i] = '-';
    }
    os << bar << ' ' << fixed4(*v.mean_score) << " (" << v.tweets << " tweets)\n";
  }
  return os.str();
}

}  // namespace lakelet::report
