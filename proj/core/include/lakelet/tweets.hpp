#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lakelet {

struct Tweet {
  int64_t tweet_id = 0;
  int64_t created_unixtime = 0;  // ms
  std::string created_time;
  std::string lang;
  std::string location;
  std::string displayname;
  std::string time_zone;
  std::string msg;

  bool operator==(const Tweet&) const = default;
};

/// Field names in on-the-wire order.
const std::vector<std::string>& tweet_field_names();

/// One compact JSON object, fields in on-the-wire order.
std::string to_json_line(const Tweet& t);
/// Throws kParseError on a missing or mistyped field.
Tweet parse_tweet_json(std::string_view line);

using BrandWeights = std::map<std::string, double>;

/// Weight 1 for every default brand.
BrandWeights uniform_brand_weights();

/// Deterministic synthetic tweet stream. The sequence depends only on
/// (seed, weights); sampling avoids std distributions so it is identical
/// across standard libraries.
class TweetGenerator {
 public:
  /// Throws kInvalidWeights when weights are empty, negative, non-finite or all zero.
  TweetGenerator(uint64_t seed, BrandWeights weights);

  Tweet next();
  /// Advances past `n` tweets.
  void skip(uint64_t n);
  uint64_t produced() const { return produced_; }

 private:
  uint64_t below(uint64_t n);
  double unit();
  const std::string& pick_brand();
  std::string styled_brand(const std::string& brand);

  std::mt19937_64 rng_;
  std::vector<std::string> brands_;
  std::vector<double> cumulative_;
  int64_t next_id_;
  int64_t next_ms_;
  uint64_t produced_ = 0;
};

std::vector<Tweet> generate_tweets(uint64_t seed, size_t n, const BrandWeights& weights);

}  // namespace lakelet
