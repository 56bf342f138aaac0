#include "lakelet/tweets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "lakelet/error.hpp"
#include "lakelet/text_analytics.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet {

using nlohmann::ordered_json;

namespace {

constexpr int64_t kBaseTweetId = 1109349236406140929;
constexpr int64_t kBaseMillis = 1553324443328;

// Neutral vocabulary plus words that near-miss brand tokens, so extraction
// must match whole tokens.
constexpr std::string_view kFiller[] = {
    "just",     "saw",      "the",       "new",      "car",     "at",       "dealer",   "today",
    "test",     "drive",    "weekend",   "road",     "trip",    "engine",   "brake",    "lines",
    "kit",      "for",      "sale",      "price",    "lease",   "deal",     "my",       "our",
    "wheels",   "sedan",    "truck",     "suv",      "hybrid",  "electric", "model",    "lineup",
    "parts",    "service",  "showroom",  "miles",    "highway", "city",     "fordable", "dodgeball",
    "benzene",  "audition", "toyotathon", "mazdaspeed", "gm",    "motors",   "auto",     "rt",
    "nytimes",  "review",   "commute",   "garage",   "tires",   "fuel",     "seats",    "interior"};

constexpr std::string_view kPositive[] = {"love",  "great",  "amazing", "best",     "smooth",
                                          "reliable", "awesome", "happy", "recommend", "fast"};
constexpr std::string_view kNegative[] = {"hate",  "bad",    "terrible", "recall", "broken",
                                          "slow",  "expensive", "noisy", "problem", "worst"};

constexpr std::string_view kHandles[] = {"StunningCamer", "getraddielater", "autofan", "roadwarrior",
                                         "gearhead",      "carlover",       "motorhead", "dealwatch"};
constexpr std::string_view kLocations[] = {"", "", "", "Brooklyn", "Detroit", "Los Angeles", "Austin",
                                           "London", "Toronto"};
constexpr std::string_view kTimeZones[] = {"", "", "Eastern Time (US & Canada)", "Pacific Time (US & Canada)",
                                           "London"};
constexpr std::string_view kOtherLangs[] = {"es", "fr", "de", "pt", "ja"};
constexpr char kUrlAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

template <size_t N>
std::string_view choose(const std::string_view (&arr)[N], uint64_t r) {
  return arr[r % N];
}

}  // namespace

const std::vector<std::string>& tweet_field_names() {
  static const std::vector<std::string> names = {"tweet_id",    "created_unixtime", "created_time",
                                                 "lang",        "location",         "displayname",
                                                 "time_zone",   "msg"};
  return names;
}

std::string to_json_line(const Tweet& t) {
  ordered_json j;
  j["tweet_id"] = t.tweet_id;
  j["created_unixtime"] = t.created_unixtime;
  j["created_time"] = t.created_time;
  j["lang"] = t.lang;
  j["location"] = t.location;
  j["displayname"] = t.displayname;
  j["time_zone"] = t.time_zone;
  j["msg"] = t.msg;
  return j.dump();
}

Tweet parse_tweet_json(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    Tweet t;
    t.tweet_id = j.at("tweet_id").get<int64_t>();
    t.created_unixtime = j.at("created_unixtime").get<int64_t>();
    t.created_time = j.at("created_time").get<std::string>();
    t.lang = j.at("lang").get<std::string>();
    t.location = j.at("location").get<std::string>();
    t.displayname = j.at("displayname").get<std::string>();
    t.time_zone = j.at("time_zone").get<std::string>();
    t.msg = j.at("msg").get<std::string>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorCode::kParseError, std::string("bad tweet: ") + e.what());
  }
}

BrandWeights uniform_brand_weights() {
  BrandWeights w;
  for (const auto& b : default_brand_names()) w[b] = 1.0;
  return w;
}

TweetGenerator::TweetGenerator(uint64_t seed, BrandWeights weights)
    : rng_(seed), next_id_(kBaseTweetId), next_ms_(kBaseMillis) {
  double total = 0;
  for (const auto& [brand, w] : weights) {
    if (!std::isfinite(w) || w < 0) {
      throw_error(ErrorCode::kInvalidWeights, "weight for '" + brand + "' must be finite and >= 0");
    }
    if (w == 0) continue;
    total += w;
    brands_.push_back(brand);
    cumulative_.push_back(total);
  }
  if (brands_.empty()) throw_error(ErrorCode::kInvalidWeights, "brand weights are all zero");
}

uint64_t TweetGenerator::below(uint64_t n) {
  // Rejection sampling keeps the draw unbiased and library-independent.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = rng_();
  } while (r >= limit);
  return r % n;
}

double TweetGenerator::unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

const std::string& TweetGenerator::pick_brand() {
  double x = unit() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  if (it == cumulative_.end()) --it;
  return brands_[static_cast<size_t>(it - cumulative_.begin())];
}

std::string TweetGenerator::styled_brand(const std::string& brand) {
  std::string s = brand;
  switch (below(10)) {
    case 0:
      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    case 1:
      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      break;
    case 2:
      s = "#" + s;
      break;
    case 3:
      s += "'s";
      break;
    default:
      break;
  }
  return s;
}

Tweet TweetGenerator::next() {
  Tweet t;
  next_id_ += 1 + static_cast<int64_t>(below(4'000'000'000ULL));
  next_ms_ += 1 + static_cast<int64_t>(below(1200));
  t.tweet_id = next_id_;
  t.created_unixtime = next_ms_;
  t.created_time = twitter_time(next_ms_);
  t.lang = unit() < 0.93 ? "en" : std::string(choose(kOtherLangs, below(5)));
  t.location = std::string(choose(kLocations, below(1 << 20)));
  t.displayname = std::string(choose(kHandles, below(1 << 20)));
  if (below(3) == 0) t.displayname += std::to_string(below(1000));
  t.time_zone = std::string(choose(kTimeZones, below(1 << 20)));

  if (below(100) == 0) {
    ++produced_;
    return t;  // empty msg
  }

  std::vector<std::string> words;
  const uint64_t filler = 4 + below(9);
  for (uint64_t i = 0; i < filler; ++i) {
    uint64_t kind = below(10);
    if (kind == 0) {
      words.emplace_back(choose(kPositive, below(1 << 20)));
    } else if (kind == 1) {
      words.emplace_back(choose(kNegative, below(1 << 20)));
    } else {
      words.emplace_back(choose(kFiller, below(1 << 20)));
    }
  }
  // 0-3 brands, most tweets mention exactly one.
  const uint64_t roll = below(100);
  const int mentions = roll < 25 ? 0 : roll < 80 ? 1 : roll < 95 ? 2 : 3;
  for (int i = 0; i < mentions; ++i) {
    std::string b = styled_brand(pick_brand());
    auto pos = static_cast<std::ptrdiff_t>(below(words.size() + 1));
    words.insert(words.begin() + pos, std::move(b));
  }
  if (below(4) == 0) {
    std::string url = "https://tco/";
    for (int i = 0; i < 10; ++i) url.push_back(kUrlAlphabet[below(sizeof(kUrlAlphabet) - 1)]);
    words.push_back(std::move(url));
  }
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) t.msg.push_back(' ');
    t.msg += words[i];
  }
  ++produced_;
  return t;
}

void TweetGenerator::skip(uint64_t n) {
  for (uint64_t i = 0; i < n; ++i) next();
}

std::vector<Tweet> generate_tweets(uint64_t seed, size_t n, const BrandWeights& weights) {
  TweetGenerator gen(seed, weights);
  std::vector<Tweet> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(gen.next());
  return out;
}

}  // namespace lakelet
