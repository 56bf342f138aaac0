#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <limits>

#include <nlohmann/json.hpp>

#include "lakelet/error.hpp"
#include "lakelet/text_analytics.hpp"
#include "lakelet/tweets.hpp"
#include "test_support.hpp"

namespace lakelet {
namespace {

using nlohmann::json;

std::vector<std::string> sample_lines() {
  std::ifstream in(testing::data_dir() / "sample_tweets.jsonl");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) lines.push_back(l);
  }
  if (lines.size() != 3) throw std::runtime_error("expected 3 sample tweets in tests/data");
  return lines;
}

TEST(Tweets, FieldNamesInWireOrder) {
  EXPECT_EQ(tweet_field_names(), (std::vector<std::string>{"tweet_id", "created_unixtime", "created_time", "lang",
                                                           "location", "displayname", "time_zone", "msg"}));
}

TEST(Tweets, SamplesParseAndRoundTrip) {
  auto lines = sample_lines();
  ASSERT_EQ(lines.size(), 3u);
  auto t = parse_tweet_json(lines[0]);
  EXPECT_EQ(t.tweet_id, 1109349236406140929);
  EXPECT_EQ(t.created_unixtime, 1553324443328);
  EXPECT_EQ(t.created_time, "Sat Mar 23 07:00:43 +0000 2019");
  EXPECT_EQ(t.lang, "en");
  EXPECT_EQ(t.displayname, "StunningCamer");
  EXPECT_EQ(parse_tweet_json(lines[1]).location, "Brooklyn");
  for (const auto& l : lines) EXPECT_EQ(to_json_line(parse_tweet_json(l)), l);
}

TEST(Tweets, SampleBrandsMatchOracle) {
  auto lines = sample_lines();
  auto lex = BrandLexicon::defaults();
  const std::vector<std::set<std::string>> expected = {{"Mitsubishi"}, {"Chevrolet"}, {"Audi"}};
  for (size_t i = 0; i < lines.size(); ++i) {
    auto msg = parse_tweet_json(lines[i]).msg;
    auto tokens = tokenize(msg);
    EXPECT_EQ(extract_brands(tokens, lex), expected[i]);
    EXPECT_EQ(testing::oracle_brands(msg, lex.brands()), expected[i]);
  }
}

TEST(Tweets, ParseRejectsMissingOrMistyped) {
  auto code = [](std::string_view s) {
    try {
      parse_tweet_json(s);
    } catch (const LakeError& e) {
      return e.code();
    }
    return ErrorCode::kNotALake;
  };
  EXPECT_EQ(code("not json"), ErrorCode::kParseError);
  EXPECT_EQ(code("[1,2]"), ErrorCode::kParseError);
  auto j = json::parse(sample_lines()[0]);
  j.erase("msg");
  EXPECT_EQ(code(j.dump()), ErrorCode::kParseError);
  j = json::parse(sample_lines()[0]);
  j["tweet_id"] = "12";
  EXPECT_EQ(code(j.dump()), ErrorCode::kParseError);
}

TEST(Generator, DeterministicAndSkipConsistent) {
  auto a = generate_tweets(7, 200, uniform_brand_weights());
  auto b = generate_tweets(7, 200, uniform_brand_weights());
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_tweets(8, 200, uniform_brand_weights()));
  TweetGenerator g(7, uniform_brand_weights());
  g.skip(150);
  EXPECT_EQ(g.produced(), 150u);
  EXPECT_EQ(g.next(), a[150]);
}

TEST(Generator, WellFormedRecords) {
  auto tweets = generate_tweets(42, 2000, uniform_brand_weights());
  std::set<int64_t> ids;
  int64_t prev_ms = 0;
  size_t english = 0;
  for (const auto& t : tweets) {
    EXPECT_TRUE(ids.insert(t.tweet_id).second);
    EXPECT_GE(t.created_unixtime, prev_ms);
    prev_ms = t.created_unixtime;
    EXPECT_FALSE(t.created_time.empty());
    EXPECT_FALSE(t.displayname.empty());
    if (t.lang == "en") ++english;
    // Every line survives a parse round trip.
    EXPECT_EQ(parse_tweet_json(to_json_line(t)), t);
  }
  EXPECT_GT(english, 1700u);
  EXPECT_LT(english, 1990u);
}

TEST(Generator, WeightsSteerMentions) {
  BrandWeights w = uniform_brand_weights();
  for (auto& [b, v] : w) v = 0.0;
  w["Ford"] = 1.0;
  auto lex = BrandLexicon::defaults();
  for (const auto& t : generate_tweets(1, 300, w)) {
    auto tokens = tokenize(t.msg);
    for (const auto& b : extract_brands(tokens, lex)) EXPECT_EQ(b, "Ford");
  }
}

TEST(Generator, InvalidWeights) {
  auto code = [](BrandWeights w) {
    try {
      TweetGenerator g(1, std::move(w));
    } catch (const LakeError& e) {
      return e.code();
    }
    return ErrorCode::kNotALake;
  };
  EXPECT_EQ(code({}), ErrorCode::kInvalidWeights);
  EXPECT_EQ(code({{"Ford", 0.0}}), ErrorCode::kInvalidWeights);
  EXPECT_EQ(code({{"Ford", -1.0}, {"Audi", 2.0}}), ErrorCode::kInvalidWeights);
  EXPECT_EQ(code({{"Ford", std::numeric_limits<double>::infinity()}}), ErrorCode::kInvalidWeights);
}

// Frozen mention counts for seed 42, 5000 tweets, uniform weights, computed
// with the regex oracle.
TEST(Generator, PinnedSeed42BrandCounts) {
  const std::map<std::string, int64_t> frozen = {
      {"Audi", 506}, {"Benz", 494},       {"Chevrolet", 504}, {"Dodge", 462},  {"Ford", 500},
      {"GMC", 483},  {"Mazda", 465},      {"Mitsubishi", 504}, {"Toyota", 492}, {"Volkswagen", 474}};
  auto lex = BrandLexicon::defaults();
  std::map<std::string, int64_t> oracle;
  std::map<std::string, int64_t> library;
  for (const auto& t : generate_tweets(42, 5000, uniform_brand_weights())) {
    for (const auto& b : testing::oracle_brands(t.msg, lex.brands())) ++oracle[b];
    auto tokens = tokenize(t.msg);
    for (const auto& b : extract_brands(tokens, lex)) ++library[b];
  }
  EXPECT_EQ(oracle, frozen);
  EXPECT_EQ(library, oracle);
}

}  // namespace
}  // namespace lakelet
