#include <benchmark/benchmark.h>

#include "lakelet/text_analytics.hpp"
#include "lakelet/tweets.hpp"

namespace lakelet {
namespace {

void BM_TokenizeTweet(benchmark::State& state) {
  auto tweets = generate_tweets(1, 256, uniform_brand_weights());
  size_t i = 0, bytes = 0;
  for (auto _ : state) {
    const auto& msg = tweets[i++ % tweets.size()].msg;
    benchmark::DoNotOptimize(tokenize(msg));
    bytes += msg.size();
  }
  state.SetBytesProcessed(static_cast<int64_t>(bytes));
}
BENCHMARK(BM_TokenizeTweet);

void BM_ExtractAndScore(benchmark::State& state) {
  auto tweets = generate_tweets(2, 256, uniform_brand_weights());
  auto brands = BrandLexicon::defaults();
  auto sentiment = SentimentLexicon::defaults();
  size_t i = 0;
  for (auto _ : state) {
    auto tokens = tokenize(tweets[i++ % tweets.size()].msg);
    benchmark::DoNotOptimize(extract_brands(tokens, brands));
    benchmark::DoNotOptimize(sentiment_score(tokens, sentiment));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractAndScore);

}  // namespace
}  // namespace lakelet
