#include "lakelet/text_analytics.hpp"

#include <algorithm>
#include <cctype>

#include "fs_util.hpp"
#include "lakelet/error.hpp"

namespace lakelet {
namespace {

bool is_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_alnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

const std::vector<std::string>& default_brand_names() {
  static const std::vector<std::string> kBrands = parse_word_list(default_brands_text());
  return kBrands;
}

BrandLexicon::BrandLexicon(std::vector<std::string> brands) : brands_(std::move(brands)) {
  if (brands_.empty()) throw_error(ErrorCode::kInvalidArgument, "brand lexicon is empty");
  for (size_t i = 0; i < brands_.size(); ++i) {
    auto toks = tokenize(brands_[i]);
    if (toks.size() != 1 || toks[0] != fold(brands_[i])) {
      throw_error(ErrorCode::kInvalidArgument,
                  "brand '" + brands_[i] + "' is not a single alphanumeric token");
    }
    if (!folded_.emplace(toks[0], i).second) {
      throw_error(ErrorCode::kInvalidArgument, "duplicate brand '" + brands_[i] + "'");
    }
  }
}

BrandLexicon BrandLexicon::defaults() { return BrandLexicon(default_brand_names()); }

BrandLexicon BrandLexicon::from_file(const std::filesystem::path& path) {
  return BrandLexicon(load_word_list(path));
}

std::optional<std::string_view> BrandLexicon::canonical(std::string_view folded) const {
  auto it = folded_.find(std::string(folded));
  if (it == folded_.end()) return std::nullopt;
  return std::string_view(brands_[it->second]);
}

std::set<std::string> extract_brands(std::span<const std::string> tokens,
                                     const BrandLexicon& lexicon) {
  std::set<std::string> found;
  for (const auto& t : tokens) {
    if (auto b = lexicon.canonical(t)) found.emplace(*b);
  }
  return found;
}

SentimentLexicon::SentimentLexicon(std::vector<std::string> positive,
                                   std::vector<std::string> negative) {
  for (auto& w : positive) positive_.insert(fold(w));
  for (auto& w : negative) {
    std::string f = fold(w);
    if (positive_.count(f)) {
      throw_error(ErrorCode::kInvalidArgument, "'" + f + "' is both positive and negative");
    }
    negative_.insert(std::move(f));
  }
}

SentimentLexicon SentimentLexicon::defaults() {
  return SentimentLexicon(parse_word_list(default_positive_words_text()),
                          parse_word_list(default_negative_words_text()));
}

SentimentLexicon SentimentLexicon::from_files(const std::filesystem::path& positive,
                                              const std::filesystem::path& negative) {
  return SentimentLexicon(load_word_list(positive), load_word_list(negative));
}

SentimentLexicon SentimentLexicon::swapped() const {
  SentimentLexicon out({}, {});
  out.positive_ = negative_;
  out.negative_ = positive_;
  return out;
}

double sentiment_score(std::span<const std::string> tokens, const SentimentLexicon& lexicon) {
  int64_t pos = 0, neg = 0;
  for (const auto& t : tokens) {
    if (lexicon.is_positive(t)) {
      ++pos;
    } else if (lexicon.is_negative(t)) {
      ++neg;
    }
  }
  if (pos + neg == 0) return 0.0;
  return static_cast<double>(pos - neg) / static_cast<double>(pos + neg);
}

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> words;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (!line.empty()) words.emplace_back(line);
    if (end == text.size()) break;
  }
  return words;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  return parse_word_list(fs_util::read_file(path));
}

}  // namespace lakelet
