#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lakelet {

/// ASCII case-folded tokens, split on every run of non-alphanumeric bytes.
std::vector<std::string> tokenize(std::string_view text);

/// Ford, Chevrolet, Dodge, Toyota, GMC, Mitsubishi, Mazda, Audi, Benz, Volkswagen.
const std::vector<std::string>& default_brand_names();

/// Single-token brand names in canonical casing, unique case-insensitively.
class BrandLexicon {
 public:
  /// Throws kInvalidArgument if empty, duplicated (case-insensitive) or
  /// containing a name that does not tokenize to exactly itself.
  explicit BrandLexicon(std::vector<std::string> brands);

  static BrandLexicon defaults();
  static BrandLexicon from_file(const std::filesystem::path& path);

  const std::vector<std::string>& brands() const { return brands_; }
  /// Canonical name for a case-folded token.
  std::optional<std::string_view> canonical(std::string_view folded) const;

 private:
  std::vector<std::string> brands_;
  std::unordered_map<std::string, size_t> folded_;
};

/// Brands whose case-folded name occurs as a whole token; set semantics.
std::set<std::string> extract_brands(std::span<const std::string> tokens,
                                     const BrandLexicon& lexicon);

class SentimentLexicon {
 public:
  /// Throws kInvalidArgument when the two sets intersect.
  SentimentLexicon(std::vector<std::string> positive, std::vector<std::string> negative);

  static SentimentLexicon defaults();
  static SentimentLexicon from_files(const std::filesystem::path& positive,
                                     const std::filesystem::path& negative);

  SentimentLexicon swapped() const;

  bool is_positive(std::string_view folded) const { return positive_.count(std::string(folded)) > 0; }
  bool is_negative(std::string_view folded) const { return negative_.count(std::string(folded)) > 0; }

  const std::unordered_set<std::string>& positive() const { return positive_; }
  const std::unordered_set<std::string>& negative() const { return negative_; }

 private:
  std::unordered_set<std::string> positive_;
  std::unordered_set<std::string> negative_;
};

/// (P - N) / (P + N) over lexicon hits, 0 when nothing matches.
double sentiment_score(std::span<const std::string> tokens, const SentimentLexicon& lexicon);

/// One token per line, `#` starts a comment, blank lines ignored.
std::vector<std::string> load_word_list(const std::filesystem::path& path);
std::vector<std::string> parse_word_list(std::string_view text);

/// Contents of the bundled lexicon files.
std::string_view default_positive_words_text();
std::string_view default_negative_words_text();
std::string_view default_brands_text();

}  // namespace lakelet
