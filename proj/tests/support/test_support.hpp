#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace lakelet::testing {

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path data_dir();
std::string slurp(const std::filesystem::path& p);
void spit(const std::filesystem::path& p, const std::string& text);

/// Unbiased draws from a seeded engine; the tests' own generators.
class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}
  uint64_t below(uint64_t n);
  int64_t between(int64_t lo, int64_t hi);
  bool chance(double p);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Oracles below are written independently of the library code they check.

/// Maximal runs of ASCII letters/digits, lower-cased (regex based).
std::vector<std::string> oracle_tokens(const std::string& text);

/// Brands (canonical spelling) whose lower-case form equals some token.
std::set<std::string> oracle_brands(const std::string& text, const std::vector<std::string>& brands);

/// Naive comma split; fixture CSVs never quote.
std::vector<std::vector<std::string>> oracle_read_plain_csv(const std::string& text);

/// Sum of sales.quantity per product.brand via nested loops.
std::map<std::string, int64_t> oracle_units_by_brand(const std::string& sales_csv, const std::string& product_csv);

/// Ranking by (units desc, brand asc), truncated to k.
std::vector<std::pair<std::string, int64_t>> oracle_top_k(const std::map<std::string, int64_t>& units, size_t k);

}  // namespace lakelet::testing
