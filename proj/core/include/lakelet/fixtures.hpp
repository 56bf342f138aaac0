#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lakelet/csv.hpp"

namespace lakelet {

/// Seeded stand-in for the car-trading database: product, sales, customer,
/// showroom and stock tables.
struct FixtureOptions {
  uint64_t seed = 42;
  size_t sales_rows = 1000;
  size_t customers = 200;
  size_t showrooms = 8;
};

struct FixtureTable {
  std::string name;
  std::string split_column;  // integer key used for split import
  csv::Table table;
};

/// Tables in import order: product, customer, showroom, sales, stock.
std::vector<FixtureTable> generate_fixtures(const FixtureOptions& options = {});

/// Writes `<dir>/<name>.csv` per table; returns name -> path.
std::map<std::string, std::filesystem::path> write_fixtures(const std::filesystem::path& dir,
                                                            const FixtureOptions& options = {});

}  // namespace lakelet
