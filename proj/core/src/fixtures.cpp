#include "lakelet/fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "fs_util.hpp"
#include "lakelet/text_analytics.hpp"

namespace lakelet {

namespace {

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }
  int64_t between(int64_t lo, int64_t hi) { return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1))); }

 private:
  std::mt19937_64 gen_;
};

constexpr const char* kModels[] = {"Sedan", "Coupe", "Wagon", "Pickup", "Crossover", "Hatchback", "Van", "Roadster"};
constexpr const char* kCities[] = {"Toronto", "Ottawa", "Montreal", "Calgary", "Vancouver", "Halifax", "Winnipeg"};
constexpr const char* kFirst[] = {"Alex", "Sam", "Jordan", "Taylor", "Morgan", "Casey", "Riley", "Jamie", "Avery", "Quinn"};
constexpr const char* kLast[] = {"Smith", "Lee", "Brown", "Martin", "Roy", "Wilson", "Tremblay", "Singh", "Chen", "Gagnon"};

std::string money(int64_t cents) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

}  // namespace

std::vector<FixtureTable> generate_fixtures(const FixtureOptions& options) {
  Rng rng(options.seed);
  const auto& brands = default_brand_names();

  FixtureTable product{"product", "product_id", {{"product_id", "brand", "model", "price"}, {}}};
  std::vector<size_t> product_brand;
  int64_t pid = 1;
  for (size_t b = 0; b < brands.size(); ++b) {
    const uint64_t models = 2 + rng.below(4);
    for (uint64_t m = 0; m < models; ++m) {
      std::string model = std::string(kModels[rng.below(std::size(kModels))]) + " " + std::to_string(100 + rng.below(900));
      product.table.rows.push_back(
          {std::to_string(pid++), brands[b], model, money(rng.between(1'500'000, 8'500'000))});
      product_brand.push_back(b);
    }
  }

  FixtureTable customer{"customer", "customer_id", {{"customer_id", "name", "city"}, {}}};
  for (size_t c = 1; c <= options.customers; ++c) {
    customer.table.rows.push_back({std::to_string(c),
                                   std::string(kFirst[rng.below(std::size(kFirst))]) + " " +
                                       kLast[rng.below(std::size(kLast))],
                                   kCities[rng.below(std::size(kCities))]});
  }

  FixtureTable showroom{"showroom", "showroom_id", {{"showroom_id", "name", "city"}, {}}};
  for (size_t s = 1; s <= options.showrooms; ++s) {
    const char* city = kCities[(s - 1) % std::size(kCities)];
    showroom.table.rows.push_back({std::to_string(s), std::string(city) + " Motors " + std::to_string(s), city});
  }

  // Brands earlier in the lexicon sell more often, so rankings resemble the
  // canonical order without being forced to it.
  std::vector<uint64_t> cumulative;
  uint64_t total = 0;
  for (size_t i = 0; i < product_brand.size(); ++i) {
    total += 3 * (brands.size() - product_brand[i]) + 1;
    cumulative.push_back(total);
  }
  FixtureTable sales{"sales",
                     "sale_id",
                     {{"sale_id", "product_id", "customer_id", "showroom_id", "quantity", "sale_date"}, {}}};
  for (size_t s = 1; s <= options.sales_rows; ++s) {
    uint64_t x = rng.below(total);
    size_t p = static_cast<size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
    char date[16];
    std::snprintf(date, sizeof(date), "2019-%02d-%02d", static_cast<int>(rng.between(1, 12)),
                  static_cast<int>(rng.between(1, 28)));
    sales.table.rows.push_back({std::to_string(s), std::to_string(p + 1),
                                std::to_string(rng.between(1, static_cast<int64_t>(options.customers))),
                                std::to_string(rng.between(1, static_cast<int64_t>(options.showrooms))),
                                std::to_string(rng.between(1, 5)), date});
  }

  FixtureTable stock{"stock", "showroom_id", {{"showroom_id", "product_id", "quantity"}, {}}};
  for (size_t s = 1; s <= options.showrooms; ++s) {
    for (size_t p = 1; p <= product_brand.size(); ++p) {
      if (rng.below(3) == 0) continue;
      stock.table.rows.push_back({std::to_string(s), std::to_string(p), std::to_string(rng.between(0, 20))});
    }
  }

  std::vector<FixtureTable> out;
  out.push_back(std::move(product));
  out.push_back(std::move(customer));
  out.push_back(std::move(showroom));
  out.push_back(std::move(sales));
  out.push_back(std::move(stock));
  return out;
}

std::map<std::string, std::filesystem::path> write_fixtures(const std::filesystem::path& dir,
                                                            const FixtureOptions& options) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::filesystem::path> paths;
  for (const auto& t : generate_fixtures(options)) {
    auto p = dir / (t.name + ".csv");
    fs_util::write_atomic(p, csv::format_table(t.table));
    paths[t.name] = p;
  }
  return paths;
}

}  // namespace lakelet
